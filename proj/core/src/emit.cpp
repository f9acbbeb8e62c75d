#include "alt/emit.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace alt {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec) {
    out << "tau,A,L,T,rA,rE\n";
    for (const auto& s : rec.samples)
        out << fmt17(s.tau) << ',' << fmt17(s.assets) << ',' << fmt17(s.leverage) << ','
            << fmt17(s.trust) << ',' << fmt17(s.roa) << ',' << fmt17(s.roe) << '\n';
}

nlohmann::json terminal_json(const TerminalEvent& ev) {
    nlohmann::json j;
    j["kind"] = to_string(ev.kind);
    if (std::isfinite(ev.leverage)) j["leverage"] = ev.leverage;
    return j;
}

void write_roa_field_csv(std::ostream& out, const RoaField& field) {
    out << "L,T,rA\n";
    for (std::size_t it = 0; it < field.trust.size(); ++it)
        for (std::size_t il = 0; il < field.leverage.size(); ++il)
            out << fmt17(field.leverage[il]) << ',' << fmt17(field.trust[it]) << ','
                << fmt17(field.at(it, il)) << '\n';
}

void write_basin_csv(std::ostream& out, const BasinMap& map) {
    out << "L,T,label,confidence\n";
    for (std::size_t it = 0; it < map.trust.size(); ++it) {
        for (std::size_t il = 0; il < map.leverage.size(); ++il) {
            const auto& cell = map.at(it, il);
            if (!cell) continue;
            out << fmt17(map.leverage[il]) << ',' << fmt17(map.trust[it]) << ','
                << to_string(cell->label) << ',' << (cell->low_confidence ? "low" : "high")
                << '\n';
        }
    }
}

void write_curve_csv(std::ostream& out, std::span<const double> trust,
                     std::span<const double> leverage) {
    if (trust.size() != leverage.size())
        throw std::invalid_argument("emit: curve columns must have equal length");
    out << "T,L\n";
    for (std::size_t i = 0; i < trust.size(); ++i)
        out << fmt17(trust[i]) << ',' << fmt17(leverage[i]) << '\n';
}

void write_scenario_csv(std::ostream& out, const ScenarioResult& result) {
    out << "tau,A,L,T,rA,rE,segment\n";
    for (std::size_t i = 0; i < result.path.samples.size(); ++i) {
        const auto& s = result.path.samples[i];
        out << fmt17(s.tau) << ',' << fmt17(s.assets) << ',' << fmt17(s.leverage) << ','
            << fmt17(s.trust) << ',' << fmt17(s.roa) << ',' << fmt17(s.roe) << ','
            << result.sample_segment[i] << '\n';
    }
}

void write_sweep_summary_csv(std::ostream& out, std::span<const SweepEntry> entries) {
    out << "intervention_tau,stationary_rA,crisis_duration,lnA_at_horizon\n";
    for (const auto& e : entries)
        out << fmt17(e.intervention_tau) << ',' << fmt17(e.stationary_roa) << ','
            << fmt17(e.crisis_duration) << ',' << fmt17(e.ln_assets_at_horizon) << '\n';
}

namespace {

const char* to_string(FixedPointKind kind) {
    switch (kind) {
        case FixedPointKind::DiagonalAxisPoint: return "diagonal_axis_point";
        case FixedPointKind::OriginL0: return "origin_L0";
        case FixedPointKind::OneL0: return "one_L0";
    }
    return "unknown";
}

}  // namespace

nlohmann::json fixed_point_json(const FixedPointReport& report) {
    nlohmann::json j;
    j["kind"] = to_string(report.kind);
    j["location"] = {{"T", report.trust}, {"L", report.leverage}};
    if (report.jac) {
        j["jacobian"] = {{report.jac->a11, report.jac->a12},
                         {report.jac->a21, report.jac->a22}};
    } else {
        j["jacobian"] = nullptr;
    }
    if (report.eigen) {
        j["eigenvalues"] = {{report.eigen->first.real(), report.eigen->first.imag()},
                            {report.eigen->second.real(), report.eigen->second.imag()}};
    } else {
        j["eigenvalues"] = nullptr;
    }
    j["classification"] = to_string(report.classification);
    j["stationary_roa"] = report.stationary_roa;
    j["L0_in_domain"] = report.l0_in_domain;
    return j;
}

nlohmann::json stability_report_json(const Params& p,
                                     std::span<const FixedPointReport> reports) {
    const auto [beta, L0] = derive(p);
    nlohmann::json j;
    j["params"] = {{"a_tilde", p.a_tilde}, {"g_tilde", p.g_tilde}, {"r_tilde", p.r_tilde},
                   {"k", p.k}};
    j["beta"] = beta;
    j["L0"] = L0;
    j["L0_in_domain"] = L0 >= 0.0 && L0 <= 1.0;
    j["fixed_points"] = nlohmann::json::array();
    for (const auto& r : reports) j["fixed_points"].push_back(fixed_point_json(r));
    return j;
}

std::string encode_states_rle(std::span<const Regime> states) {
    if (states.empty()) return "";
    std::string out;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= states.size(); ++i) {
        if (i < states.size() && states[i] == states[i - 1]) {
            ++run;
            continue;
        }
        if (!out.empty()) out += ';';
        out += states[i - 1] == Regime::S1 ? '1' : '2';
        out += 'x';
        out += std::to_string(run);
        run = 1;
    }
    return out;
}

std::vector<Regime> decode_states_rle(const std::string& rle) {
    std::vector<Regime> states;
    std::size_t pos = 0;
    while (pos < rle.size()) {
        const char state_char = rle[pos];
        if ((state_char != '1' && state_char != '2') || pos + 1 >= rle.size() ||
            rle[pos + 1] != 'x')
            throw std::invalid_argument("emit: malformed state RLE '" + rle + "'");
        pos += 2;
        std::size_t len = 0;
        while (pos < rle.size() && rle[pos] != ';') {
            if (rle[pos] < '0' || rle[pos] > '9')
                throw std::invalid_argument("emit: malformed state RLE '" + rle + "'");
            len = len * 10 + static_cast<std::size_t>(rle[pos] - '0');
            ++pos;
        }
        if (pos < rle.size()) ++pos;  // skip ';'
        states.insert(states.end(), len, state_char == '1' ? Regime::S1 : Regime::S2);
    }
    return states;
}

void write_draws_csv(std::ostream& out, const PosteriorDraws& draws) {
    out << "iter,c1,c2,sigma_eps2,lambda,mu,L1,T1,states_rle\n";
    for (std::size_t i = 0; i < draws.draws.size(); ++i) {
        const auto& d = draws.draws[i];
        out << (draws.burn_in + i) << ',' << fmt17(d.params.c1) << ',' << fmt17(d.params.c2)
            << ',' << fmt17(d.params.sigma_eps2) << ',' << fmt17(d.params.lambda_rate) << ','
            << fmt17(d.params.mu_rate) << ',' << fmt17(d.params.L1) << ','
            << fmt17(d.params.T1) << ',' << encode_states_rle(d.path.states) << '\n';
    }
}

namespace {

void write_quantile_row(std::ostream& out, const std::string& name, long t,
                        const Quantiles& q) {
    // Stored order: q10..q40, median, q60..q90; emitted median-first.
    out << name << ',' << t << ',' << fmt17(q[4]);
    for (int i : {0, 1, 2, 3, 5, 6, 7, 8}) out << ',' << fmt17(q[i]);
    out << '\n';
}

}  // namespace

void write_posterior_summary_csv(std::ostream& out, const PosteriorSummary& summary) {
    out << "series,t,median,q10,q20,q30,q40,q60,q70,q80,q90\n";
    for (const auto& series : summary.series)
        for (std::size_t t = 0; t < series.per_step.size(); ++t)
            write_quantile_row(out, series.name, static_cast<long>(t), series.per_step[t]);
    for (std::size_t t = 0; t < summary.p_state2.size(); ++t) {
        Quantiles q;
        q.fill(summary.p_state2[t]);
        write_quantile_row(out, "p_state2", static_cast<long>(t), q);
    }
    for (const auto& [name, q] : summary.params) write_quantile_row(out, "param:" + name, -1, q);
}

}  // namespace alt
