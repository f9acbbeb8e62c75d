#include "alt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alt {

namespace {

Params segment_params(double a_tilde, const RegimeSegment& seg, double k) {
    return {a_tilde, seg.g_tilde, seg.r_tilde, k};
}

std::optional<double> terminal_roa(const TrajectoryRecord& rec, const Params& last_params) {
    switch (rec.terminal.kind) {
        case TerminalKind::ConvergedToDiagonal:
            return diagonal_roa(rec.terminal.leverage, last_params);
        case TerminalKind::ConvergedToPoint:
            return -last_params.a_tilde;
        default:
            return std::nullopt;
    }
}

// Total tau-measure of {r_A < 0} along the sampled path. Sign changes inside
// a segment are linearly interpolated; across a segment boundary the ROA jumps
// exactly at the boundary sample, so the whole interval carries the left sign.
double negative_roa_duration(const ScenarioResult& result) {
    const auto& samples = result.path.samples;
    double total = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const auto& a = samples[i - 1];
        const auto& b = samples[i];
        const double dt = b.tau - a.tau;
        if (result.sample_segment[i] != result.sample_segment[i - 1]) {
            if (a.roa < 0.0) total += dt;
        } else if (a.roa < 0.0 && b.roa < 0.0) {
            total += dt;
        } else if (a.roa < 0.0 || b.roa < 0.0) {
            const double frac = std::fabs(a.roa) / (std::fabs(a.roa) + std::fabs(b.roa));
            total += a.roa < 0.0 ? frac * dt : (1.0 - frac) * dt;
        }
    }
    return total;
}

}  // namespace

void validate_schedule(std::span<const RegimeSegment> schedule) {
    if (schedule.empty())
        throw std::invalid_argument("scenario: schedule must contain at least one segment");
    if (schedule.front().tau_start != 0.0)
        throw std::invalid_argument("scenario: first segment must start at tau = 0");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (!(schedule[i].tau_start > schedule[i - 1].tau_start))
            throw std::invalid_argument("scenario: segment starts must be strictly increasing");
    for (const auto& seg : schedule)
        if (!std::isfinite(seg.tau_start) || !std::isfinite(seg.g_tilde) ||
            !std::isfinite(seg.r_tilde))
            throw std::invalid_argument("scenario: segments must be finite");
}

ScenarioResult run_schedule(const EconState& s0, double a_tilde,
                            std::span<const RegimeSegment> schedule,
                            const IntegratorConfig& cfg, double k) {
    validate_schedule(schedule);
    validate(cfg);

    ScenarioResult result;
    result.schedule.assign(schedule.begin(), schedule.end());
    result.a_tilde = a_tilde;

    EconState state = s0;
    double tau_offset = 0.0;
    bool terminated = false;

    for (std::size_t i = 0; i < schedule.size() && !terminated; ++i) {
        const Params p = segment_params(a_tilde, schedule[i], k);
        const bool last = i + 1 == schedule.size();
        const double segment_end =
            last ? cfg.max_tau : std::min(schedule[i + 1].tau_start, cfg.max_tau);
        if (!(segment_end > tau_offset)) break;  // remaining segments lie beyond the horizon

        IntegratorConfig seg_cfg = cfg;
        seg_cfg.max_tau = segment_end - tau_offset;
        const TrajectoryRecord rec = integrate(state, p, seg_cfg);

        std::size_t first = 0;
        if (!result.path.samples.empty()) {
            // The boundary sample already recorded by the previous segment is
            // re-evaluated under the incoming regime so ROA/ROE jump at the kink.
            TrajectorySample boundary = rec.samples.front();
            boundary.tau = result.path.samples.back().tau;
            result.path.samples.back() = boundary;
            result.sample_segment.back() = i;
            first = 1;
        }
        for (std::size_t j = first; j < rec.samples.size(); ++j) {
            TrajectorySample s = rec.samples[j];
            s.tau += tau_offset;
            result.path.samples.push_back(s);
            result.sample_segment.push_back(i);
        }

        if (rec.terminal.kind == TerminalKind::HorizonReached && !last &&
            segment_end < cfg.max_tau) {
            // Reached the segment boundary; continue with the next regime.
            const TrajectorySample& end = rec.samples.back();
            state = {end.assets, end.leverage, end.trust};
            tau_offset = segment_end;
        } else {
            result.path.terminal = rec.terminal;
            terminated = true;
        }
    }
    if (!terminated) result.path.terminal = {TerminalKind::HorizonReached};

    const RegimeSegment& last_seg = result.schedule[result.sample_segment.empty()
                                                        ? result.schedule.size() - 1
                                                        : result.sample_segment.back()];
    result.stationary_roa = terminal_roa(result.path, segment_params(a_tilde, last_seg, k));
    result.diagnostics = asset_growth_diagnostics(result);
    return result;
}

std::vector<DiagnosticsPoint> asset_growth_diagnostics(const ScenarioResult& result) {
    if (result.path.samples.empty())
        throw std::invalid_argument("scenario: diagnostics need a nonempty path");
    const double lnA0 = std::log(result.path.samples.front().assets);
    std::vector<DiagnosticsPoint> out;
    out.reserve(result.path.samples.size());
    for (const auto& s : result.path.samples)
        out.push_back({s.tau, s.roa, s.roa * s.tau, std::log(s.assets) - lnA0});
    return out;
}

SweepResult intervention_sweep(const EconState& s0, double a_tilde, const RegimeSegment& pre,
                               std::pair<double, double> crisis_gr,
                               std::pair<double, double> intervention_gr, double crisis_start,
                               std::span<const double> intervention_times,
                               const IntegratorConfig& cfg, double k) {
    if (pre.tau_start != 0.0)
        throw std::invalid_argument("scenario: pre-crisis segment must start at 0");
    if (!(crisis_start > 0.0))
        throw std::invalid_argument("scenario: crisis_start must be > 0");
    for (const double t : intervention_times)
        if (t < crisis_start)
            throw std::invalid_argument("scenario: intervention times must be >= crisis_start");

    std::vector<double> times(intervention_times.begin(), intervention_times.end());
    std::sort(times.begin(), times.end());

    SweepResult sweep;
    for (const double t_int : times) {
        std::vector<RegimeSegment> schedule;
        schedule.push_back(pre);
        if (t_int > crisis_start)
            schedule.push_back({crisis_start, crisis_gr.first, crisis_gr.second});
        schedule.push_back({t_int, intervention_gr.first, intervention_gr.second});

        ScenarioResult scen = run_schedule(s0, a_tilde, schedule, cfg, k);

        SweepEntry entry;
        entry.intervention_tau = t_int;
        entry.stationary_roa = scen.stationary_roa.value_or(
            scen.path.samples.back().roa);
        entry.crisis_duration = negative_roa_duration(scen);
        const TrajectorySample& last = scen.path.samples.back();
        double lnA = std::log(last.assets);
        if (scen.stationary_roa && last.tau < cfg.max_tau)
            lnA += *scen.stationary_roa * (cfg.max_tau - last.tau);
        entry.ln_assets_at_horizon = lnA;

        sweep.summary.push_back(entry);
        sweep.scenarios.push_back(std::move(scen));
    }
    return sweep;
}

}  // namespace alt
