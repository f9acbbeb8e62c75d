// alt: command-line front end for the assets/leverage/trust dynamics engine.
//
// Subcommands: simulate, phase, stability, closed-form, scenario, calibrate,
// synth. Every run writes its artifacts plus a <command>_meta.ini sidecar with
// the fully resolved configuration; feeding that file back through --config
// reproduces the outputs byte for byte.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "alt/calibration.hpp"
#include "alt/closed_form.hpp"
#include "alt/emit.hpp"
#include "alt/errors.hpp"
#include "alt/phase_portrait.hpp"
#include "alt/scenario.hpp"
#include "alt/stability.hpp"
#include "alt/timeseries.hpp"
#include "alt/trajectory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDomain = 3;
constexpr int kExitNumerical = 4;

struct CommonModel {
    double a = 0.05;
    double g = 0.06;
    double r = 0.04;
    double k = 0.05;
    std::string preset;

    alt::Params params() const {
        if (!preset.empty()) {
            const auto p = alt::preset_by_name(preset);
            if (!p) throw CLI::ValidationError("--preset", "unknown preset '" + preset + "'");
            return *p;
        }
        return {a, g, r, k};
    }
};

void add_model_flags(CLI::App* cmd, CommonModel& m) {
    cmd->add_option("--a", m.a, "debt adjustment rate a");
    cmd->add_option("--g", m.g, "EBITA/assets ratio g");
    cmd->add_option("--r", m.r, "interest rate on debt r");
    cmd->add_option("--k", m.k, "trust adjustment rate k");
    cmd->add_option("--preset", m.preset, "regime preset: regular | crisis | stagnation")
        ->check(CLI::IsMember({"regular", "crisis", "stagnation"}));
}

struct IntegratorFlags {
    std::string method = "adaptive-rk";
    double step = 1e-3;
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_tau = 1e4;
    double convergence_eps = 1e-6;
    double guard_eps = 1e-6;

    alt::IntegratorConfig config() const {
        alt::IntegratorConfig cfg;
        cfg.method = method == "euler" ? alt::StepMethod::Euler : alt::StepMethod::AdaptiveRK;
        cfg.step = step;
        cfg.rel_tol = rel_tol;
        cfg.abs_tol = abs_tol;
        cfg.max_tau = max_tau;
        cfg.convergence_eps = convergence_eps;
        cfg.guard_eps = guard_eps;
        return cfg;
    }
};

void add_integrator_flags(CLI::App* cmd, IntegratorFlags& f) {
    cmd->add_option("--method", f.method, "integration method")
        ->check(CLI::IsMember({"euler", "adaptive-rk"}));
    cmd->add_option("--step", f.step, "Euler step size");
    cmd->add_option("--rel-tol", f.rel_tol, "adaptive relative tolerance");
    cmd->add_option("--abs-tol", f.abs_tol, "adaptive absolute tolerance");
    cmd->add_option("--max-tau", f.max_tau, "integration horizon");
    cmd->add_option("--convergence-eps", f.convergence_eps, "terminal event threshold");
    cmd->add_option("--guard-eps", f.guard_eps, "singularity guard distance");
}

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::invalid_argument("io_cli: cannot create output directory " + dir.string());
    return dir;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("io_cli: cannot write " + path.string());
    out << contents;
}

// Resolved-configuration sidecar; feed it back with
// `alt --config <file> <subcommand>` to reproduce a run byte for byte.
void write_meta(CLI::App* cmd, const fs::path& dir, const std::string& name) {
    write_file(dir / (name + "_meta.ini"),
               "[" + cmd->get_name() + "]\n" + cmd->config_to_str(true, false));
}

// ----- simulate ------------------------------------------------------------

struct SimulateOpts {
    CommonModel model;
    IntegratorFlags integ;
    double A0 = 1.0, L0 = 0.2, T0 = 0.4;
    bool dimensional = false;
    double dt = 0.1;
    std::size_t steps = 168;
    std::string out = "out";
};

int run_simulate(const SimulateOpts& o, CLI::App* cmd) {
    const alt::Params p = o.model.params();
    const alt::EconState s0{o.A0, o.L0, o.T0};
    const alt::TrajectoryRecord rec =
        o.dimensional ? alt::integrate_dimensional(s0, p, o.dt, o.steps)
                      : alt::integrate(s0, p, o.integ.config());

    const fs::path dir = ensure_out_dir(o.out);
    std::ostringstream csv;
    alt::write_trajectory_csv(csv, rec);
    write_file(dir / "trajectory.csv", csv.str());

    json sidecar = alt::terminal_json(rec.terminal);
    sidecar["samples"] = rec.samples.size();
    sidecar["tau_end"] = rec.samples.back().tau;
    write_file(dir / "trajectory_terminal.json", sidecar.dump(2) + "\n");
    write_meta(cmd, dir, "simulate");
    std::cout << "terminal: " << alt::to_string(rec.terminal.kind) << " after "
              << rec.samples.size() << " samples\n";
    return kExitOk;
}

// ----- phase ----------------------------------------------------------------

struct PhaseOpts {
    CommonModel model;
    IntegratorFlags integ;
    std::size_t n_leverage = 101, n_trust = 101;
    double margin = 1e-3;
    unsigned threads = 0;
    std::string out = "out";
};

int run_phase(const PhaseOpts& o, CLI::App* cmd) {
    const alt::Params p = o.model.params();
    const alt::GridSpec grid{o.n_leverage, o.n_trust, o.margin};
    const fs::path dir = ensure_out_dir(o.out);

    const alt::RoaField field = alt::roa_field(p, grid);
    std::ostringstream roa_csv;
    alt::write_roa_field_csv(roa_csv, field);
    write_file(dir / "roa_field.csv", roa_csv.str());

    const alt::BasinMap map = alt::basin_map(p, grid, o.integ.config(), o.threads);
    std::ostringstream basin_csv;
    alt::write_basin_csv(basin_csv, map);
    write_file(dir / "basin_map.csv", basin_csv.str());

    write_meta(cmd, dir, "phase");
    std::cout << "phase portrait written to " << dir.string() << "\n";
    return kExitOk;
}

// ----- stability ------------------------------------------------------------

struct StabilityOpts {
    CommonModel model;
    std::vector<double> diagonal;
    double eps0 = 5e-3;
    std::string out;
};

int run_stability(const StabilityOpts& o, CLI::App* cmd) {
    const alt::Params p = o.model.params();
    const auto reports = alt::fixed_points(p, o.diagonal);
    json j = alt::stability_report_json(p, reports);

    const alt::DecayReport decay = alt::verify_point_one_L0(p, o.eps0);
    j["point_one_L0_check"] = {{"applicable", decay.applicable},
                               {"expected_rate", decay.expected_rate},
                               {"fitted_rate", decay.fitted_rate},
                               {"confirmed", decay.confirmed},
                               {"stationary_roa", decay.stationary_roa},
                               {"note", decay.note}};

    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!o.out.empty()) {
        const fs::path dir = ensure_out_dir(o.out);
        write_file(dir / "stability.json", text);
        write_meta(cmd, dir, "stability");
    }
    return kExitOk;
}

// ----- closed-form ----------------------------------------------------------

struct ClosedFormOpts {
    CommonModel model;
    double T0 = 0.4, L0 = 0.2;
    double t_min = 0.05, t_max = 0.95;
    std::size_t n = 181;
    std::string form = "primary";
    bool check = true;
    std::string out = "out";
};

int run_closed_form(const ClosedFormOpts& o, CLI::App* cmd) {
    const alt::Params p = o.model.params();
    const alt::ClosedForm form = o.form == "by-parts" ? alt::ClosedForm::IntegratedByParts
                                                      : alt::ClosedForm::Primary;
    const alt::ClosedFormTrajectory traj = alt::fit_through(o.T0, o.L0, p, form);

    if (o.n < 2 || !(o.t_min < o.t_max))
        throw std::invalid_argument("io_cli: need n >= 2 and t_min < t_max");
    std::vector<double> ts(o.n), ls(o.n);
    for (std::size_t i = 0; i < o.n; ++i) {
        ts[i] = o.t_min + (o.t_max - o.t_min) * static_cast<double>(i) /
                              static_cast<double>(o.n - 1);
        ls[i] = alt::leverage_of_trust(ts[i], traj);
    }

    const fs::path dir = ensure_out_dir(o.out);
    std::ostringstream csv;
    alt::write_curve_csv(csv, ts, ls);
    write_file(dir / "closed_form_curve.csv", csv.str());

    json j;
    j["K"] = traj.K;
    j["form"] = o.form;
    if (o.check) {
        // cross-check against the ODE integrator launched from the same seed
        const alt::TrajectoryRecord rec = alt::integrate({1.0, o.L0, o.T0}, p, {});
        double worst = 0.0;
        std::size_t compared = 0;
        for (const auto& s : rec.samples) {
            if (s.trust < std::max(o.t_min, o.T0 + 1e-6) || s.trust > o.t_max) continue;
            worst = std::max(worst,
                             std::fabs(alt::leverage_of_trust(s.trust, traj) - s.leverage));
            ++compared;
        }
        j["ode_check"] = {{"max_abs_residual", worst}, {"points", compared}};
        std::cout << "closed-form vs ODE max residual: " << alt::fmt17(worst) << " over "
                  << compared << " points\n";
    }
    write_file(dir / "closed_form.json", j.dump(2) + "\n");
    write_meta(cmd, dir, "closed-form");
    return kExitOk;
}

// ----- scenario ---------------------------------------------------------------

struct ScenarioOpts {
    double a = 0.05;
    double k = 0.05;
    double A0 = 1.0, L0 = 0.0, T0 = 0.26;
    std::string schedule = "0:0.06:0.04;5:-0.08:0.04;12:0.04:0.01";
    bool sweep = false;
    double crisis_start = 5.0;
    std::vector<double> sweep_times = {7.0, 12.0, 20.0};
    std::vector<double> pre = {0.06, 0.04};
    std::vector<double> crisis = {-0.08, 0.04};
    std::vector<double> post = {0.04, 0.01};
    IntegratorFlags integ;
    std::string out = "out";
};

std::vector<alt::RegimeSegment> parse_schedule(const std::string& text) {
    std::vector<alt::RegimeSegment> schedule;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ';')) {
        if (part.empty()) continue;
        alt::RegimeSegment seg{};
        char c1 = 0, c2 = 0;
        std::istringstream ps(part);
        if (!(ps >> seg.tau_start >> c1 >> seg.g_tilde >> c2 >> seg.r_tilde) || c1 != ':' ||
            c2 != ':')
            throw std::invalid_argument("io_cli: bad schedule segment '" + part +
                                        "' (want tau:g:r)");
        schedule.push_back(seg);
    }
    return schedule;
}

int run_scenario(const ScenarioOpts& o, CLI::App* cmd) {
    const fs::path dir = ensure_out_dir(o.out);
    const alt::EconState s0{o.A0, o.L0, o.T0};
    json meta;
    meta["a_tilde"] = o.a;
    meta["note"] = "a_tilde is a module default, not a published value";

    if (o.sweep) {
        if (o.pre.size() != 2 || o.crisis.size() != 2 || o.post.size() != 2)
            throw std::invalid_argument("io_cli: --pre/--crisis/--post take two values: g r");
        const alt::RegimeSegment pre{0.0, o.pre[0], o.pre[1]};
        const alt::SweepResult sweep = alt::intervention_sweep(
            s0, o.a, pre, {o.crisis[0], o.crisis[1]}, {o.post[0], o.post[1]}, o.crisis_start,
            o.sweep_times, o.integ.config(), o.k);
        std::ostringstream summary;
        alt::write_sweep_summary_csv(summary, sweep.summary);
        write_file(dir / "sweep_summary.csv", summary.str());
        for (std::size_t i = 0; i < sweep.scenarios.size(); ++i) {
            std::ostringstream csv;
            alt::write_scenario_csv(csv, sweep.scenarios[i]);
            write_file(dir / ("scenario_" + std::to_string(i) + ".csv"), csv.str());
        }
        meta["scenarios"] = sweep.scenarios.size();
        write_file(dir / "scenario.json", meta.dump(2) + "\n");
        write_meta(cmd, dir, "scenario");
        std::cout << "sweep summary written to " << (dir / "sweep_summary.csv").string()
                  << "\n";
        return kExitOk;
    }

    const auto schedule = parse_schedule(o.schedule);
    const alt::ScenarioResult result = alt::run_schedule(s0, o.a, schedule, o.integ.config(), o.k);
    std::ostringstream csv;
    alt::write_scenario_csv(csv, result);
    write_file(dir / "scenario_path.csv", csv.str());

    std::ostringstream diag;
    diag << "tau,rA,rA_times_tau,ln_assets_ratio\n";
    for (const auto& d : result.diagnostics)
        diag << alt::fmt17(d.tau) << ',' << alt::fmt17(d.roa) << ','
             << alt::fmt17(d.roa_times_tau) << ',' << alt::fmt17(d.ln_assets_ratio) << '\n';
    write_file(dir / "scenario_diagnostics.csv", diag.str());

    meta["terminal"] = alt::terminal_json(result.path.terminal);
    if (result.stationary_roa) meta["stationary_roa"] = *result.stationary_roa;
    write_file(dir / "scenario.json", meta.dump(2) + "\n");
    write_meta(cmd, dir, "scenario");
    std::cout << "scenario path written to " << (dir / "scenario_path.csv").string() << "\n";
    return kExitOk;
}

// ----- calibrate --------------------------------------------------------------

struct CalibrateOpts {
    std::string input;
    std::uint64_t seed = 0;
    std::size_t iterations = 200;
    std::size_t burn_in = 100;
    std::size_t chains = 1;
    std::string out = "out";
};

int run_calibrate(const CalibrateOpts& o, CLI::App* cmd) {
    const alt::ObservationSeries obs = alt::load_timeseries(o.input);
    alt::GibbsConfig cfg;
    cfg.iterations = o.iterations;
    cfg.burn_in = o.burn_in;
    if (o.chains == 0) throw std::invalid_argument("io_cli: --chains must be >= 1");

    std::vector<alt::PosteriorDraws> chains;
    chains.reserve(o.chains);
    for (std::size_t c = 0; c < o.chains; ++c)
        chains.push_back(alt::gibbs_run(obs, cfg, o.seed + c));
    const alt::PosteriorDraws& draws = chains.front();
    const alt::PosteriorSummary summary = alt::posterior_summary(draws, obs);

    const fs::path dir = ensure_out_dir(o.out);
    std::ostringstream draws_csv;
    alt::write_draws_csv(draws_csv, draws);
    write_file(dir / "draws.csv", draws_csv.str());
    for (std::size_t c = 1; c < chains.size(); ++c) {
        std::ostringstream extra;
        alt::write_draws_csv(extra, chains[c]);
        write_file(dir / ("draws_chain" + std::to_string(c) + ".csv"), extra.str());
    }
    std::ostringstream summary_csv;
    alt::write_posterior_summary_csv(summary_csv, summary);
    write_file(dir / "summary.csv", summary_csv.str());

    json j;
    j["seed"] = draws.seed;
    j["iterations"] = o.iterations;
    j["burn_in"] = draws.burn_in;
    j["retained"] = draws.draws.size();
    j["chains"] = o.chains;
    j["acceptance"] = {{"c1", draws.acceptance.c1},       {"c2", draws.acceptance.c2},
                       {"lambda", draws.acceptance.lambda}, {"mu", draws.acceptance.mu},
                       {"L1", draws.acceptance.L1},       {"T1", draws.acceptance.T1},
                       {"state_flips", draws.acceptance.state_flips}};
    if (chains.size() > 1) {
        json psrf;
        for (const auto& [name, r] : alt::multi_chain_psrf(chains)) psrf[name] = r;
        j["psrf"] = psrf;
    }
    write_file(dir / "calibrate.json", j.dump(2) + "\n");
    write_meta(cmd, dir, "calibrate");
    std::cout << "posterior draws: " << draws.draws.size() << ", summary written to "
              << (dir / "summary.csv").string() << "\n";
    return kExitOk;
}

// ----- synth -------------------------------------------------------------------

struct SynthOpts {
    std::uint64_t seed = 0;
    std::size_t n = 168;
    double c1 = 0.10, c2 = -0.16;
    double sigma_eps = 0.05;
    double lambda = 0.5, mu = 0.5;
    double L1 = 0.25, T1 = 0.35;
    double rate = 0.02;
    std::string start = "2000-01";
    std::string out = "out";
};

int run_synth(const SynthOpts& o, CLI::App* cmd) {
    alt::MsmParams p{};
    p.c1 = o.c1;
    p.c2 = o.c2;
    p.sigma_eps2 = o.sigma_eps * o.sigma_eps;
    p.lambda_rate = o.lambda;
    p.mu_rate = o.mu;
    p.L1 = o.L1;
    p.T1 = o.T1;

    alt::MonthStamp start{2000, 1, 1};
    if (o.start.size() != 7 || o.start[4] != '-' ||
        std::sscanf(o.start.c_str(), "%d-%d", &start.year, &start.month) != 2 ||
        start.month < 1 || start.month > 12)
        throw std::invalid_argument("io_cli: --start must be YYYY-MM");

    const std::vector<double> rates(o.n, o.rate);
    const alt::SyntheticData data = alt::generate_synthetic(p, o.n, o.seed, rates, start);

    const fs::path dir = ensure_out_dir(o.out);
    std::ostringstream csv;
    alt::write_timeseries(csv, data.series);
    write_file(dir / "series.csv", csv.str());

    json truth;
    truth["seed"] = o.seed;
    truth["params"] = {{"c1", p.c1},       {"c2", p.c2}, {"sigma_eps2", p.sigma_eps2},
                       {"lambda", p.lambda_rate}, {"mu", p.mu_rate}, {"L1", p.L1},
                       {"T1", p.T1},       {"a", p.a},   {"k", p.k},
                       {"dt", p.dt}};
    truth["states_rle"] = alt::encode_states_rle(data.states);
    write_file(dir / "truth.json", truth.dump(2) + "\n");
    write_meta(cmd, dir, "synth");
    std::cout << "synthetic series of length " << o.n << " written to "
              << (dir / "series.csv").string() << "\n";
    return kExitOk;
}

json error_json(int code, const char* kind, const std::string& message) {
    return json{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"assets/leverage/trust dynamics engine"};
    app.set_config("--config", "", "INI sidecar with a [subcommand] section; flags override");
    app.require_subcommand(1);

    SimulateOpts sim;
    CLI::App* c_sim = app.add_subcommand("simulate", "integrate one trajectory");
    c_sim->option_defaults()->always_capture_default(true);
    add_model_flags(c_sim, sim.model);
    add_integrator_flags(c_sim, sim.integ);
    c_sim->add_option("--A0", sim.A0, "initial assets");
    c_sim->add_option("--L0", sim.L0, "initial leverage");
    c_sim->add_option("--T0", sim.T0, "initial trust");
    c_sim->add_flag("--dimensional", sim.dimensional,
                    "use the discrete-time scheme with explicit k and dt");
    c_sim->add_option("--dt", sim.dt, "time step for --dimensional");
    c_sim->add_option("--steps", sim.steps, "step count for --dimensional");
    c_sim->add_option("--out", sim.out, "output directory");

    PhaseOpts phase;
    CLI::App* c_phase = app.add_subcommand("phase", "ROA field and basin map");
    c_phase->option_defaults()->always_capture_default(true);
    add_model_flags(c_phase, phase.model);
    add_integrator_flags(c_phase, phase.integ);
    c_phase->add_option("--nL", phase.n_leverage, "leverage grid resolution");
    c_phase->add_option("--nT", phase.n_trust, "trust grid resolution");
    c_phase->add_option("--margin", phase.margin, "exclusion band near T=1 and L=1");
    c_phase->add_option("--threads", phase.threads, "worker threads (0 = hardware)");
    c_phase->add_option("--out", phase.out, "output directory");

    StabilityOpts stab;
    CLI::App* c_stab = app.add_subcommand("stability", "fixed points and classifications");
    c_stab->option_defaults()->always_capture_default(true);
    add_model_flags(c_stab, stab.model);
    c_stab->add_option("--diag", stab.diagonal, "diagonal leverage sample points");
    c_stab->add_option("--eps0", stab.eps0, "perturbation size for the (1, L0) check");
    c_stab->add_option("--out", stab.out, "optional output directory");

    ClosedFormOpts cf;
    CLI::App* c_cf = app.add_subcommand("closed-form", "analytical L(T) curve sampling");
    c_cf->option_defaults()->always_capture_default(true);
    add_model_flags(c_cf, cf.model);
    c_cf->add_option("--T0", cf.T0, "trust of the fitted point");
    c_cf->add_option("--L0", cf.L0, "leverage of the fitted point");
    c_cf->add_option("--t-min", cf.t_min, "curve sampling start");
    c_cf->add_option("--t-max", cf.t_max, "curve sampling end");
    c_cf->add_option("--n", cf.n, "number of curve samples");
    c_cf->add_option("--form", cf.form, "primary | by-parts")
        ->check(CLI::IsMember({"primary", "by-parts"}));
    c_cf->add_flag("--check,!--no-check", cf.check,
                   "cross-check the curve against the ODE integrator (default on)");
    c_cf->add_option("--out", cf.out, "output directory");

    ScenarioOpts scen;
    CLI::App* c_scen = app.add_subcommand("scenario", "regime-shift schedules and sweeps");
    c_scen->option_defaults()->always_capture_default(true);
    c_scen->add_option("--a", scen.a, "debt adjustment rate (fixed across segments)");
    c_scen->add_option("--k", scen.k, "trust adjustment rate");
    c_scen->add_option("--A0", scen.A0, "initial assets");
    c_scen->add_option("--L0", scen.L0, "initial leverage");
    c_scen->add_option("--T0", scen.T0, "initial trust");
    c_scen->add_option("--schedule", scen.schedule, "segments as tau:g:r;tau:g:r;...");
    c_scen->add_flag("--sweep", scen.sweep, "run the intervention-timing sweep");
    c_scen->add_option("--crisis-start", scen.crisis_start, "crisis onset tau (sweep)");
    c_scen->add_option("--times", scen.sweep_times, "intervention times (sweep)");
    c_scen->add_option("--pre", scen.pre, "pre-crisis g r (sweep)")->expected(2);
    c_scen->add_option("--crisis", scen.crisis, "crisis g r (sweep)")->expected(2);
    c_scen->add_option("--post", scen.post, "intervention g r (sweep)")->expected(2);
    add_integrator_flags(c_scen, scen.integ);
    c_scen->add_option("--out", scen.out, "output directory");

    CalibrateOpts cal;
    CLI::App* c_cal = app.add_subcommand("calibrate", "Bayesian calibration to a ROE series");
    c_cal->option_defaults()->always_capture_default(true);
    c_cal->add_option("--input", cal.input, "CSV file: date,roe,rate")->required();
    c_cal->add_option("--seed", cal.seed, "RNG seed")->required();
    c_cal->add_option("--iters", cal.iterations, "total Gibbs iterations");
    c_cal->add_option("--burn-in", cal.burn_in, "discarded iterations");
    c_cal->add_option("--chains", cal.chains,
                      "independent chains seeded seed, seed+1, ... (PSRF when > 1)");
    c_cal->add_option("--out", cal.out, "output directory");

    SynthOpts synth;
    CLI::App* c_synth = app.add_subcommand("synth", "generate a synthetic ROE series");
    c_synth->option_defaults()->always_capture_default(true);
    c_synth->add_option("--seed", synth.seed, "RNG seed")->required();
    c_synth->add_option("--n", synth.n, "series length in months");
    c_synth->add_option("--c1", synth.c1, "EBITA/assets level in state 1");
    c_synth->add_option("--c2", synth.c2, "EBITA/assets level in state 2");
    c_synth->add_option("--sigma-eps", synth.sigma_eps, "observation noise std dev");
    c_synth->add_option("--lambda", synth.lambda, "transition rate s1 -> s2");
    c_synth->add_option("--mu", synth.mu, "transition rate s2 -> s1");
    c_synth->add_option("--L1", synth.L1, "initial leverage");
    c_synth->add_option("--T1", synth.T1, "initial trust");
    c_synth->add_option("--rate", synth.rate, "constant interest rate series value");
    c_synth->add_option("--start", synth.start, "first month, YYYY-MM");
    c_synth->add_option("--out", synth.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << error_json(kExitConfig, "config", e.what()).dump() << "\n";
        return kExitConfig;
    }

    try {
        if (c_sim->parsed()) return run_simulate(sim, c_sim);
        if (c_phase->parsed()) return run_phase(phase, c_phase);
        if (c_stab->parsed()) return run_stability(stab, c_stab);
        if (c_cf->parsed()) return run_closed_form(cf, c_cf);
        if (c_scen->parsed()) return run_scenario(scen, c_scen);
        if (c_cal->parsed()) return run_calibrate(cal, c_cal);
        if (c_synth->parsed()) return run_synth(synth, c_synth);
    } catch (const std::domain_error& e) {
        std::cerr << error_json(kExitDomain, "domain", e.what()).dump() << "\n";
        return kExitDomain;
    } catch (const alt::numerical_error& e) {
        std::cerr << error_json(kExitNumerical, "numerical", e.what()).dump() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << error_json(kExitConfig, "config", e.what()).dump() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << error_json(kExitNumerical, "internal", e.what()).dump() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}
