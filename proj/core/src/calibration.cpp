#include "alt/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "alt/errors.hpp"

namespace alt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::domain_error("calibration: " + msg);
}

int month_index(const MonthStamp& m) { return m.year * 12 + (m.month - 1); }

double residual(const MsmParams& p, const StatePath& path, const ObservationSeries& obs,
                std::size_t t) {
    const double g = path.states[t] == Regime::S1 ? p.c1 : p.c2;
    return obs.roe[t] - observation_mean(g, obs.rate[t], path.leverage[t]);
}

double sum_squared_residuals(const MsmParams& p, const StatePath& path,
                             const ObservationSeries& obs) {
    double ssr = 0.0;
    for (std::size_t t = 0; t < obs.size(); ++t) {
        const double r = residual(p, path, obs, t);
        ssr += r * r;
    }
    return ssr;
}

Quantiles quantiles_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    Quantiles q{};
    for (int i = 0; i < 9; ++i) {
        const double p = 0.1 * (i + 1);
        const double h = p * static_cast<double>(n - 1);
        const std::size_t lo = static_cast<std::size_t>(h);
        const double frac = h - static_cast<double>(lo);
        q[i] = lo + 1 < n ? values[lo] + frac * (values[lo + 1] - values[lo]) : values[lo];
    }
    return q;
}

struct BlockScales {
    double c1, c2, lambda, mu, L1, T1;
};

// Window-based scale adaptation toward a 20-40% acceptance band; only active
// during burn-in, frozen afterwards.
struct Adapter {
    std::size_t window = 50;
    std::size_t attempts = 0;
    std::size_t accepted = 0;
    void record(bool acc) {
        ++attempts;
        if (acc) ++accepted;
    }
    void maybe_adjust(double& scale, double lo_cap, double hi_cap) {
        if (attempts < window) return;
        const double rate = static_cast<double>(accepted) / static_cast<double>(attempts);
        if (rate < 0.20) scale *= 0.7;
        else if (rate > 0.40) scale *= 1.4;
        scale = std::clamp(scale, lo_cap, hi_cap);
        attempts = accepted = 0;
    }
};

struct Counter {
    std::size_t attempts = 0;
    std::size_t accepted = 0;
    void record(bool acc) {
        ++attempts;
        if (acc) ++accepted;
    }
    double rate() const {
        return attempts == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(attempts);
    }
};

}  // namespace

void validate(const ObservationSeries& obs) {
    require(!obs.roe.empty(), "observation series must be nonempty");
    require(obs.dates.size() == obs.roe.size() && obs.rate.size() == obs.roe.size(),
            "observation columns must have equal lengths");
    for (std::size_t i = 0; i < obs.size(); ++i) {
        require(std::isfinite(obs.roe[i]) && std::isfinite(obs.rate[i]),
                "observations must be finite");
        if (i > 0)
            require(month_index(obs.dates[i]) == month_index(obs.dates[i - 1]) + 1,
                    "observations must be consecutive months");
    }
}

void validate(const MsmParams& p) {
    require(p.sigma_eps2 > 0.0, "sigma_eps2 must be > 0");
    require(p.c1 >= kCMin && p.c1 <= kCMax, "c1 outside prior support [-0.25, 0.25]");
    require(p.c2 >= kCMin && p.c2 <= kCMax, "c2 outside prior support [-0.25, 0.25]");
    require(p.lambda_rate >= kRateMin && p.lambda_rate <= kRateMax,
            "lambda outside prior support [0, 100]");
    require(p.mu_rate >= kRateMin && p.mu_rate <= kRateMax,
            "mu outside prior support [0, 100]");
    require(p.L1 >= kL1Min && p.L1 <= kL1Max, "L1 outside prior support [0.2, 0.3]");
    require(p.T1 >= kT1Min && p.T1 <= kT1Max, "T1 outside prior support [0.3, 0.4]");
    require(p.a > 0.0 && p.k >= 0.0 && p.dt > 0.0, "need a > 0, k >= 0, dt > 0");
}

double observation_mean(double g, double r, double leverage) {
    return g + leverage / (1.0 - leverage) * (g - r);
}

StatePath forward_paths(const MsmParams& p, std::span<const Regime> states,
                        const ObservationSeries& obs) {
    const std::size_t n = obs.size();
    if (states.size() != n)
        throw std::invalid_argument("calibration: state sequence length mismatch");

    StatePath path;
    path.states.assign(states.begin(), states.end());
    path.leverage.resize(n);
    path.trust.resize(n);
    path.leverage[0] = p.L1;
    path.trust[0] = p.T1;

    auto inside = [](double x) { return x > 0.0 && x < 1.0; };
    path.valid = inside(p.L1) && inside(p.T1);

    for (std::size_t t = 0; t + 1 < n; ++t) {
        double L = path.leverage[t];
        double T = path.trust[t];
        if (path.valid) {
            if (p.k == 0.0) {
                // zero adjustment speed freezes the state
            } else {
                const double g = states[t] == Regime::S1 ? p.c1 : p.c2;
                const Params nd{p.a / p.k, g / p.k, obs.rate[t] / p.k, p.k};
                std::tie(L, T) = discrete_euler_step(L, T, nd, p.dt);
            }
            if (!inside(L) || !inside(T)) path.valid = false;
        }
        path.leverage[t + 1] = L;
        path.trust[t + 1] = T;
    }
    return path;
}

double log_likelihood(const MsmParams& p, const StatePath& path, const ObservationSeries& obs) {
    if (!path.valid) return kNegInf;
    const std::size_t n = obs.size();
    const double ssr = sum_squared_residuals(p, path, obs);
    return -0.5 * static_cast<double>(n) *
               std::log(2.0 * std::numbers::pi * p.sigma_eps2) -
           ssr / (2.0 * p.sigma_eps2);
}

TransitionMatrix transition_matrix(double lambda_rate, double mu_rate, double dt) {
    if (lambda_rate < 0.0 || mu_rate < 0.0)
        throw std::domain_error("calibration: transition rates must be >= 0");
    const double s = lambda_rate + mu_rate;
    if (s == 0.0) return {1.0, 0.0, 0.0, 1.0};
    const double e = 1.0 - std::exp(-s * dt);
    const double p12 = lambda_rate / s * e;
    const double p21 = mu_rate / s * e;
    return {1.0 - p12, p12, p21, 1.0 - p21};
}

namespace detail {

double sample_sigma2_conditional(double ssr, std::size_t n, std::mt19937_64& rng) {
    const double shape = kSigmaPriorShape + 0.5 * static_cast<double>(n);
    const double rate = kSigmaPriorScale + 0.5 * ssr;
    std::gamma_distribution<double> gamma(shape, 1.0 / rate);
    return 1.0 / gamma(rng);
}

double log_state_prior(std::span<const Regime> states, const TransitionMatrix& q) {
    double lp = 0.0;
    for (std::size_t t = 0; t + 1 < states.size(); ++t) {
        const bool from1 = states[t] == Regime::S1;
        const bool to1 = states[t + 1] == Regime::S1;
        const double pr = from1 ? (to1 ? q.p11 : q.p12) : (to1 ? q.p21 : q.p22);
        lp += pr > 0.0 ? std::log(pr) : kNegInf;
    }
    return lp;
}

}  // namespace detail

PosteriorDraws gibbs_run(const ObservationSeries& obs, const GibbsConfig& cfg,
                         std::uint64_t seed) {
    validate(obs);
    if (cfg.iterations == 0 || cfg.burn_in >= cfg.iterations)
        throw std::invalid_argument("calibration: need iterations > burn_in >= 0");
    const std::size_t n = obs.size();
    if (cfg.fixed_states && cfg.fixed_states->size() != n)
        throw std::invalid_argument("calibration: fixed state sequence length mismatch");

    std::mt19937_64 rng(seed);

    MsmParams cur;
    cur.c1 = 0.05;
    cur.c2 = -0.05;
    cur.sigma_eps2 = 0.01;
    cur.lambda_rate = 1.0;
    cur.mu_rate = 1.0;
    cur.L1 = 0.25;
    cur.T1 = 0.35;
    if (cfg.fixed_initials) {
        cur.L1 = cfg.fixed_initials->first;
        cur.T1 = cfg.fixed_initials->second;
        if (cur.L1 < kL1Min || cur.L1 > kL1Max || cur.T1 < kT1Min || cur.T1 > kT1Max)
            throw std::invalid_argument("calibration: fixed initials outside prior support");
    }

    std::vector<Regime> states =
        cfg.fixed_states ? *cfg.fixed_states : std::vector<Regime>(n, Regime::S1);

    StatePath path = forward_paths(cur, states, obs);
    if (!cfg.fixed_initials) {
        std::uniform_real_distribution<double> uL(kL1Min, kL1Max);
        std::uniform_real_distribution<double> uT(kT1Min, kT1Max);
        int retries = 0;
        while (!path.valid && retries++ < 100) {
            cur.L1 = uL(rng);
            cur.T1 = uT(rng);
            path = forward_paths(cur, states, obs);
        }
    }
    if (!path.valid)
        throw numerical_error("calibration: no valid initialization after 100 retries");

    double loglik = log_likelihood(cur, path, obs);

    BlockScales scales{cfg.scale_c, cfg.scale_c, cfg.scale_rate, cfg.scale_rate,
                       cfg.scale_init, cfg.scale_init};
    Adapter ad_c1, ad_c2, ad_lambda, ad_mu, ad_L1, ad_T1;
    Counter ct_c1, ct_c2, ct_lambda, ct_mu, ct_L1, ct_T1, ct_flip;

    PosteriorDraws out;
    out.burn_in = cfg.burn_in;
    out.seed = seed;
    out.draws.reserve(cfg.iterations - cfg.burn_in);

    for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
        const bool burning = iter < cfg.burn_in;

        // (a) conjugate inverse-gamma draw for the observation noise
        cur.sigma_eps2 = detail::sample_sigma2_conditional(
            sum_squared_residuals(cur, path, obs), n, rng);
        loglik = log_likelihood(cur, path, obs);

        // (b) EBITA/assets levels c1, c2
        auto update_c = [&](double MsmParams::* field, double& scale, Adapter& ad, Counter& ct) {
            auto logpost = [&](double v) {
                MsmParams trial = cur;
                trial.*field = v;
                return log_likelihood(trial, forward_paths(trial, states, obs), obs);
            };
            const auto res = detail::metropolis_scalar(cur.*field, scale, kCMin, kCMax,
                                                       loglik, logpost, rng);
            if (res.accepted) {
                cur.*field = res.value;
                path = forward_paths(cur, states, obs);
            }
            loglik = res.logpost;
            if (burning && cfg.adapt_during_burn_in) {
                ad.record(res.accepted);
                ad.maybe_adjust(scale, 1e-8, kCMax - kCMin);
            } else {
                ct.record(res.accepted);
            }
        };
        update_c(&MsmParams::c1, scales.c1, ad_c1, ct_c1);
        update_c(&MsmParams::c2, scales.c2, ad_c2, ct_c2);

        // (c) transition rates; the observation likelihood does not involve
        // them, only the chain prior over the current state sequence does.
        auto update_rate = [&](double MsmParams::* field, double& scale, Adapter& ad,
                               Counter& ct) {
            auto logprior = [&](double v) {
                MsmParams trial = cur;
                trial.*field = v;
                return detail::log_state_prior(
                    states, transition_matrix(trial.lambda_rate, trial.mu_rate, trial.dt));
            };
            const double lp_now = detail::log_state_prior(
                states, transition_matrix(cur.lambda_rate, cur.mu_rate, cur.dt));
            const auto res = detail::metropolis_scalar(cur.*field, scale, kRateMin, kRateMax,
                                                       lp_now, logprior, rng);
            if (res.accepted) cur.*field = res.value;
            if (burning && cfg.adapt_during_burn_in) {
                ad.record(res.accepted);
                ad.maybe_adjust(scale, 1e-6, kRateMax);
            } else {
                ct.record(res.accepted);
            }
        };
        update_rate(&MsmParams::lambda_rate, scales.lambda, ad_lambda, ct_lambda);
        update_rate(&MsmParams::mu_rate, scales.mu, ad_mu, ct_mu);

        // (d) initial conditions L1, T1
        auto update_init = [&](double MsmParams::* field, double lo, double hi, double& scale,
                               Adapter& ad, Counter& ct) {
            auto logpost = [&](double v) {
                MsmParams trial = cur;
                trial.*field = v;
                return log_likelihood(trial, forward_paths(trial, states, obs), obs);
            };
            const auto res =
                detail::metropolis_scalar(cur.*field, scale, lo, hi, loglik, logpost, rng);
            if (res.accepted) {
                cur.*field = res.value;
                path = forward_paths(cur, states, obs);
            }
            loglik = res.logpost;
            if (burning && cfg.adapt_during_burn_in) {
                ad.record(res.accepted);
                ad.maybe_adjust(scale, 1e-9, hi - lo);
            } else {
                ct.record(res.accepted);
            }
        };
        if (!cfg.fixed_initials) {
            update_init(&MsmParams::L1, kL1Min, kL1Max, scales.L1, ad_L1, ct_L1);
            update_init(&MsmParams::T1, kT1Min, kT1Max, scales.T1, ad_T1, ct_T1);
        }

        // (e) single-site state flips with the path recomputed downstream of
        // the flipped index
        if (!cfg.fixed_states) {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            const TransitionMatrix q =
                transition_matrix(cur.lambda_rate, cur.mu_rate, cur.dt);
            double prior_now = detail::log_state_prior(states, q);
            for (std::size_t t = 0; t < n; ++t) {
                const double u = unif(rng);
                std::vector<Regime> trial = states;
                trial[t] = trial[t] == Regime::S1 ? Regime::S2 : Regime::S1;
                const StatePath trial_path = forward_paths(cur, trial, obs);
                const double trial_ll = log_likelihood(cur, trial_path, obs);
                const double trial_prior = detail::log_state_prior(trial, q);
                const bool accept =
                    std::log(u) < (trial_ll - loglik) + (trial_prior - prior_now);
                if (accept) {
                    states = std::move(trial);
                    path = trial_path;
                    loglik = trial_ll;
                    prior_now = trial_prior;
                }
                if (!burning) ct_flip.record(accept);
            }
        }

        if (!burning) out.draws.push_back({cur, path});
    }

    out.acceptance = {ct_c1.rate(), ct_c2.rate(), ct_lambda.rate(), ct_mu.rate(),
                      ct_L1.rate(), ct_T1.rate(), ct_flip.rate()};
    return out;
}

SyntheticData generate_synthetic(const MsmParams& p, std::size_t n, std::uint64_t seed,
                                 std::span<const double> rates, MonthStamp start) {
    validate(p);
    if (n == 0) throw std::invalid_argument("calibration: synthetic length must be > 0");
    if (rates.size() < n)
        throw std::invalid_argument("calibration: need an interest rate per observation");

    ObservationSeries obs;
    obs.dates.resize(n);
    obs.rate.assign(rates.begin(), rates.begin() + static_cast<std::ptrdiff_t>(n));
    obs.roe.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int idx = month_index(start) + static_cast<int>(i);
        obs.dates[i] = {idx / 12, idx % 12 + 1, start.day};
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const TransitionMatrix q = transition_matrix(p.lambda_rate, p.mu_rate, p.dt);
    const double sigma = std::sqrt(p.sigma_eps2);

    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<Regime> states(n, Regime::S1);
        for (std::size_t t = 1; t < n; ++t) {
            const double u = unif(rng);
            const double p_switch = states[t - 1] == Regime::S1 ? q.p12 : q.p21;
            states[t] = u < p_switch
                            ? (states[t - 1] == Regime::S1 ? Regime::S2 : Regime::S1)
                            : states[t - 1];
        }
        const StatePath path = forward_paths(p, states, obs);
        if (!path.valid) continue;
        for (std::size_t t = 0; t < n; ++t) {
            const double g = states[t] == Regime::S1 ? p.c1 : p.c2;
            obs.roe[t] = observation_mean(g, obs.rate[t], path.leverage[t]) + sigma * gauss(rng);
        }
        return {obs, std::move(states), p};
    }
    throw numerical_error("calibration: synthetic path generation kept leaving (0, 1)");
}

PosteriorSummary posterior_summary(const PosteriorDraws& draws, const ObservationSeries& obs) {
    if (draws.draws.empty())
        throw std::invalid_argument("calibration: empty retained sample");
    const std::size_t n = obs.size();
    const std::size_t m = draws.draws.size();

    PosteriorSummary summary;
    summary.n_draws = m;

    SeriesSummary g_series{"g", {}}, roe_series{"roe_mean", {}}, lev_series{"leverage", {}},
        trust_series{"trust", {}};
    g_series.per_step.reserve(n);
    roe_series.per_step.reserve(n);
    lev_series.per_step.reserve(n);
    trust_series.per_step.reserve(n);
    summary.p_state2.resize(n, 0.0);

    std::vector<double> g_vals(m), roe_vals(m), lev_vals(m), trust_vals(m);
    for (std::size_t t = 0; t < n; ++t) {
        std::size_t count_s2 = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const Draw& d = draws.draws[j];
            const double g = d.path.states[t] == Regime::S1 ? d.params.c1 : d.params.c2;
            g_vals[j] = g;
            lev_vals[j] = d.path.leverage[t];
            trust_vals[j] = d.path.trust[t];
            roe_vals[j] = observation_mean(g, obs.rate[t], d.path.leverage[t]);
            if (d.path.states[t] == Regime::S2) ++count_s2;
        }
        g_series.per_step.push_back(quantiles_of(g_vals));
        roe_series.per_step.push_back(quantiles_of(roe_vals));
        lev_series.per_step.push_back(quantiles_of(lev_vals));
        trust_series.per_step.push_back(quantiles_of(trust_vals));
        summary.p_state2[t] = static_cast<double>(count_s2) / static_cast<double>(m);
    }
    summary.series = {std::move(g_series), std::move(roe_series), std::move(lev_series),
                      std::move(trust_series)};

    auto scalar = [&](auto getter) {
        std::vector<double> v(m);
        for (std::size_t j = 0; j < m; ++j) v[j] = getter(draws.draws[j].params);
        return quantiles_of(std::move(v));
    };
    summary.params["c1"] = scalar([](const MsmParams& p) { return p.c1; });
    summary.params["c2"] = scalar([](const MsmParams& p) { return p.c2; });
    summary.params["sigma_eps2"] = scalar([](const MsmParams& p) { return p.sigma_eps2; });
    summary.params["lambda"] = scalar([](const MsmParams& p) { return p.lambda_rate; });
    summary.params["mu"] = scalar([](const MsmParams& p) { return p.mu_rate; });
    summary.params["L1"] = scalar([](const MsmParams& p) { return p.L1; });
    summary.params["T1"] = scalar([](const MsmParams& p) { return p.T1; });
    return summary;
}

std::map<std::string, double> multi_chain_psrf(std::span<const PosteriorDraws> chains) {
    if (chains.size() < 2)
        throw std::invalid_argument("calibration: PSRF needs at least two chains");
    const std::size_t n = chains.front().draws.size();
    for (const auto& c : chains)
        if (c.draws.size() != n || n < 2)
            throw std::invalid_argument("calibration: chains must share a length >= 2");

    const std::pair<const char*, double MsmParams::*> fields[] = {
        {"c1", &MsmParams::c1},         {"c2", &MsmParams::c2},
        {"sigma_eps2", &MsmParams::sigma_eps2}, {"lambda", &MsmParams::lambda_rate},
        {"mu", &MsmParams::mu_rate},    {"L1", &MsmParams::L1},
        {"T1", &MsmParams::T1}};

    std::map<std::string, double> out;
    const double m = static_cast<double>(chains.size());
    const double dn = static_cast<double>(n);
    for (const auto& [name, field] : fields) {
        std::vector<double> means, vars;
        for (const auto& chain : chains) {
            double mean = 0.0;
            for (const Draw& d : chain.draws) mean += d.params.*field;
            mean /= dn;
            double var = 0.0;
            for (const Draw& d : chain.draws) {
                const double dev = d.params.*field - mean;
                var += dev * dev;
            }
            var /= (dn - 1.0);
            means.push_back(mean);
            vars.push_back(var);
        }
        double grand = 0.0;
        for (double mu : means) grand += mu;
        grand /= m;
        double between = 0.0;
        for (double mu : means) between += (mu - grand) * (mu - grand);
        between *= dn / (m - 1.0);
        double within = 0.0;
        for (double v : vars) within += v;
        within /= m;
        if (within <= 0.0) {
            out[name] = 1.0;  // degenerate chains (e.g. pinned parameters)
            continue;
        }
        const double pooled = (dn - 1.0) / dn * within + between / dn;
        out[name] = std::sqrt(pooled / within);
    }
    return out;
}

}  // namespace alt
