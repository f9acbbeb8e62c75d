#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/inverse_gamma.hpp>

#include "alt/calibration.hpp"

using namespace alt;

namespace {

ObservationSeries flat_series(std::size_t n, double roe, double rate) {
    ObservationSeries obs;
    for (std::size_t i = 0; i < n; ++i) {
        obs.dates.push_back({2000 + static_cast<int>(i / 12), static_cast<int>(i % 12) + 1, 1});
        obs.roe.push_back(roe);
        obs.rate.push_back(rate);
    }
    return obs;
}

MsmParams base_params() {
    MsmParams p{};
    p.c1 = 0.10;
    p.c2 = -0.16;
    p.sigma_eps2 = 0.05 * 0.05;
    p.lambda_rate = 0.5;
    p.mu_rate = 0.5;
    p.L1 = 0.25;
    p.T1 = 0.35;
    return p;
}

double scalar_gaussian_logpdf(double x, double sigma2) {
    return -0.5 * std::log(2.0 * std::numbers::pi * sigma2) - x * x / (2.0 * sigma2);
}

// Total-variation distance between a sample and a reference CDF over
// equal-probability bins of the reference.
template <typename Cdf>
double tv_against(const std::vector<double>& draws, int bins, Cdf&& quantile) {
    std::vector<double> edges(bins - 1);
    for (int i = 1; i < bins; ++i) edges[i - 1] = quantile(static_cast<double>(i) / bins);
    std::vector<double> counts(bins, 0.0);
    for (double d : draws) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), d);
        counts[static_cast<std::size_t>(it - edges.begin())] += 1.0;
    }
    double tv = 0.0;
    for (int i = 0; i < bins; ++i)
        tv += std::fabs(counts[i] / static_cast<double>(draws.size()) - 1.0 / bins);
    return 0.5 * tv;
}

}  // namespace

TEST_CASE("transition matrix: identity at zero rates, exact switch probability") {
    const TransitionMatrix id = transition_matrix(0.0, 0.0, 0.1);
    CHECK(id.p11 == 1.0);
    CHECK(id.p12 == 0.0);
    CHECK(id.p21 == 0.0);
    CHECK(id.p22 == 1.0);

    // lambda = mu = 1, dt = 0.1 -> p(switch) = 0.5 (1 - exp(-0.2))
    const TransitionMatrix q = transition_matrix(1.0, 1.0, 0.1);
    const double expected = 0.5 * (1.0 - std::exp(-0.2));
    CHECK(q.p12 == doctest::Approx(expected).epsilon(1e-12));
    CHECK(q.p21 == doctest::Approx(expected).epsilon(1e-12));
    CHECK(q.p11 + q.p12 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(expected == doctest::Approx(0.09063462346100907).epsilon(1e-12));

    // long horizons forget the initial state: rows approach (mu/s, lambda/s)
    const TransitionMatrix longrun = transition_matrix(2.0, 3.0, 1e6);
    CHECK(longrun.p11 == doctest::Approx(3.0 / 5.0).epsilon(1e-12));
    CHECK(longrun.p12 == doctest::Approx(2.0 / 5.0).epsilon(1e-12));
    CHECK(longrun.p21 == doctest::Approx(3.0 / 5.0).epsilon(1e-12));

    CHECK_THROWS_AS(transition_matrix(-1.0, 0.5, 0.1), std::domain_error);
}

TEST_CASE("forward paths: k = 0 freezes, all-s1 hand-checked first steps") {
    const ObservationSeries obs = flat_series(5, 0.1, 0.02);
    MsmParams p = base_params();
    const std::vector<Regime> s1(5, Regime::S1);

    {
        MsmParams frozen = p;
        frozen.k = 0.0;
        const StatePath path = forward_paths(frozen, s1, obs);
        CHECK(path.valid);
        for (double L : path.leverage) CHECK(L == 0.25);
        for (double T : path.trust) CHECK(T == 0.35);
    }

    const StatePath path = forward_paths(p, s1, obs);
    REQUIRE(path.valid);
    // step 1, by hand from the printed update rule
    const double g = p.c1, r = 0.02, a = 0.05, k = 0.05, dt = 0.1;
    const double b1 = (g - r * 0.25 + a * 0.75) / 0.65 + k * 0.75 * 0.35;
    const double L2 = 0.25 + 0.10 * b1 * dt;
    const double T2 = 0.35 + k * 0.35 * 0.10 * 0.65 * dt;
    CHECK(path.leverage[1] == doctest::Approx(L2).epsilon(1e-12));
    CHECK(path.trust[1] == doctest::Approx(T2).epsilon(1e-12));
    // step 2 on top of step 1
    const double b2 = (g - r * L2 + a * (1 - L2)) / (1 - T2) + k * (1 - L2) * T2;
    CHECK(path.leverage[2] == doctest::Approx(L2 + (T2 - L2) * b2 * dt).epsilon(1e-12));
    CHECK(path.trust[2] ==
          doctest::Approx(T2 + k * T2 * (T2 - L2) * (1 - T2) * dt).epsilon(1e-12));
    // c1 > 0 keeps leverage rising toward the diagonal in this regime
    for (std::size_t t = 1; t < 5; ++t) CHECK(path.leverage[t] > path.leverage[t - 1]);
}

TEST_CASE("forward paths: leverage falls when g + a < 0 and rises when g + a > 0") {
    const ObservationSeries obs = flat_series(40, 0.0, 0.02);
    MsmParams p = base_params();
    std::vector<Regime> states(40, Regime::S1);
    for (std::size_t t = 20; t < 40; ++t) states[t] = Regime::S2;
    const StatePath path = forward_paths(p, states, obs);
    REQUIRE(path.valid);
    for (std::size_t t = 1; t < 20; ++t)
        CHECK(path.leverage[t] > path.leverage[t - 1]);  // c1 + a = 0.15 > 0
    for (std::size_t t = 21; t < 40; ++t)
        CHECK(path.leverage[t] < path.leverage[t - 1]);  // c2 + a = -0.11 < 0
    // trust never decreases (T1 > L1 and the barrier holds)
    for (std::size_t t = 1; t < 40; ++t) CHECK(path.trust[t] >= path.trust[t - 1]);
}

TEST_CASE("forward paths flag exits from (0,1) instead of throwing") {
    MsmParams p = base_params();
    p.dt = 50.0;  // absurd step overshoots immediately
    const ObservationSeries obs = flat_series(4, 0.0, 0.02);
    const StatePath path = forward_paths(p, std::vector<Regime>(4, Regime::S1), obs);
    CHECK_FALSE(path.valid);
}

TEST_CASE("log-likelihood: zero residuals, scalar case, sigma scaling, invalid paths") {
    MsmParams p = base_params();
    const std::size_t n = 7;
    const ObservationSeries obs0 = flat_series(n, 0.0, 0.02);
    const std::vector<Regime> states(n, Regime::S1);
    const StatePath path = forward_paths(p, states, obs0);
    REQUIRE(path.valid);

    // observations equal to the model mean: ll = n log(1/sqrt(2 pi sigma^2))
    ObservationSeries exact = obs0;
    for (std::size_t t = 0; t < n; ++t)
        exact.roe[t] = observation_mean(p.c1, exact.rate[t], path.leverage[t]);
    CHECK(log_likelihood(p, path, exact) ==
          doctest::Approx(-0.5 * n * std::log(2.0 * std::numbers::pi * p.sigma_eps2))
              .epsilon(1e-12));

    // single observation, hand-checked against the scalar Gaussian density
    ObservationSeries one = flat_series(1, 0.07, 0.02);
    const StatePath path1 = forward_paths(p, std::vector<Regime>(1, Regime::S1), one);
    const double resid = 0.07 - observation_mean(p.c1, 0.02, p.L1);
    CHECK(log_likelihood(p, path1, one) ==
          doctest::Approx(scalar_gaussian_logpdf(resid, p.sigma_eps2)).epsilon(1e-12));

    // doubling sigma^2 with fixed residuals shifts ll by the analytic amount
    ObservationSeries noisy = exact;
    for (double& v : noisy.roe) v += 0.01;
    const double ll1 = log_likelihood(p, path, noisy);
    MsmParams p2 = p;
    p2.sigma_eps2 = 2.0 * p.sigma_eps2;
    const double ll2 = log_likelihood(p2, path, noisy);
    const double ssr = n * 0.01 * 0.01;
    const double expected_delta = -0.5 * n * std::log(2.0) + ssr / (2.0 * p.sigma_eps2) -
                                  ssr / (2.0 * p2.sigma_eps2);
    CHECK(ll2 - ll1 == doctest::Approx(expected_delta).epsilon(1e-10));

    StatePath invalid = path;
    invalid.valid = false;
    CHECK(log_likelihood(p, invalid, noisy) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("observation mean is the dimensional ROE of the core model") {
    const double g = 0.08, r = 0.03, k = 0.05, a = 0.05;
    for (double L : {0.1, 0.25, 0.6}) {
        const Params nd{a / k, g / k, r / k, k};
        CHECK(observation_mean(g, r, L) == doctest::Approx(k * roe(L, nd)).epsilon(1e-13));
    }
}

TEST_CASE("synthetic generation: exact means at zero noise, absorbing at lambda = 0") {
    MsmParams p = base_params();
    p.sigma_eps2 = 1e-30;
    const std::vector<double> rates(24, 0.02);
    const SyntheticData data = generate_synthetic(p, 24, 5, rates);
    REQUIRE(data.series.size() == 24);
    const StatePath path = forward_paths(p, data.states, data.series);
    for (std::size_t t = 0; t < 24; ++t) {
        const double g = data.states[t] == Regime::S1 ? p.c1 : p.c2;
        CHECK(data.series.roe[t] ==
              doctest::Approx(observation_mean(g, 0.02, path.leverage[t])).epsilon(1e-9));
    }

    MsmParams absorbing = base_params();
    absorbing.lambda_rate = 0.0;
    const SyntheticData stuck = generate_synthetic(absorbing, 36, 5, std::vector<double>(36, 0.02));
    for (Regime s : stuck.states) CHECK(s == Regime::S1);

    // 168 months starting 2000-01 end in 2013-12, matching a 14-year span
    const SyntheticData span = generate_synthetic(p, 168, 9, std::vector<double>(168, 0.02));
    CHECK(span.series.dates.front().year == 2000);
    CHECK(span.series.dates.back().year == 2013);
    CHECK(span.series.dates.back().month == 12);

    const SyntheticData again = generate_synthetic(p, 24, 5, rates);
    for (std::size_t t = 0; t < 24; ++t) CHECK(again.series.roe[t] == data.series.roe[t]);
}

TEST_CASE("gibbs determinism: same seed, identical draws") {
    MsmParams truth = base_params();
    const SyntheticData data = generate_synthetic(truth, 36, 11, std::vector<double>(36, 0.02));
    GibbsConfig cfg;
    cfg.iterations = 60;
    cfg.burn_in = 30;
    const PosteriorDraws a = gibbs_run(data.series, cfg, 7);
    const PosteriorDraws b = gibbs_run(data.series, cfg, 7);
    REQUIRE(a.draws.size() == b.draws.size());
    REQUIRE(a.draws.size() == 30);
    for (std::size_t i = 0; i < a.draws.size(); ++i) {
        CHECK(a.draws[i].params.c1 == b.draws[i].params.c1);
        CHECK(a.draws[i].params.sigma_eps2 == b.draws[i].params.sigma_eps2);
        CHECK(a.draws[i].path.states == b.draws[i].path.states);
    }
    const PosteriorDraws c = gibbs_run(data.series, cfg, 8);
    bool any_differ = false;
    for (std::size_t i = 0; i < a.draws.size() && !any_differ; ++i)
        any_differ = a.draws[i].params.c1 != c.draws[i].params.c1;
    CHECK(any_differ);
}

TEST_CASE("all draws respect the prior supports") {
    MsmParams truth = base_params();
    const SyntheticData data = generate_synthetic(truth, 48, 13, std::vector<double>(48, 0.02));
    GibbsConfig cfg;
    cfg.iterations = 200;
    cfg.burn_in = 100;
    const PosteriorDraws draws = gibbs_run(data.series, cfg, 3);
    for (const Draw& d : draws.draws) {
        CHECK(d.params.c1 >= kCMin);
        CHECK(d.params.c1 <= kCMax);
        CHECK(d.params.c2 >= kCMin);
        CHECK(d.params.c2 <= kCMax);
        CHECK(d.params.lambda_rate >= kRateMin);
        CHECK(d.params.lambda_rate <= kRateMax);
        CHECK(d.params.L1 >= kL1Min);
        CHECK(d.params.L1 <= kL1Max);
        CHECK(d.params.T1 >= kT1Min);
        CHECK(d.params.T1 <= kT1Max);
        CHECK(d.params.sigma_eps2 > 0.0);
        CHECK(d.path.valid);
    }
}

TEST_CASE("sigma^2 conditional matches the analytic inverse-gamma (TV < 0.02)") {
    // frozen 3-observation residual vector
    const double residuals[] = {0.03, -0.05, 0.01};
    double ssr = 0.0;
    for (double r : residuals) ssr += r * r;
    const std::size_t n = 3;

    std::mt19937_64 rng(101);
    std::vector<double> draws(10000);
    for (double& d : draws) d = detail::sample_sigma2_conditional(ssr, n, rng);

    const boost::math::inverse_gamma_distribution<double> ref(kSigmaPriorShape + 0.5 * n,
                                                              kSigmaPriorScale + 0.5 * ssr);
    const double tv = tv_against(draws, 8, [&](double p) { return quantile(ref, p); });
    CHECK(tv < 0.02);
}

TEST_CASE("metropolis block matches a brute-force grid posterior (TV < 0.03)") {
    // frozen two-observation problem: everything fixed except c1, states all s1
    const ObservationSeries obs = flat_series(2, 0.06, 0.02);
    MsmParams p = base_params();
    p.sigma_eps2 = 0.02 * 0.02;
    const std::vector<Regime> states(2, Regime::S1);

    auto logpost = [&](double c1) {
        MsmParams trial = p;
        trial.c1 = c1;
        const StatePath path = forward_paths(trial, states, obs);
        return log_likelihood(trial, path, obs);
    };

    // chain: repeated application of the production Metropolis block
    std::mt19937_64 rng(202);
    double c1 = 0.0;
    double lp = logpost(c1);
    std::vector<double> draws;
    draws.reserve(20000);
    for (int i = 0; i < 22000; ++i) {
        const auto res = detail::metropolis_scalar(c1, 0.02, kCMin, kCMax, lp, logpost, rng);
        c1 = res.value;
        lp = res.logpost;
        if (i >= 2000) draws.push_back(c1);
    }

    // brute-force grid posterior and its quantile function
    const int grid_n = 4001;
    std::vector<double> xs(grid_n), w(grid_n);
    double wmax = -1e300;
    for (int i = 0; i < grid_n; ++i) {
        xs[i] = kCMin + (kCMax - kCMin) * i / (grid_n - 1.0);
        w[i] = logpost(xs[i]);
        wmax = std::max(wmax, w[i]);
    }
    std::vector<double> cdf(grid_n, 0.0);
    double total = 0.0;
    for (int i = 0; i < grid_n; ++i) {
        total += std::exp(w[i] - wmax);
        cdf[i] = total;
    }
    for (double& c : cdf) c /= total;
    auto grid_quantile = [&](double q) {
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), q);
        return xs[static_cast<std::size_t>(it - cdf.begin())];
    };

    const double tv = tv_against(draws, 8, grid_quantile);
    CHECK(tv < 0.03);
}

TEST_CASE("fixed true states and near-zero noise collapse c1, c2 onto the truth") {
    // With the latent path and initial conditions given, the near-noiseless
    // likelihood pins c1 and c2; only the inverse-gamma prior floor on
    // sigma^2 keeps the posterior from being a spike.
    MsmParams truth = base_params();
    truth.sigma_eps2 = 1e-12;  // sigma_eps -> 1e-6
    const std::size_t n = 240;
    std::vector<Regime> states(n, Regime::S1);
    for (std::size_t t = 80; t < 160; ++t) states[t] = Regime::S2;
    const ObservationSeries rates_only = flat_series(n, 0.0, 0.02);
    const StatePath truth_path = forward_paths(truth, states, rates_only);
    REQUIRE(truth_path.valid);
    ObservationSeries data = rates_only;
    std::mt19937_64 noise_rng(18);
    std::normal_distribution<double> gauss(0.0, std::sqrt(truth.sigma_eps2));
    for (std::size_t t = 0; t < n; ++t) {
        const double g = states[t] == Regime::S1 ? truth.c1 : truth.c2;
        data.roe[t] = observation_mean(g, 0.02, truth_path.leverage[t]) + gauss(noise_rng);
    }

    GibbsConfig cfg;
    cfg.iterations = 8000;
    cfg.burn_in = 4000;
    cfg.fixed_states = states;
    cfg.fixed_initials = {{truth.L1, truth.T1}};
    const PosteriorDraws draws = gibbs_run(data, cfg, 23);
    std::vector<double> c1s, c2s;
    for (const Draw& d : draws.draws) {
        c1s.push_back(d.params.c1);
        c2s.push_back(d.params.c2);
    }
    std::nth_element(c1s.begin(), c1s.begin() + c1s.size() / 2, c1s.end());
    std::nth_element(c2s.begin(), c2s.begin() + c2s.size() / 2, c2s.end());
    CHECK(std::fabs(c1s[c1s.size() / 2] - truth.c1) < 1e-3);
    CHECK(std::fabs(c2s[c2s.size() / 2] - truth.c2) < 1e-3);
}

TEST_CASE("posterior summary: degenerate and symmetric draw sets") {
    const ObservationSeries obs = flat_series(3, 0.05, 0.02);
    MsmParams p = base_params();
    const std::vector<Regime> states(3, Regime::S1);
    const StatePath path = forward_paths(p, states, obs);

    PosteriorDraws single;
    single.draws.push_back({p, path});
    const PosteriorSummary s1 = posterior_summary(single, obs);
    CHECK(s1.params.at("c1")[4] == p.c1);
    CHECK(s1.params.at("c1")[0] == p.c1);  // all interval edges collapse
    CHECK(s1.params.at("c1")[8] == p.c1);
    CHECK(s1.p_state2[0] == 0.0);

    MsmParams q = p;
    q.c1 = 0.06;
    PosteriorDraws pair = single;
    pair.draws.push_back({q, forward_paths(q, states, obs)});
    const PosteriorSummary s2 = posterior_summary(pair, obs);
    CHECK(s2.params.at("c1")[4] == doctest::Approx(0.08).epsilon(1e-12));  // midpoint

    PosteriorDraws empty;
    CHECK_THROWS_AS(posterior_summary(empty, obs), std::invalid_argument);
}

TEST_CASE("short synthetic recovery smoke run") {
    MsmParams truth = base_params();
    const SyntheticData data = generate_synthetic(truth, 84, 29, std::vector<double>(84, 0.02));
    GibbsConfig cfg;
    cfg.iterations = 1200;
    cfg.burn_in = 600;
    const PosteriorDraws draws = gibbs_run(data.series, cfg, 31);
    const PosteriorSummary summary = posterior_summary(draws, data.series);

    // medians land on the right side of zero and in the right neighborhood
    CHECK(summary.params.at("c1")[4] > 0.02);
    CHECK(summary.params.at("c2")[4] < -0.05);
    // state probabilities track the truth on a clear majority of months
    std::size_t hits = 0;
    for (std::size_t t = 0; t < data.states.size(); ++t) {
        const bool says_s2 = summary.p_state2[t] > 0.5;
        if (says_s2 == (data.states[t] == Regime::S2)) ++hits;
    }
    CHECK(static_cast<double>(hits) >= 0.8 * static_cast<double>(data.states.size()));
}

TEST_CASE("multi-chain variance ratio sits near 1 for agreeing chains") {
    MsmParams truth = base_params();
    const SyntheticData data = generate_synthetic(truth, 60, 41, std::vector<double>(60, 0.02));
    GibbsConfig cfg;
    cfg.iterations = 600;
    cfg.burn_in = 300;
    std::vector<PosteriorDraws> chains;
    for (std::uint64_t seed : {11u, 12u, 13u}) chains.push_back(gibbs_run(data.series, cfg, seed));
    const auto psrf = multi_chain_psrf(chains);
    for (const auto& [name, r] : psrf) {
        INFO(name);
        // finite-sample floor of the ratio is sqrt(1 - 1/n)
        CHECK(r >= std::sqrt(1.0 - 1.0 / 300.0) - 1e-9);
        CHECK(r < 1.5);
    }

    // chains targeting different posteriors blow the ratio up
    ObservationSeries shifted = data.series;
    for (double& v : shifted.roe) v += 0.08;
    std::vector<PosteriorDraws> disagree = {chains[0], gibbs_run(shifted, cfg, 14)};
    CHECK(multi_chain_psrf(disagree).at("c1") > 1.5);

    CHECK_THROWS_AS(multi_chain_psrf(std::span<const PosteriorDraws>(chains.data(), 1)),
                    std::invalid_argument);
}

TEST_CASE("validation of configs and inputs") {
    const ObservationSeries obs = flat_series(5, 0.05, 0.02);
    GibbsConfig cfg;
    cfg.iterations = 10;
    cfg.burn_in = 10;
    CHECK_THROWS_AS(gibbs_run(obs, cfg, 1), std::invalid_argument);

    ObservationSeries gap = obs;
    gap.dates[3].month += 1;
    CHECK_THROWS_AS(validate(gap), std::domain_error);

    MsmParams p = base_params();
    p.c1 = 0.3;
    CHECK_THROWS_AS(validate(p), std::domain_error);

    CHECK_THROWS_AS(generate_synthetic(base_params(), 10, 1, std::vector<double>(3, 0.02)),
                    std::invalid_argument);
}
