#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "alt/model.hpp"

namespace alt {

struct MonthStamp {
    int year;
    int month;  ///< 1..12
    int day;    ///< 1..31, carried through unchanged
};

/// Monthly ROE observations [r_E]_t paired with the interest rate r_t, both
/// in decimal fractions per year.
struct ObservationSeries {
    std::vector<MonthStamp> dates;
    std::vector<double> roe;
    std::vector<double> rate;
    std::size_t size() const { return roe.size(); }
};

/// Equal lengths, nonempty, finite values, consecutive months.
void validate(const ObservationSeries& obs);

enum class Regime : std::uint8_t { S1 = 0, S2 = 1 };

// Prior supports of the calibration set-up.
inline constexpr double kCMin = -0.25, kCMax = 0.25;
inline constexpr double kRateMin = 0.0, kRateMax = 100.0;
inline constexpr double kL1Min = 0.2, kL1Max = 0.3;
inline constexpr double kT1Min = 0.3, kT1Max = 0.4;
inline constexpr double kSigmaPriorShape = 1e-2, kSigmaPriorScale = 1e-2;

struct MsmParams {
    double c1;          ///< EBITA/assets level in state s1
    double c2;          ///< EBITA/assets level in state s2
    double sigma_eps2;  ///< observation noise variance
    double lambda_rate; ///< s1 -> s2 transition rate of Q
    double mu_rate;     ///< s2 -> s1 transition rate of Q
    double L1;          ///< initial leverage
    double T1;          ///< initial trust
    double a = 0.05;    ///< fixed debt adjustment rate (per year)
    double k = 0.05;    ///< fixed trust adjustment rate (per year)
    double dt = 0.1;    ///< time step (years); 0.1 is roughly one month
};

/// Enforces the prior supports plus sigma_eps2 > 0.
void validate(const MsmParams& p);

struct StatePath {
    std::vector<Regime> states;
    std::vector<double> leverage;
    std::vector<double> trust;
    bool valid = true;  ///< false when the derived path leaves (0, 1)
};

/// Deterministic explicit-Euler recursion of the state equations with
/// g = c1 in s1, c2 in s2 and r_t from the observations. Invalidity (a path
/// coordinate leaving (0,1)) is flagged, not thrown: it is a rejection signal.
StatePath forward_paths(const MsmParams& p, std::span<const Regime> states,
                        const ObservationSeries& obs);

/// Mean of the observation equation: g + (L/(1-L)) (g - r).
double observation_mean(double g, double r, double leverage);

/// Gaussian log-likelihood of the ROE observations; -inf for invalid paths.
double log_likelihood(const MsmParams& p, const StatePath& path, const ObservationSeries& obs);

struct TransitionMatrix {
    double p11, p12, p21, p22;
};

/// Exact two-state chain exponential over dt: with s = lambda + mu,
/// p12 = (lambda/s)(1 - exp(-s dt)), p21 = (mu/s)(1 - exp(-s dt)); identity
/// when s == 0. Valid for any lambda*dt (rates up to 100 are in the prior).
TransitionMatrix transition_matrix(double lambda_rate, double mu_rate, double dt);

struct GibbsConfig {
    std::size_t iterations = 200;
    std::size_t burn_in = 100;
    bool adapt_during_burn_in = true;
    double scale_c = 0.01;      ///< random-walk scale for c1, c2
    double scale_rate = 0.5;    ///< random-walk scale for lambda, mu
    double scale_init = 0.005;  ///< random-walk scale for L1, T1
    /// When set, the state path is held fixed at these values (used by
    /// degenerate-likelihood checks); the state-flip block is skipped.
    std::optional<std::vector<Regime>> fixed_states;
    /// When set, (L1, T1) are pinned and their Metropolis blocks skipped;
    /// diagnostic companion to fixed_states.
    std::optional<std::pair<double, double>> fixed_initials;
};

struct Draw {
    MsmParams params;
    StatePath path;
};

struct AcceptanceRates {
    double c1 = 0, c2 = 0, lambda = 0, mu = 0, L1 = 0, T1 = 0, state_flips = 0;
};

struct PosteriorDraws {
    std::vector<Draw> draws;  ///< retained iterations (post burn-in)
    std::size_t burn_in = 0;
    AcceptanceRates acceptance;  ///< post burn-in acceptance fractions
    std::uint64_t seed = 0;
};

/// Metropolis-within-Gibbs sampler. Blocks per iteration: conjugate
/// inverse-gamma sigma_eps2; random-walk Metropolis for c1, c2, lambda, mu,
/// L1, T1 within their uniform supports; single-site Metropolis state flips
/// with the forward path recomputed from the flipped index. The emission
/// depends on the whole past state sequence through L_t, so exact
/// forward-backward sampling does not apply. Deterministic given the seed.
PosteriorDraws gibbs_run(const ObservationSeries& obs, const GibbsConfig& cfg,
                         std::uint64_t seed);

struct SyntheticData {
    ObservationSeries series;
    std::vector<Regime> states;
    MsmParams params;
};

/// Simulates states via transition_matrix, paths via forward_paths and noisy
/// observations; regenerates (bounded retries) if a draw leaves (0, 1).
SyntheticData generate_synthetic(const MsmParams& p, std::size_t n, std::uint64_t seed,
                                 std::span<const double> rates,
                                 MonthStamp start = {2000, 1, 1});

/// Median plus the central 20/40/60/80% interval edges:
/// [q10 q20 q30 q40 median q60 q70 q80 q90].
using Quantiles = std::array<double, 9>;

struct SeriesSummary {
    std::string name;
    std::vector<Quantiles> per_step;
};

struct PosteriorSummary {
    std::vector<SeriesSummary> series;      ///< g, roe_mean, leverage, trust
    std::vector<double> p_state2;           ///< P(s_t = s2 | data)
    std::map<std::string, Quantiles> params;
    std::size_t n_draws = 0;
};

PosteriorSummary posterior_summary(const PosteriorDraws& draws, const ObservationSeries& obs);

/// Gelman-Rubin potential scale reduction factor per scalar parameter across
/// chains run with distinct seeds. Values near 1 indicate the chains agree.
std::map<std::string, double> multi_chain_psrf(std::span<const PosteriorDraws> chains);

namespace detail {

/// sigma_eps2 | residuals ~ IG(prior_shape + n/2, prior_scale + ssr/2).
double sample_sigma2_conditional(double ssr, std::size_t n, std::mt19937_64& rng);

struct MetropolisResult {
    double value;
    bool accepted;
    double logpost;  ///< log-posterior at the returned value
};

/// One random-walk Metropolis update of a scalar with a uniform prior on
/// [lo, hi]; proposals outside the support are rejected.
template <typename LogPost>
MetropolisResult metropolis_scalar(double current, double scale, double lo, double hi,
                                   double current_logpost, LogPost&& logpost,
                                   std::mt19937_64& rng) {
    std::normal_distribution<double> step(0.0, scale);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double proposal = current + step(rng);
    const double u = unif(rng);  // drawn unconditionally to keep the stream aligned
    if (proposal < lo || proposal > hi) return {current, false, current_logpost};
    const double lp = logpost(proposal);
    if (std::log(u) < lp - current_logpost) return {proposal, true, lp};
    return {current, false, current_logpost};
}

/// Log-probability of a state sequence under the chain prior (uniform initial
/// state; the constant initial term is omitted).
double log_state_prior(std::span<const Regime> states, const TransitionMatrix& q);

}  // namespace detail

}  // namespace alt
