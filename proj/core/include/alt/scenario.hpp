#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "alt/model.hpp"
#include "alt/trajectory.hpp"

namespace alt {

/// One piecewise-constant policy regime: (g_tilde, r_tilde) from tau_start
/// until the next segment. a_tilde is held fixed across a schedule.
struct RegimeSegment {
    double tau_start;
    double g_tilde;
    double r_tilde;
};

/// First segment must start at 0; tau_start strictly increasing.
void validate_schedule(std::span<const RegimeSegment> schedule);

struct DiagnosticsPoint {
    double tau;
    double roa;
    double roa_times_tau;    ///< the instantaneous-rate shortcut for ln(A/A0)
    double ln_assets_ratio;  ///< exact ln(A(tau)/A(0)) from the integrated path
};

struct ScenarioResult {
    TrajectoryRecord path;
    std::vector<RegimeSegment> schedule;
    std::vector<std::size_t> sample_segment;  ///< segment index per sample
    std::vector<DiagnosticsPoint> diagnostics;
    std::optional<double> stationary_roa;  ///< terminal ROA when converged
    double a_tilde;
};

/// Integrates the system piecewise, switching (g, r) discontinuously at the
/// segment boundaries (the integrator lands on each boundary exactly). A
/// boundary sample carries the incoming segment's rates, so the ROA/ROE jump
/// shows between adjacent samples.
ScenarioResult run_schedule(const EconState& s0, double a_tilde,
                            std::span<const RegimeSegment> schedule,
                            const IntegratorConfig& cfg, double k = 0.05);

/// The series of (tau, r_A, r_A*tau, ln A/A0) for an integrated scenario.
std::vector<DiagnosticsPoint> asset_growth_diagnostics(const ScenarioResult& result);

struct SweepEntry {
    double intervention_tau;
    double stationary_roa;
    double crisis_duration;       ///< total tau with r_A < 0
    double ln_assets_at_horizon;  ///< exact up to convergence, then extended at the stationary rate
};

struct SweepResult {
    std::vector<ScenarioResult> scenarios;  ///< ordered by intervention time
    std::vector<SweepEntry> summary;
};

/// One scenario per intervention time: pre-crisis regime until crisis_start,
/// crisis regime until the intervention, intervention regime afterwards.
/// Intervention at crisis_start degenerates to a no-crisis schedule.
SweepResult intervention_sweep(const EconState& s0, double a_tilde, const RegimeSegment& pre,
                               std::pair<double, double> crisis_gr,
                               std::pair<double, double> intervention_gr, double crisis_start,
                               std::span<const double> intervention_times,
                               const IntegratorConfig& cfg, double k = 0.05);

}  // namespace alt
