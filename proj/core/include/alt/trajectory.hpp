#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "alt/model.hpp"

namespace alt {

enum class StepMethod { Euler, AdaptiveRK };

struct IntegratorConfig {
    StepMethod method = StepMethod::AdaptiveRK;
    double step = 1e-3;             ///< fixed tau step for the Euler method
    double rel_tol = 1e-8;          ///< adaptive relative tolerance
    double abs_tol = 1e-10;         ///< adaptive absolute tolerance
    double max_tau = 1e4;           ///< integration horizon
    double convergence_eps = 1e-6;  ///< distance threshold for terminal events
    double guard_eps = 1e-6;        ///< minimum allowed 1-T and 1-L before singular termination
};

/// Throws std::invalid_argument on non-positive step/tolerances or guard_eps
/// outside (0, 1e-2].
void validate(const IntegratorConfig& cfg);

enum class TerminalKind {
    ConvergedToDiagonal,   ///< reached the fixed axis T = L
    ConvergedToPoint,      ///< reached the attractive point (T, L) = (1, L0)
    ExitedLeverageDomain,  ///< leverage left [0, 1]
    SingularApproach,      ///< came within guard_eps of T = 1 or L = 1
    HorizonReached,        ///< tau hit max_tau with no other event
};

const char* to_string(TerminalKind kind);

struct TerminalEvent {
    TerminalKind kind;
    /// Attractor leverage: L* for the diagonal, L0 for the point, NaN otherwise.
    double leverage = std::numeric_limits<double>::quiet_NaN();
};

struct TrajectorySample {
    double tau;
    double assets;
    double leverage;
    double trust;
    double roa;
    double roe;
};

struct TrajectoryRecord {
    std::vector<TrajectorySample> samples;  ///< tau strictly increasing
    TerminalEvent terminal;
};

/// Integrates the full (A, L, T) system from s0 until a terminal event.
/// Assets are propagated through ln A, so long horizons cannot overflow the
/// integration itself (the reported A may still round to inf).
TrajectoryRecord integrate(const EconState& s0, const Params& p, const IntegratorConfig& cfg);

/// The discrete-time explicit-Euler scheme with k and dt explicit: exactly
/// n_steps applications of discrete_euler_step, recorded at tau = k*dt*i.
/// Deterministic: identical inputs give identical records.
TrajectoryRecord integrate_dimensional(const EconState& s0, const Params& p,
                                       double dt, std::size_t n_steps);

}  // namespace alt
