#pragma once

#include "alt/model.hpp"

namespace alt {

/// Which transcription of the analytical L(T) trajectory to evaluate. The two
/// differ by a double integration by parts and are cross-checked in tests.
enum class ClosedForm { Primary, IntegratedByParts };

struct ClosedFormTrajectory {
    Params params;
    double K = 0.0;  ///< integration constant selecting the curve
    ClosedForm form = ClosedForm::Primary;
};

/// Integration constant K of the curve through (trust0, leverage0); K enters
/// linearly, so this is an algebraic rearrangement. Requires trust0 in (0,1)
/// and beta = a_tilde + r_tilde != 0.
double solve_K(double trust0, double leverage0, const Params& p);

ClosedFormTrajectory fit_through(double trust0, double leverage0, const Params& p,
                                 ClosedForm form = ClosedForm::Primary);

/// Analytical leverage at the given trust. Evaluation is restricted to
/// trust >= 1e-3: the T^(-beta) prefactor makes the formula numerically
/// hostile below that, where the ODE integrator is authoritative.
double leverage_of_trust(double trust, const ClosedFormTrajectory& traj);

/// Field slope dL/dT = (beta (L0-L)/(1-T) + T(1-L)) / (T (1-T)) of the
/// leverage/trust phase curves; finite-difference oracle target in tests.
double leverage_slope(double trust, double leverage, const Params& p);

}  // namespace alt
