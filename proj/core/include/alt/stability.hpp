#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "alt/model.hpp"

namespace alt {

struct Matrix2 {
    double a11, a12, a21, a22;
    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a21; }
};

using EigenPair = std::pair<std::complex<double>, std::complex<double>>;

/// Closed-form eigenvalues from trace and determinant; either two reals or a
/// complex-conjugate pair.
EigenPair eigenvalues(const Matrix2& m);

/// Jacobian of the (T, L) subsystem at any point with T < 1.
Matrix2 jacobian(double trust, double leverage, const Params& p);

enum class Stability { Attractive, Repulsive, Saddle, Marginal };

const char* to_string(Stability s);

/// Eigenvalue-sign classification; any |lambda| < 1e-12 is reported Marginal
/// (linear analysis inconclusive there).
Stability classify(const EigenPair& eig);

/// Stability of the fixed axis T = L at the given leverage: attractive below
/// L0, repulsive above, marginal at L0 where lambda_2 vanishes.
Stability classify_diagonal(double leverage, const Params& p);

enum class FixedPointKind { DiagonalAxisPoint, OriginL0, OneL0 };

struct FixedPointReport {
    FixedPointKind kind;
    double trust;
    double leverage;
    std::optional<Matrix2> jac;        ///< absent at (1, L0): 1/(1-T) terms forbid it
    std::optional<EigenPair> eigen;    ///< absent at (1, L0)
    Stability classification;
    double stationary_roa;
    bool l0_in_domain;                 ///< whether L0 lies in [0, 1]
};

/// The two off-diagonal fixed points (0, L0) and (1, L0), plus one report per
/// requested leverage sample on the fixed axis T = L.
std::vector<FixedPointReport> fixed_points(const Params& p,
                                           std::span<const double> diagonal_leverages = {});

/// Numerical confirmation that (1, L0) attracts when L0 < 1: integrates from
/// (T = 1 - |eps0|, L = L0) and fits the exponential decay rate of 1 - T,
/// which the linearized dynamics puts at 1 - L0.
struct DecayReport {
    bool applicable;        ///< false when L0 >= 1 (point not attractive)
    double expected_rate;   ///< 1 - L0
    double fitted_rate;     ///< regression slope of -log(1 - T) vs tau
    double rel_error;
    bool confirmed;         ///< |fitted - expected| <= 5% of expected
    double stationary_roa;  ///< -a_tilde
    std::string note;
};

DecayReport verify_point_one_L0(const Params& p, double eps0);

}  // namespace alt
