#pragma once

#include <utility>

// Coupled dynamics of assets A, leverage L = D/A and trust T (the fraction of
// assets accepted as loan collateral).  All rates here are expressed in
// non-dimensional time tau = k*t; dimensional quantities are recovered by
// multiplying a rate by the trust adjustment speed k.

namespace alt {

struct Params {
    double a_tilde;    ///< debt adjustment rate; 1/a_tilde is the debt convergence time
    double g_tilde;    ///< EBITA/assets ratio (may be negative in crisis regimes)
    double r_tilde;    ///< interest rate paid on debt
    double k = 0.05;   ///< trust adjustment rate in 1/time, used for dimensional forms
};

/// Throws std::domain_error unless a_tilde > 0, k > 0 and all fields are finite.
void validate(const Params& p);

struct DerivedParams {
    double beta;  ///< a_tilde + r_tilde
    double L0;    ///< (g_tilde + a_tilde) / (r_tilde + a_tilde); leverage of the off-diagonal fixed points
};

/// Throws std::domain_error when r_tilde + a_tilde == 0 (L0 undefined).
DerivedParams derive(const Params& p);

struct EconState {
    double assets;    ///< A > 0, currency units
    double leverage;  ///< L = D/A in [0, 1]
    double trust;     ///< T in [0, 1]
};

/// Throws std::domain_error unless A > 0, L in [0,1], T in [0,1].
void validate(const EconState& s);

struct RateVector {
    double dA;  ///< dA/dtau
    double dL;  ///< dL/dtau
    double dT;  ///< dT/dtau
};

/// Right-hand sides of the three coupled ODEs. Requires T < 1 strictly.
RateVector derivatives(const EconState& s, const Params& p);

/// dL/dtau = (T-L) * ((g - r L + a(1-L))/(1-T) + (1-L) T).
double leverage_rate(double trust, double leverage, const Params& p);

/// Same rate written through beta and L0: (T-L) * (beta (L0-L)/(1-T) + T(1-L)).
double leverage_rate_beta_form(double trust, double leverage, const Params& p);

/// dT/dtau = T (T-L) (1-T).  Exactly zero at T=0, T=1 and T=L.
double trust_rate(double trust, double leverage);

/// Return on assets (1/A) dA/dtau as a function of position only.
double roa(double trust, double leverage, const Params& p);
double roa(const EconState& s, const Params& p);

/// Return on equity g + (L/(1-L)) (g - r). Requires L < 1.
double roe(double leverage, const Params& p);

/// ROA restricted to the fixed axis T=L: r + (g-r)/(1-L). Equals roe there.
double diagonal_roa(double leverage, const Params& p);

struct GrowthRates {
    double assets;    ///< r_A
    double leverage;  ///< r_L = (1/L) dL/dtau
    double debt;      ///< r_D = r_L + r_A, the debt growth identity
};

/// Requires T < 1 and L > 0 (r_L undefined at zero leverage).
GrowthRates growth_rates(const EconState& s, const Params& p);

/// One explicit-Euler step of the discrete-time L/T state equations with the
/// factor k and the time step dt explicit:
///   L' = L + k * dL/dtau * dt,   T' = T + k * dT/dtau * dt.
/// k == 0 freezes the state. Caller owns domain checks before and after.
std::pair<double, double> discrete_euler_step(double leverage, double trust,
                                              const Params& p, double dt);

}  // namespace alt
