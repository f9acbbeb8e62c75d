#include "alt/closed_form.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "alt/errors.hpp"

namespace alt {

namespace {

constexpr double kMinTrust = 1e-3;
// Beyond this value of S = beta*T/(1-T) the integrands are a boundary layer at
// y = 0; substitute u = S*y and integrate the exponential-weighted form.
constexpr double kLayerThreshold = 60.0;

// [0,1] integrals carry the fractional-power factor (1-y)^p whose derivative
// blows up at y = 1; tanh-sinh clusters nodes at the endpoints and converges
// where bisecting Gauss-Kronrod stalls.
template <typename F>
double unit_integral(F&& f) {
    static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    double err = 0.0, l1 = 0.0;
    const double v = integrator.integrate(std::forward<F>(f), 0.0, 1.0, 1e-12, &err, &l1);
    if (!(err <= 1e-9))
        throw numerical_error("closed_form: quadrature did not converge");
    return v;
}

// Smooth exponential-weighted integrand on a truncated layer domain.
template <typename F>
double layer_integral(F&& f, double b) {
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        std::forward<F>(f), 0.0, b, 12, 1e-13, &err);
    if (!(err <= 1e-10 * std::max(1.0, std::fabs(v))))
        throw numerical_error("closed_form: quadrature did not converge");
    return v;
}

struct Curve {
    double beta;
    double L0;
    double S;        // beta*T/(1-T)
    double prefactor;  // (1-T)^(1+beta) T^(-beta) exp(-beta/(1-T))
};

Curve curve_terms(double trust, const Params& p) {
    if (p.a_tilde + p.r_tilde == 0.0)
        throw std::domain_error(
            "closed_form: beta = a_tilde + r_tilde must be nonzero and finite");
    const auto [beta, L0] = derive(p);
    if (!(trust > 0.0) || !(trust < 1.0))
        throw std::domain_error("closed_form: trust must lie strictly inside (0, 1)");
    if (trust < kMinTrust)
        throw std::domain_error("closed_form: evaluation restricted to trust >= 1e-3");
    const double one_m = 1.0 - trust;
    const double S = beta * trust / one_m;
    if (!(S > -600.0))
        throw numerical_error("closed_form: exponential factor overflows (beta < 0, T near 1)");
    const double pre = std::pow(one_m, 1.0 + beta) * std::pow(trust, -beta) *
                       std::exp(-beta / one_m);
    return {beta, L0, S, pre};
}

// I1 = \int_0^1 (1-y)^(beta+1) exp(-S y) dy
double integral_plus(double beta, double S) {
    if (S > kLayerThreshold) {
        const double j = layer_integral(
            [=](double u) { return std::pow(1.0 - u / S, beta + 1.0) * std::exp(-u); },
            kLayerThreshold);
        return j / S;
    }
    return unit_integral(
        [=](double y) { return std::pow(1.0 - y, beta + 1.0) * std::exp(-S * y); });
}

// Imid = \int_0^1 (1-y)^beta exp(-S y) dy; one integration by parts turns the
// (1-y)^(beta-1) integrand of the by-parts form into this bounded one.
double integral_mid(double beta, double S) {
    if (S > kLayerThreshold) {
        const double j = layer_integral(
            [=](double u) { return std::pow(1.0 - u / S, beta) * std::exp(-u); },
            kLayerThreshold);
        return j / S;
    }
    return unit_integral([=](double y) { return std::pow(1.0 - y, beta) * std::exp(-S * y); });
}

// Bracketed trust-dependent factor of the primary form, i.e. the coefficient
// of (L0 - 1); written to stay finite as T -> 1.
double primary_bracket(double trust, double beta, double S) {
    const double head = (beta + (1.0 - trust)) / (1.0 + beta);
    const double tail = trust * (S * integral_plus(beta, S)) / (1.0 + beta);
    return head + tail;
}

}  // namespace

double solve_K(double trust0, double leverage0, const Params& p) {
    validate(p);
    const Curve c = curve_terms(trust0, p);
    if (!(c.prefactor > 0.0) || !std::isfinite(c.prefactor))
        throw numerical_error("closed_form: prefactor degenerate at this trust");
    const double bracket = primary_bracket(trust0, c.beta, c.S);
    return (1.0 + (c.L0 - 1.0) * bracket - leverage0) / c.prefactor;
}

ClosedFormTrajectory fit_through(double trust0, double leverage0, const Params& p,
                                 ClosedForm form) {
    return {p, solve_K(trust0, leverage0, p), form};
}

double leverage_of_trust(double trust, const ClosedFormTrajectory& traj) {
    const Curve c = curve_terms(trust, traj.params);
    if (traj.form == ClosedForm::Primary) {
        return 1.0 - traj.K * c.prefactor +
               (c.L0 - 1.0) * primary_bracket(trust, c.beta, c.S);
    }
    // Integrated-by-parts form: (1-T) * (-1/beta + I2) with
    // I2 = 1/beta - (S/beta) Imid collapses exactly to -T * Imid.
    return c.L0 - traj.K * c.prefactor -
           (c.L0 - 1.0) * trust * integral_mid(c.beta, c.S);
}

double leverage_slope(double trust, double leverage, const Params& p) {
    if (!(trust > 0.0) || !(trust < 1.0))
        throw std::domain_error("closed_form: slope defined for trust in (0, 1)");
    const auto [beta, L0] = derive(p);
    const double one_m = 1.0 - trust;
    return (beta * (L0 - leverage) / one_m + trust * (1.0 - leverage)) / (trust * one_m);
}

}  // namespace alt
