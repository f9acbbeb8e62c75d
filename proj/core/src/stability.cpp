#include "alt/stability.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "alt/trajectory.hpp"

namespace alt {

namespace {

constexpr double kMarginalEps = 1e-12;

double stationary_roa_origin(const Params& p) { return -p.a_tilde; }

}  // namespace

EigenPair eigenvalues(const Matrix2& m) {
    const double tr = m.trace();
    const double dt = m.det();
    const double disc = tr * tr - 4.0 * dt;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        const double l1 = tr >= 0.0 ? 0.5 * (tr + s) : 0.5 * (tr - s);
        const double l2 = l1 != 0.0 ? dt / l1 : tr - l1;
        return {std::complex<double>(l1, 0.0), std::complex<double>(l2, 0.0)};
    }
    const double im = 0.5 * std::sqrt(-disc);
    return {std::complex<double>(0.5 * tr, im), std::complex<double>(0.5 * tr, -im)};
}

Matrix2 jacobian(double trust, double leverage, const Params& p) {
    if (!(trust < 1.0)) throw std::domain_error("stability: Jacobian undefined at T >= 1");
    const auto [beta, L0] = derive(p);
    const double T = trust, L = leverage;
    const double one_m = 1.0 - T;
    return {(2.0 * T - L) * one_m - T * (T - L),
            -T * one_m,
            (1.0 - L) * (beta * (L0 - L) / (one_m * one_m) + 2.0 * T - L),
            -beta * (L0 + T - 2.0 * L) / one_m - T * (1.0 + T - 2.0 * L)};
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::Attractive: return "attractive";
        case Stability::Repulsive: return "repulsive";
        case Stability::Saddle: return "saddle";
        case Stability::Marginal: return "marginal";
    }
    return "unknown";
}

Stability classify(const EigenPair& eig) {
    if (std::abs(eig.first) < kMarginalEps || std::abs(eig.second) < kMarginalEps)
        return Stability::Marginal;
    const double r1 = eig.first.real();
    const double r2 = eig.second.real();
    if (r1 < 0.0 && r2 < 0.0) return Stability::Attractive;
    if (r1 > 0.0 && r2 > 0.0) return Stability::Repulsive;
    return Stability::Saddle;
}

Stability classify_diagonal(double leverage, const Params& p) {
    if (!(leverage >= 0.0 && leverage < 1.0))
        throw std::domain_error("stability: diagonal classification needs L in [0, 1)");
    const auto [beta, L0] = derive(p);
    const double lambda2 = -beta * (L0 - leverage) / (1.0 - leverage);
    if (std::fabs(lambda2) < kMarginalEps) return Stability::Marginal;
    return lambda2 < 0.0 ? Stability::Attractive : Stability::Repulsive;
}

std::vector<FixedPointReport> fixed_points(const Params& p,
                                           std::span<const double> diagonal_leverages) {
    validate(p);
    const auto [beta, L0] = derive(p);
    const bool in_domain = L0 >= 0.0 && L0 <= 1.0;

    std::vector<FixedPointReport> out;

    {
        const Matrix2 j = jacobian(0.0, L0, p);
        const EigenPair eig = eigenvalues(j);
        out.push_back({FixedPointKind::OriginL0, 0.0, L0, j, eig, classify(eig),
                       stationary_roa_origin(p), in_domain});
    }
    {
        // No Jacobian at (1, L0): classification follows the perturbation decay
        // rate 1 - L0 of the trust deviation.
        const double rate = 1.0 - L0;
        Stability cls = Stability::Marginal;
        if (rate > kMarginalEps) cls = Stability::Attractive;
        else if (rate < -kMarginalEps) cls = Stability::Repulsive;
        out.push_back({FixedPointKind::OneL0, 1.0, L0, std::nullopt, std::nullopt, cls,
                       -p.a_tilde, in_domain});
    }
    for (const double L : diagonal_leverages) {
        const Matrix2 j = jacobian(L, L, p);
        const EigenPair eig = eigenvalues(j);
        // lambda_1 = 0 on the axis, so the eigenvalue classifier always says
        // marginal; the sign of lambda_2 is the informative verdict.
        out.push_back({FixedPointKind::DiagonalAxisPoint, L, L, j, eig,
                       classify_diagonal(L, p), diagonal_roa(L, p), in_domain});
    }
    return out;
}

DecayReport verify_point_one_L0(const Params& p, double eps0) {
    validate(p);
    const auto [beta, L0] = derive(p);
    if (!(eps0 > 0.0) || !(eps0 < 1e-2))
        throw std::invalid_argument("stability: eps0 must lie in (0, 1e-2)");
    DecayReport rep;
    rep.expected_rate = 1.0 - L0;
    rep.stationary_roa = -p.a_tilde;
    if (L0 >= 1.0) {
        rep.applicable = false;
        rep.fitted_rate = std::numeric_limits<double>::quiet_NaN();
        rep.rel_error = std::numeric_limits<double>::quiet_NaN();
        rep.confirmed = false;
        rep.note = "L0 >= 1: the point (1, L0) is not attractive; no decay to fit";
        return rep;
    }
    if (L0 < 0.0) {
        rep.applicable = false;
        rep.fitted_rate = std::numeric_limits<double>::quiet_NaN();
        rep.rel_error = std::numeric_limits<double>::quiet_NaN();
        rep.confirmed = false;
        rep.note = "L0 < 0: the point lies outside the leverage domain";
        return rep;
    }

    IntegratorConfig cfg;
    cfg.guard_eps = 1e-8;  // let 1 - T decay a few extra decades for the fit
    const TrajectoryRecord rec = integrate({1.0, L0, 1.0 - eps0}, p, cfg);

    // Least-squares slope of log(1 - T) against tau over the clean decay
    // window (away from both the start transient and the terminal guard).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (const auto& s : rec.samples) {
        const double gap = 1.0 - s.trust;
        if (gap > eps0 / 2.0 || gap < 100.0 * cfg.guard_eps) continue;
        const double x = s.tau;
        const double y = std::log(gap);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    rep.applicable = true;
    if (n < 8) {
        rep.fitted_rate = std::numeric_limits<double>::quiet_NaN();
        rep.rel_error = std::numeric_limits<double>::quiet_NaN();
        rep.confirmed = false;
        rep.note = "too few samples in the decay window";
        return rep;
    }
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    rep.fitted_rate = -(static_cast<double>(n) * sxy - sx * sy) / denom;
    rep.rel_error = std::fabs(rep.fitted_rate - rep.expected_rate) / rep.expected_rate;
    rep.confirmed = rep.rel_error <= 0.05;
    rep.note = rep.confirmed ? "decay rate matches 1 - L0" : "decay rate off by more than 5%";
    return rep;
}

}  // namespace alt
