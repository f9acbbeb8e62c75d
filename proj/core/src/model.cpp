#include "alt/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace alt {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::domain_error("model: " + msg);
}

}  // namespace

void validate(const Params& p) {
    require(std::isfinite(p.a_tilde) && std::isfinite(p.g_tilde) &&
                std::isfinite(p.r_tilde) && std::isfinite(p.k),
            "parameters must be finite");
    require(p.a_tilde > 0.0, "a_tilde must be > 0");
    require(p.k > 0.0, "k must be > 0");
}

DerivedParams derive(const Params& p) {
    const double denom = p.r_tilde + p.a_tilde;
    require(denom != 0.0, "r_tilde + a_tilde == 0: L0 undefined");
    return {p.a_tilde + p.r_tilde, (p.g_tilde + p.a_tilde) / denom};
}

void validate(const EconState& s) {
    require(std::isfinite(s.assets) && std::isfinite(s.leverage) && std::isfinite(s.trust),
            "state must be finite");
    require(s.assets > 0.0, "assets must be > 0");
    require(s.leverage >= 0.0 && s.leverage <= 1.0, "leverage must lie in [0, 1]");
    require(s.trust >= 0.0 && s.trust <= 1.0, "trust must lie in [0, 1]");
}

double roa(double trust, double leverage, const Params& p) {
    require(trust < 1.0, "roa undefined at T >= 1");
    const double gap = trust - leverage;
    return (p.g_tilde - p.r_tilde * leverage + p.a_tilde * gap) / (1.0 - trust) + gap * trust;
}

double roa(const EconState& s, const Params& p) { return roa(s.trust, s.leverage, p); }

double roe(double leverage, const Params& p) {
    require(leverage < 1.0, "roe undefined at L >= 1");
    return p.g_tilde + leverage / (1.0 - leverage) * (p.g_tilde - p.r_tilde);
}

double diagonal_roa(double leverage, const Params& p) {
    require(leverage < 1.0, "diagonal ROA undefined at L >= 1");
    return p.r_tilde + (p.g_tilde - p.r_tilde) / (1.0 - leverage);
}

double leverage_rate(double trust, double leverage, const Params& p) {
    require(trust < 1.0, "leverage rate undefined at T >= 1");
    const double inner = (p.g_tilde - p.r_tilde * leverage + p.a_tilde * (1.0 - leverage)) /
                             (1.0 - trust) +
                         (1.0 - leverage) * trust;
    return (trust - leverage) * inner;
}

double leverage_rate_beta_form(double trust, double leverage, const Params& p) {
    require(trust < 1.0, "leverage rate undefined at T >= 1");
    const auto [beta, L0] = derive(p);
    const double inner = beta * (L0 - leverage) / (1.0 - trust) + trust * (1.0 - leverage);
    return (trust - leverage) * inner;
}

double trust_rate(double trust, double leverage) {
    return trust * (trust - leverage) * (1.0 - trust);
}

RateVector derivatives(const EconState& s, const Params& p) {
    validate(s);
    validate(p);
    require(s.trust < 1.0, "derivatives undefined at T >= 1");
    return {roa(s.trust, s.leverage, p) * s.assets,
            leverage_rate(s.trust, s.leverage, p),
            trust_rate(s.trust, s.leverage)};
}

GrowthRates growth_rates(const EconState& s, const Params& p) {
    require(s.leverage > 0.0, "r_L undefined at L == 0");
    const double r_assets = roa(s.trust, s.leverage, p);
    const double r_leverage = leverage_rate(s.trust, s.leverage, p) / s.leverage;
    return {r_assets, r_leverage, r_leverage + r_assets};
}

std::pair<double, double> discrete_euler_step(double leverage, double trust,
                                              const Params& p, double dt) {
    if (p.k == 0.0) return {leverage, trust};
    const double dL = leverage_rate(trust, leverage, p);
    const double dT = trust_rate(trust, leverage);
    return {leverage + p.k * dL * dt, trust + p.k * dT * dt};
}

}  // namespace alt
