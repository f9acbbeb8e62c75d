#include "alt/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "alt/errors.hpp"

namespace alt {

namespace {

struct Y {
    double lnA;
    double L;
    double T;
};

struct K {
    double lnA;
    double L;
    double T;
};

// Raw right-hand side in (lnA, L, T) coordinates. Returns nullopt outside the
// evaluable region (T >= 1 or non-finite state); integrator stages may probe
// leverage outside [0, 1], which the formulas support.
std::optional<K> rhs(const Y& y, const Params& p) {
    if (!(y.T < 1.0) || !std::isfinite(y.T) || !std::isfinite(y.L)) return std::nullopt;
    const double r_assets = roa(y.T, y.L, p);
    return K{r_assets, leverage_rate(y.T, y.L, p), trust_rate(y.T, y.L)};
}

Y advance(const Y& y, double h, const K& k) {
    return {y.lnA + h * k.lnA, y.L + h * k.L, y.T + h * k.T};
}

// Dormand-Prince 5(4) coefficients.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
// b - b*: defect of the embedded 4th-order solution.
constexpr double D1 = 71.0 / 57600, D3 = -71.0 / 16695, D4 = 71.0 / 1920,
                 D5 = -17253.0 / 339200, D6 = 22.0 / 525, D7 = -1.0 / 40;

struct StepResult {
    Y y;
    double error;  // scaled error norm; accept when <= 1
};

std::optional<StepResult> dp45_step(const Y& y0, double h, const Params& p,
                                    const IntegratorConfig& cfg) {
    const auto k1 = rhs(y0, p);
    if (!k1) return std::nullopt;
    const auto k2 = rhs(advance(y0, h * A21, *k1), p);
    if (!k2) return std::nullopt;
    const auto k3 = rhs({y0.lnA + h * (A31 * k1->lnA + A32 * k2->lnA),
                         y0.L + h * (A31 * k1->L + A32 * k2->L),
                         y0.T + h * (A31 * k1->T + A32 * k2->T)},
                        p);
    if (!k3) return std::nullopt;
    const auto k4 = rhs({y0.lnA + h * (A41 * k1->lnA + A42 * k2->lnA + A43 * k3->lnA),
                         y0.L + h * (A41 * k1->L + A42 * k2->L + A43 * k3->L),
                         y0.T + h * (A41 * k1->T + A42 * k2->T + A43 * k3->T)},
                        p);
    if (!k4) return std::nullopt;
    const auto k5 = rhs({y0.lnA + h * (A51 * k1->lnA + A52 * k2->lnA + A53 * k3->lnA + A54 * k4->lnA),
                         y0.L + h * (A51 * k1->L + A52 * k2->L + A53 * k3->L + A54 * k4->L),
                         y0.T + h * (A51 * k1->T + A52 * k2->T + A53 * k3->T + A54 * k4->T)},
                        p);
    if (!k5) return std::nullopt;
    const auto k6 = rhs({y0.lnA + h * (A61 * k1->lnA + A62 * k2->lnA + A63 * k3->lnA +
                                       A64 * k4->lnA + A65 * k5->lnA),
                         y0.L + h * (A61 * k1->L + A62 * k2->L + A63 * k3->L + A64 * k4->L +
                                     A65 * k5->L),
                         y0.T + h * (A61 * k1->T + A62 * k2->T + A63 * k3->T + A64 * k4->T +
                                     A65 * k5->T)},
                        p);
    if (!k6) return std::nullopt;

    const Y y1 = {
        y0.lnA + h * (B1 * k1->lnA + B3 * k3->lnA + B4 * k4->lnA + B5 * k5->lnA + B6 * k6->lnA),
        y0.L + h * (B1 * k1->L + B3 * k3->L + B4 * k4->L + B5 * k5->L + B6 * k6->L),
        y0.T + h * (B1 * k1->T + B3 * k3->T + B4 * k4->T + B5 * k5->T + B6 * k6->T)};
    const auto k7 = rhs(y1, p);
    if (!k7) return std::nullopt;

    const double e_lnA = h * (D1 * k1->lnA + D3 * k3->lnA + D4 * k4->lnA + D5 * k5->lnA +
                              D6 * k6->lnA + D7 * k7->lnA);
    const double e_L = h * (D1 * k1->L + D3 * k3->L + D4 * k4->L + D5 * k5->L + D6 * k6->L +
                            D7 * k7->L);
    const double e_T = h * (D1 * k1->T + D3 * k3->T + D4 * k4->T + D5 * k5->T + D6 * k6->T +
                            D7 * k7->T);

    auto scaled = [&](double e, double a, double b) {
        const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::fabs(a), std::fabs(b));
        return e / sc;
    };
    const double s1 = scaled(e_lnA, y0.lnA, y1.lnA);
    const double s2 = scaled(e_L, y0.L, y1.L);
    const double s3 = scaled(e_T, y0.T, y1.T);
    return StepResult{y1, std::sqrt((s1 * s1 + s2 * s2 + s3 * s3) / 3.0)};
}

// Single classic RK4 step, used only to probe states inside an accepted step
// while refining event times.
std::optional<Y> rk4_step(const Y& y0, double h, const Params& p) {
    const auto k1 = rhs(y0, p);
    if (!k1) return std::nullopt;
    const auto k2 = rhs(advance(y0, 0.5 * h, *k1), p);
    if (!k2) return std::nullopt;
    const auto k3 = rhs(advance(y0, 0.5 * h, *k2), p);
    if (!k3) return std::nullopt;
    const auto k4 = rhs(advance(y0, h, *k3), p);
    if (!k4) return std::nullopt;
    return Y{y0.lnA + h / 6.0 * (k1->lnA + 2 * k2->lnA + 2 * k3->lnA + k4->lnA),
             y0.L + h / 6.0 * (k1->L + 2 * k2->L + 2 * k3->L + k4->L),
             y0.T + h / 6.0 * (k1->T + 2 * k2->T + 2 * k3->T + k4->T)};
}

class EventDetector {
  public:
    EventDetector(const Params& p, const IntegratorConfig& cfg) : p_(p), cfg_(cfg) {
        if (p.r_tilde + p.a_tilde != 0.0) derived_ = derive(p);
    }

    bool triggered(const Y& y) const {
        return diagonal(y) || point(y) || exited(y) || singular(y);
    }

    TerminalEvent classify(const Y& y) const {
        if (diagonal(y)) return {TerminalKind::ConvergedToDiagonal, 0.5 * (y.T + y.L)};
        if (point(y) || captured_by_point(y)) return {TerminalKind::ConvergedToPoint, derived_->L0};
        if (exited(y)) return {TerminalKind::ExitedLeverageDomain};
        return {TerminalKind::SingularApproach};
    }

    bool diagonal(const Y& y) const {
        if (std::fabs(y.T - y.L) >= cfg_.convergence_eps) return false;
        if (!(y.T < 1.0)) return false;
        return std::fabs(leverage_rate(y.T, y.L, p_)) < cfg_.convergence_eps;
    }

    bool point(const Y& y) const {
        if (!point_in_domain()) return false;
        return std::hypot(1.0 - y.T, y.L - derived_->L0) < cfg_.convergence_eps;
    }

    bool exited(const Y& y) const { return y.L < 0.0 || y.L > 1.0; }

    bool singular(const Y& y) const {
        return 1.0 - y.T < cfg_.guard_eps || 1.0 - y.L < cfg_.guard_eps;
    }

    // A trajectory pinched against T = 1 while tracking L -> L0 is converging
    // to the attractive point; the perturbation analysis gives the approach
    // cone |L - L0| ~ (1 - L0)(1 - T)/beta, widened here by a safety factor.
    bool captured_by_point(const Y& y) const {
        if (!point_in_domain()) return false;
        if (!(1.0 - y.T < cfg_.guard_eps)) return false;
        return inside_point_cone(y);
    }

    // Asymptotic approach cone of the attractive point, from the perturbation
    // analysis |L - L0| ~ (1 - L0)(1 - T)/beta, widened by a safety factor.
    bool inside_point_cone(const Y& y) const {
        if (!point_in_domain()) return false;
        const double beta = std::max(derived_->beta, 1e-12);
        const double slope = std::max(1.0, (1.0 - derived_->L0) / beta);
        return std::fabs(y.L - derived_->L0) <= cfg_.convergence_eps + 2.0 * slope * (1.0 - y.T);
    }

    // Classification for a forced stop (explicit method leaving its stability
    // region near T = 1): either the state is funneling into (1, L0) or the
    // approach is genuinely singular.
    TerminalEvent classify_stiff_stop(const Y& y) const {
        if (inside_point_cone(y)) return {TerminalKind::ConvergedToPoint, derived_->L0};
        return {TerminalKind::SingularApproach};
    }

    // Local contraction rate of the leverage equation (the J22 entry); the
    // explicit Euler step h is only stable while h * |J22| stays below ~2.
    double leverage_stiffness(const Y& y) const {
        if (!derived_ || !(y.T < 1.0)) return 0.0;
        const double one_m = 1.0 - y.T;
        return std::fabs(-derived_->beta * (derived_->L0 + y.T - 2.0 * y.L) / one_m -
                         y.T * (1.0 + y.T - 2.0 * y.L));
    }

    bool point_in_domain() const {
        return derived_ && derived_->L0 >= 0.0 && derived_->L0 < 1.0;
    }

  private:
    Params p_;
    IntegratorConfig cfg_;
    std::optional<DerivedParams> derived_;
};

// Locates the earliest tau in (tau0, tau1] where an event condition holds,
// bisecting with RK4 probes from y0. Returns the probe state at the accepted
// (event-side) end together with the last event-free state.
struct RefinedEvent {
    double tau_event;
    double tau_inside;
    Y at_event;
    Y last_inside;
};

RefinedEvent refine_event(const Y& y0, double tau0, double tau1, const Y& y1,
                          const Params& p, const EventDetector& det, double tau_tol) {
    double lo = 0.0, hi = tau1 - tau0;
    Y y_lo = y0;
    Y y_hi = y1;
    while (hi - lo > tau_tol && hi - lo > 1e-14 * std::max(1.0, tau1)) {
        const double mid = 0.5 * (lo + hi);
        const auto probe = rk4_step(y0, mid, p);
        // A failed probe means the state left the evaluable region: the event
        // lies at or before mid.
        if (!probe || det.triggered(*probe)) {
            hi = mid;
            if (probe) y_hi = *probe;
        } else {
            lo = mid;
            y_lo = *probe;
        }
    }
    return {tau0 + hi, tau0 + lo, y_hi, y_lo};
}

TrajectorySample make_sample(double tau, const Y& y, const Params& p) {
    TrajectorySample s;
    s.tau = tau;
    s.assets = std::exp(y.lnA);
    s.leverage = y.L;
    s.trust = y.T;
    s.roa = y.T < 1.0 ? roa(y.T, y.L, p) : std::numeric_limits<double>::quiet_NaN();
    s.roe = y.L < 1.0 ? roe(y.L, p) : std::numeric_limits<double>::quiet_NaN();
    return s;
}

bool sample_state_valid(const Y& y) {
    return y.L >= 0.0 && y.L <= 1.0 && y.T >= 0.0 && y.T < 1.0;
}

// Shared event handling for both integrators: refine, record, classify.
void finish_with_event(TrajectoryRecord& rec, const Y& y0, double tau0, double tau1,
                       const Y& y1, const Params& p, const EventDetector& det,
                       const IntegratorConfig& cfg) {
    const RefinedEvent ev =
        refine_event(y0, tau0, tau1, y1, p, det, cfg.convergence_eps / 10.0);
    const bool event_valid = sample_state_valid(ev.at_event);
    const double tau_rec = event_valid ? ev.tau_event : ev.tau_inside;
    const Y& state_rec = event_valid ? ev.at_event : ev.last_inside;
    if (tau_rec > tau0) rec.samples.push_back(make_sample(tau_rec, state_rec, p));
    rec.terminal = det.classify(ev.at_event);
}

}  // namespace

void validate(const IntegratorConfig& cfg) {
    auto bad = [](const char* what) {
        throw std::invalid_argument(std::string("trajectory: ") + what);
    };
    if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) bad("step must be > 0");
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0)) bad("tolerances must be > 0");
    if (!(cfg.max_tau > 0.0)) bad("max_tau must be > 0");
    if (!(cfg.convergence_eps > 0.0)) bad("convergence_eps must be > 0");
    if (!(cfg.guard_eps > 0.0) || cfg.guard_eps > 1e-2) bad("guard_eps must lie in (0, 1e-2]");
}

const char* to_string(TerminalKind kind) {
    switch (kind) {
        case TerminalKind::ConvergedToDiagonal: return "converged_to_diagonal";
        case TerminalKind::ConvergedToPoint: return "converged_to_point";
        case TerminalKind::ExitedLeverageDomain: return "exited_leverage_domain";
        case TerminalKind::SingularApproach: return "singular_approach";
        case TerminalKind::HorizonReached: return "horizon_reached";
    }
    return "unknown";
}

TrajectoryRecord integrate(const EconState& s0, const Params& p, const IntegratorConfig& cfg) {
    validate(cfg);
    validate(p);
    validate(s0);
    if (!(s0.trust < 1.0)) throw std::domain_error("trajectory: initial trust must be < 1");

    const EventDetector det(p, cfg);
    TrajectoryRecord rec;
    Y y{std::log(s0.assets), s0.leverage, s0.trust};
    double tau = 0.0;
    rec.samples.push_back(make_sample(tau, y, p));

    if (det.triggered(y)) {
        rec.terminal = det.classify(y);
        return rec;
    }

    if (cfg.method == StepMethod::Euler) {
        while (tau < cfg.max_tau) {
            // fold the remainder into the final step so no sub-step crumb of
            // rounding size is ever taken
            const double remaining = cfg.max_tau - tau;
            const double h = remaining <= 1.5 * cfg.step ? remaining : cfg.step;
            // Inside the singular neighborhood the leverage equation stiffens
            // like 1/(1-T); stop at the edge of the explicit-Euler stability
            // region instead of stepping into oscillatory blow-up.
            if (1.0 - y.T < 1e-2 && h * det.leverage_stiffness(y) > 1.0) {
                rec.terminal = det.classify_stiff_stop(y);
                return rec;
            }
            const auto k = rhs(y, p);
            if (!k) {
                rec.terminal = {TerminalKind::SingularApproach};
                return rec;
            }
            const Y y1 = advance(y, h, *k);
            const double tau1 = remaining <= 1.5 * cfg.step ? cfg.max_tau : tau + h;
            if (det.triggered(y1)) {
                finish_with_event(rec, y, tau, tau1, y1, p, det, cfg);
                return rec;
            }
            y = y1;
            tau = tau1;
            rec.samples.push_back(make_sample(tau, y, p));
        }
        rec.terminal = {TerminalKind::HorizonReached};
        return rec;
    }

    // Adaptive Dormand-Prince 5(4).
    constexpr double h_max = 5.0;
    constexpr double h_min = 1e-14;
    double h = std::min({1e-2, h_max, cfg.max_tau});
    while (tau < cfg.max_tau) {
        bool landing = false;
        if (tau + h >= cfg.max_tau) {
            h = cfg.max_tau - tau;
            landing = true;
        }
        const auto step = dp45_step(y, h, p, cfg);
        if (!step) {
            h *= 0.5;
            if (h < h_min) throw numerical_error("trajectory: step size underflow near singularity");
            continue;
        }
        if (step->error > 1.0) {
            const double fac = std::clamp(0.9 * std::pow(step->error, -0.2), 0.2, 1.0);
            h *= fac;
            if (h < h_min) throw numerical_error("trajectory: step size underflow");
            continue;
        }
        const double tau1 = landing ? cfg.max_tau : tau + h;
        if (det.triggered(step->y)) {
            finish_with_event(rec, y, tau, tau1, step->y, p, det, cfg);
            return rec;
        }
        y = step->y;
        tau = tau1;
        rec.samples.push_back(make_sample(tau, y, p));
        const double fac = step->error > 0.0
                               ? std::clamp(0.9 * std::pow(step->error, -0.2), 0.2, 5.0)
                               : 5.0;
        h = std::min(h * fac, h_max);
    }
    rec.terminal = {TerminalKind::HorizonReached};
    return rec;
}

TrajectoryRecord integrate_dimensional(const EconState& s0, const Params& p,
                                       double dt, std::size_t n_steps) {
    validate(s0);
    if (!(s0.trust < 1.0)) throw std::domain_error("trajectory: initial trust must be < 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("trajectory: dt must be > 0");
    if (!(p.a_tilde > 0.0) || !(p.k >= 0.0))
        throw std::domain_error("trajectory: need a_tilde > 0 and k >= 0");

    TrajectoryRecord rec;
    double lnA = std::log(s0.assets);
    double L = s0.leverage;
    double T = s0.trust;
    rec.samples.push_back(make_sample(0.0, {lnA, L, T}, p));

    for (std::size_t i = 1; i <= n_steps; ++i) {
        lnA += p.k * roa(T, L, p) * dt;
        const auto [L1, T1] = discrete_euler_step(L, T, p, dt);
        if (L1 < 0.0 || L1 > 1.0) {
            rec.terminal = {TerminalKind::ExitedLeverageDomain};
            return rec;
        }
        if (!(T1 < 1.0) || T1 < 0.0 || L1 == 1.0) {
            rec.terminal = {TerminalKind::SingularApproach};
            return rec;
        }
        L = L1;
        T = T1;
        rec.samples.push_back(make_sample(p.k * dt * static_cast<double>(i), {lnA, L, T}, p));
    }
    rec.terminal = {TerminalKind::HorizonReached};
    return rec;
}

}  // namespace alt
