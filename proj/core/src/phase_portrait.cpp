#include "alt/phase_portrait.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace alt {

namespace {

const std::array<RegimePreset, 3> kPresets = {{
    {"regular", {0.05, 0.06, 0.04, 0.05}},
    {"crisis", {0.05, -0.01, 0.04, 0.05}},
    {"stagnation", {0.05, 0.0, 0.0, 0.05}},
}};

BasinCell label_terminal(const TrajectoryRecord& rec,
                         const std::optional<DerivedParams>& d, double guard_eps) {
    switch (rec.terminal.kind) {
        case TerminalKind::ConvergedToDiagonal: return {BasinLabel::Diagonal};
        case TerminalKind::ConvergedToPoint: return {BasinLabel::Point};
        case TerminalKind::ExitedLeverageDomain: return {BasinLabel::Exit};
        case TerminalKind::SingularApproach:
        case TerminalKind::HorizonReached: break;
    }
    const TrajectorySample& last = rec.samples.back();
    if (rec.terminal.kind == TerminalKind::SingularApproach &&
        1.0 - last.leverage <= 2.0 * guard_eps)
        return {BasinLabel::Exit};
    // Fallback: label by the nearest terminal set, flagged low-confidence.
    const double d_diag = std::fabs(last.trust - last.leverage) / std::sqrt(2.0);
    const double d_exit = std::min(last.leverage, 1.0 - last.leverage);
    double d_point = std::numeric_limits<double>::infinity();
    if (d && d->L0 >= 0.0 && d->L0 <= 1.0)
        d_point = std::hypot(1.0 - last.trust, last.leverage - d->L0);
    BasinLabel label = BasinLabel::Diagonal;
    double best = d_diag;
    if (d_point < best) { best = d_point; label = BasinLabel::Point; }
    if (d_exit < best) { label = BasinLabel::Exit; }
    return {label, true};
}

}  // namespace

std::span<const RegimePreset> regime_presets() { return kPresets; }

std::optional<Params> preset_by_name(std::string_view name) {
    for (const auto& preset : kPresets)
        if (preset.name == name) return preset.params;
    return std::nullopt;
}

void validate(const GridSpec& g) {
    if (g.n_leverage < 2 || g.n_trust < 2)
        throw std::invalid_argument("phase_portrait: grid resolutions must be >= 2");
    if (!(g.margin > 0.0) || !(g.margin < 0.1))
        throw std::invalid_argument("phase_portrait: margin must lie in (0, 0.1)");
}

std::vector<double> grid_axis(std::size_t n) {
    std::vector<double> axis(n);
    for (std::size_t i = 0; i < n; ++i)
        axis[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    return axis;
}

const char* to_string(BasinLabel label) {
    switch (label) {
        case BasinLabel::Diagonal: return "diagonal";
        case BasinLabel::Point: return "point";
        case BasinLabel::Exit: return "exit";
    }
    return "unknown";
}

RoaField roa_field(const Params& p, const GridSpec& grid) {
    validate(grid);
    validate(p);
    RoaField field;
    field.grid = grid;
    field.leverage = grid_axis(grid.n_leverage);
    field.trust = grid_axis(grid.n_trust);
    field.values.resize(grid.n_leverage * grid.n_trust,
                        std::numeric_limits<double>::quiet_NaN());
    for (std::size_t it = 0; it < grid.n_trust; ++it) {
        const double T = field.trust[it];
        if (T >= 1.0 - grid.margin) continue;
        for (std::size_t il = 0; il < grid.n_leverage; ++il)
            field.values[it * grid.n_leverage + il] = roa(T, field.leverage[il], p);
    }
    return field;
}

BasinMap basin_map(const Params& p, const GridSpec& grid, const IntegratorConfig& cfg,
                   unsigned n_threads) {
    validate(grid);
    validate(cfg);
    validate(p);
    BasinMap map;
    map.grid = grid;
    map.leverage = grid_axis(grid.n_leverage);
    map.trust = grid_axis(grid.n_trust);
    map.cells.resize(grid.n_leverage * grid.n_trust);

    std::optional<DerivedParams> d;
    if (p.r_tilde + p.a_tilde != 0.0) d = derive(p);

    // Nearest-terminal fallback from a bare state, for nodes whose
    // integration failed; always low-confidence.
    auto label_from_state = [&](double T, double L) {
        const double d_diag = std::fabs(T - L) / std::sqrt(2.0);
        const double d_exit = std::min(L, 1.0 - L);
        double d_point = std::numeric_limits<double>::infinity();
        if (d && d->L0 >= 0.0 && d->L0 <= 1.0) d_point = std::hypot(1.0 - T, L - d->L0);
        BasinLabel label = BasinLabel::Diagonal;
        double best = d_diag;
        if (d_point < best) { best = d_point; label = BasinLabel::Point; }
        if (d_exit < best) label = BasinLabel::Exit;
        return BasinCell{label, true};
    };

    auto work_row = [&](std::size_t it) {
        const double T = map.trust[it];
        if (T >= 1.0 - grid.margin) return;
        for (std::size_t il = 0; il < grid.n_leverage; ++il) {
            const double L = map.leverage[il];
            if (L >= 1.0 - grid.margin) continue;
            auto& cell = map.cells[it * grid.n_leverage + il];
            if (T == L) {
                cell = BasinCell{BasinLabel::Diagonal};
                continue;
            }
            try {
                const TrajectoryRecord rec = integrate({1.0, L, T}, p, cfg);
                cell = label_terminal(rec, d, cfg.guard_eps);
            } catch (const std::exception&) {
                cell = label_from_state(T, L);
            }
        }
    };

    unsigned workers = n_threads != 0 ? n_threads : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, grid.n_trust));
    if (workers == 1) {
        for (std::size_t it = 0; it < grid.n_trust; ++it) work_row(it);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t it = w; it < grid.n_trust; it += workers) work_row(it);
            });
        }
        for (auto& t : pool) t.join();
    }
    return map;
}

std::vector<TrajectoryRecord> trajectory_bundle(const Params& p,
                                                std::span<const EconState> seeds,
                                                const IntegratorConfig& cfg) {
    std::vector<TrajectoryRecord> out;
    out.reserve(seeds.size());
    for (const EconState& s : seeds) out.push_back(integrate(s, p, cfg));
    return out;
}

}  // namespace alt
