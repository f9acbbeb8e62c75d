#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "alt/model.hpp"
#include "alt/trajectory.hpp"

namespace alt {

// Shipped regime presets. The three cover the qualitatively distinct phase
// portraits: g > r (diagonal attractive everywhere), g < r with g < 0
// (attractive point inside the domain), and g = r = 0 (zero-growth diagonal).
struct RegimePreset {
    std::string_view name;
    Params params;
};

std::span<const RegimePreset> regime_presets();
std::optional<Params> preset_by_name(std::string_view name);

struct GridSpec {
    std::size_t n_leverage = 101;
    std::size_t n_trust = 101;
    double margin = 1e-3;  ///< exclusion band near T = 1 and L = 1
};

void validate(const GridSpec& g);

/// Node coordinates: i / (n - 1) over [0, 1] inclusive.
std::vector<double> grid_axis(std::size_t n);

struct RoaField {
    GridSpec grid;
    std::vector<double> leverage;  ///< axis values, size n_leverage
    std::vector<double> trust;     ///< axis values, size n_trust
    /// Row-major over (trust, leverage); NaN where T >= 1 - margin (masked).
    std::vector<double> values;
    double at(std::size_t i_trust, std::size_t i_leverage) const {
        return values[i_trust * leverage.size() + i_leverage];
    }
};

RoaField roa_field(const Params& p, const GridSpec& grid);

enum class BasinLabel : std::uint8_t { Diagonal, Point, Exit };

const char* to_string(BasinLabel label);

struct BasinCell {
    BasinLabel label;
    bool low_confidence = false;
};

struct BasinMap {
    GridSpec grid;
    std::vector<double> leverage;
    std::vector<double> trust;
    /// Row-major over (trust, leverage); nullopt inside the margin band.
    std::vector<std::optional<BasinCell>> cells;
    const std::optional<BasinCell>& at(std::size_t i_trust, std::size_t i_leverage) const {
        return cells[i_trust * leverage.size() + i_leverage];
    }
};

/// Integrates every unmasked node to its terminal event and labels the basin.
/// Nodes exactly on T = L are labeled Diagonal without integration. Cells are
/// independent; with n_threads == 0 a hardware-sized pool is used, and the
/// result is identical for any thread count.
BasinMap basin_map(const Params& p, const GridSpec& grid, const IntegratorConfig& cfg,
                   unsigned n_threads = 0);

std::vector<TrajectoryRecord> trajectory_bundle(const Params& p,
                                                std::span<const EconState> seeds,
                                                const IntegratorConfig& cfg);

}  // namespace alt
