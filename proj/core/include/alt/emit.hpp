#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "alt/calibration.hpp"
#include "alt/phase_portrait.hpp"
#include "alt/scenario.hpp"
#include "alt/stability.hpp"
#include "alt/trajectory.hpp"

// CSV and JSON emission for every module's external format. All floating
// point goes out at 17 significant digits so runs can be compared across
// implementations byte for byte.

namespace alt {

std::string fmt17(double v);

/// `tau,A,L,T,rA,rE`, one row per accepted step.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec);

/// Terminal status sidecar.
nlohmann::json terminal_json(const TerminalEvent& ev);

/// `L,T,rA`; masked nodes emit rA = nan.
void write_roa_field_csv(std::ostream& out, const RoaField& field);

/// `L,T,label,confidence`; nodes inside the margin band are omitted.
void write_basin_csv(std::ostream& out, const BasinMap& map);

/// `T,L` sampled closed-form curve.
void write_curve_csv(std::ostream& out, std::span<const double> trust,
                     std::span<const double> leverage);

/// Scenario path: trajectory columns plus the active segment index.
void write_scenario_csv(std::ostream& out, const ScenarioResult& result);

/// `intervention_tau,stationary_rA,crisis_duration,lnA_at_horizon`.
void write_sweep_summary_csv(std::ostream& out, std::span<const SweepEntry> entries);

nlohmann::json fixed_point_json(const FixedPointReport& report);
nlohmann::json stability_report_json(const Params& p,
                                     std::span<const FixedPointReport> reports);

/// One row per retained draw; the state path is run-length encoded as e.g.
/// `1x12;2x5;1x30` (state `x` run length, chronological).
void write_draws_csv(std::ostream& out, const PosteriorDraws& draws);

std::string encode_states_rle(std::span<const Regime> states);
std::vector<Regime> decode_states_rle(const std::string& rle);

/// Long-format summary: `series,t,median,q10,...,q90`. Scalar parameters use
/// t = -1; the p_state2 series repeats the probability in every column.
void write_posterior_summary_csv(std::ostream& out, const PosteriorSummary& summary);

}  // namespace alt
