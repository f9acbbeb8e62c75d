#pragma once

#include <filesystem>
#include <iosfwd>

#include "alt/calibration.hpp"

namespace alt {

/// Parses a CSV with header `date,roe,rate` (ISO dates, decimal fractions per
/// year), sorts chronologically and validates: duplicate months, month gaps,
/// non-numeric or missing cells all fail with a row-numbered message
/// (std::invalid_argument).
ObservationSeries load_timeseries(const std::filesystem::path& path);
ObservationSeries read_timeseries(std::istream& in, const std::string& origin = "<stream>");

/// Writes `date,roe,rate` rows; floating point at 17 significant digits.
void write_timeseries(std::ostream& out, const ObservationSeries& obs);
void save_timeseries(const std::filesystem::path& path, const ObservationSeries& obs);

std::string format_date(const MonthStamp& d);

}  // namespace alt
