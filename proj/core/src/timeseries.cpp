#include "alt/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "alt/emit.hpp"

namespace alt {

namespace {

[[noreturn]] void fail(const std::string& origin, std::size_t row, const std::string& msg) {
    throw std::invalid_argument("timeseries: " + origin + " row " + std::to_string(row) +
                                ": " + msg);
}

std::string trim(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

MonthStamp parse_date(const std::string& s, const std::string& origin, std::size_t row) {
    MonthStamp d{};
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        fail(origin, row, "date '" + s + "' is not ISO YYYY-MM-DD");
    auto num = [&](std::size_t pos, std::size_t len, int& out) {
        const auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
        if (res.ec != std::errc() || res.ptr != s.data() + pos + len)
            fail(origin, row, "date '" + s + "' is not ISO YYYY-MM-DD");
    };
    num(0, 4, d.year);
    num(5, 2, d.month);
    num(8, 2, d.day);
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31)
        fail(origin, row, "date '" + s + "' out of range");
    return d;
}

double parse_number(const std::string& s, const std::string& origin, std::size_t row,
                    const char* column) {
    if (s.empty()) fail(origin, row, std::string("missing value in column ") + column);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        fail(origin, row, "non-numeric cell '" + s + "' in column " + column);
    if (!std::isfinite(v))
        fail(origin, row, std::string("non-finite value in column ") + column);
    return v;
}

const char* kMonthNames[] = {"January", "February", "March",     "April",   "May",      "June",
                             "July",    "August",   "September", "October", "November", "December"};

std::string month_name(int year, int month0) {
    return std::string(kMonthNames[month0]) + " " + std::to_string(year);
}

}  // namespace

std::string format_date(const MonthStamp& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

ObservationSeries read_timeseries(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("timeseries: " + origin + ": empty file");
    {
        auto cols = split(line);
        if (cols.size() != 3 || cols[0] != "date" || cols[1] != "roe" || cols[2] != "rate")
            throw std::invalid_argument("timeseries: " + origin +
                                        ": header must be exactly 'date,roe,rate'");
    }

    struct Row {
        MonthStamp date;
        double roe;
        double rate;
        std::size_t line_no;
    };
    std::vector<Row> rows;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != 3)
            fail(origin, row_no, "expected 3 columns, found " + std::to_string(cells.size()));
        Row r;
        r.date = parse_date(cells[0], origin, row_no);
        r.roe = parse_number(cells[1], origin, row_no, "roe");
        r.rate = parse_number(cells[2], origin, row_no, "rate");
        r.line_no = row_no;
        rows.push_back(r);
    }
    if (rows.empty())
        throw std::invalid_argument("timeseries: " + origin + ": no data rows");

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.date.year * 12 + a.date.month < b.date.year * 12 + b.date.month;
    });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const int prev = rows[i - 1].date.year * 12 + (rows[i - 1].date.month - 1);
        const int curr = rows[i].date.year * 12 + (rows[i].date.month - 1);
        if (curr == prev)
            fail(origin, rows[i].line_no,
                 "duplicate month " + month_name(rows[i].date.year, rows[i].date.month - 1));
        if (curr != prev + 1) {
            const int missing = prev + 1;
            fail(origin, rows[i].line_no,
                 "gap in monthly series: missing " + month_name(missing / 12, missing % 12));
        }
    }

    ObservationSeries obs;
    obs.dates.reserve(rows.size());
    obs.roe.reserve(rows.size());
    obs.rate.reserve(rows.size());
    for (const Row& r : rows) {
        obs.dates.push_back(r.date);
        obs.roe.push_back(r.roe);
        obs.rate.push_back(r.rate);
    }
    return obs;
}

ObservationSeries load_timeseries(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("timeseries: cannot open '" + path.string() + "'");
    return read_timeseries(in, path.string());
}

void write_timeseries(std::ostream& out, const ObservationSeries& obs) {
    out << "date,roe,rate\n";
    for (std::size_t i = 0; i < obs.size(); ++i)
        out << format_date(obs.dates[i]) << ',' << fmt17(obs.roe[i]) << ','
            << fmt17(obs.rate[i]) << '\n';
}

void save_timeseries(const std::filesystem::path& path, const ObservationSeries& obs) {
    std::ofstream out(path);
    if (!out)
        throw std::invalid_argument("timeseries: cannot write '" + path.string() + "'");
    write_timeseries(out, obs);
}

}  // namespace alt
