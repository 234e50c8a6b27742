#ifndef SECTORCAST_TEST_UTIL_HPP
#define SECTORCAST_TEST_UTIL_HPP

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sectorcast/market_data.hpp"

namespace sectorcast::testutil {

inline Date d(int y, int m, int day) { return Date{y, m, day}; }

inline Date next_day(Date date) {
    auto leap = [](int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; };
    static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int dim = lengths[date.month - 1];
    if (date.month == 2 && leap(date.year)) dim = 29;
    if (++date.day > dim) {
        date.day = 1;
        if (++date.month > 12) {
            date.month = 1;
            ++date.year;
        }
    }
    return date;
}

// Consecutive-day series with flat OHLC at each close value.
inline PriceSeries make_series(const std::string& ticker, Date start,
                               const std::vector<double>& closes) {
    PriceSeries series;
    series.ticker = ticker;
    Date date = start;
    for (double close : closes) {
        Bar bar;
        bar.date = date;
        bar.open = bar.high = bar.low = bar.close = close;
        bar.adj_close = close;
        bar.volume = 1000;
        series.bars.push_back(bar);
        date = next_day(date);
    }
    return series;
}

inline std::vector<DatedValue> dated(Date start, const std::vector<double>& values) {
    std::vector<DatedValue> out;
    Date date = start;
    for (double v : values) {
        out.push_back({date, v});
        date = next_day(date);
    }
    return out;
}

inline std::string fixture_path(const std::string& name) {
    return std::string(SECTORCAST_FIXTURE_DIR) + "/" + name;
}

// Fresh per-test scratch directory under the build tree.
inline std::string scratch_dir(const std::string& name) {
    const auto path = std::filesystem::temp_directory_path() / ("sectorcast_" + name);
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
    return path.string();
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace sectorcast::testutil

#endif  // SECTORCAST_TEST_UTIL_HPP
