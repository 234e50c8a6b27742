#include "sectorcast/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "sectorcast/text.hpp"

namespace sectorcast {

const char* const kCsvHeader = "date,open,high,low,close,adj_close,volume";

bool bar_is_valid(const Bar& bar) {
    const double lo = bar.low;
    const double hi = bar.high;
    if (!(lo > 0.0 && hi > 0.0 && bar.open > 0.0 && bar.close > 0.0)) return false;
    if (bar.adj_close && !(*bar.adj_close > 0.0)) return false;
    if (lo > hi) return false;
    if (bar.open < lo || bar.open > hi) return false;
    if (bar.close < lo || bar.close > hi) return false;
    return true;
}

void validate_universe(const UniverseConfig& universe) {
    if (universe.sectors.empty()) throw ConfigInvalid("universe declares no sectors");
    std::set<std::string> names;
    for (const auto& sector : universe.sectors) {
        if (sector.name.empty()) throw ConfigInvalid("sector with empty name");
        if (!names.insert(sector.name).second)
            throw ConfigInvalid("duplicate sector name '" + sector.name + "'");
        if (sector.tickers.empty() || sector.tickers.size() > 10)
            throw ConfigInvalid("sector '" + sector.name + "' must hold 1..10 tickers");
        for (const auto& t : sector.tickers) {
            if (t.symbol.empty())
                throw ConfigInvalid("empty ticker symbol in sector '" + sector.name + "'");
            if (t.index_weight && (*t.index_weight < 0.0 || *t.index_weight > 100.0))
                throw ConfigInvalid("index weight out of [0,100] for " + t.symbol);
        }
    }
    if (!(universe.start_date < universe.split_date && universe.split_date <= universe.end_date))
        throw ConfigInvalid("require start_date < split_date <= end_date");
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t begin = 0;
    while (true) {
        std::size_t comma = line.find(',', begin);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(begin));
            break;
        }
        fields.push_back(line.substr(begin, comma - begin));
        begin = comma + 1;
    }
    return fields;
}

bool parse_price(std::string_view s, double& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_volume(std::string_view s, std::uint64_t& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

// Shortest round-trip decimal form, no exponent surprises for price data.
std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

PriceSeries parse_bars(const std::string& csv_text, const std::string& ticker,
                       std::size_t* dropped_rows) {
    std::size_t dropped = 0;
    std::istringstream in(csv_text);
    std::string line;

    if (!std::getline(in, line)) throw MalformedHeader("empty input for " + ticker);
    if (strip_cr(line) != kCsvHeader)
        throw MalformedHeader("expected '" + std::string(kCsvHeader) + "', got '" + line + "'");

    PriceSeries series;
    series.ticker = ticker;
    while (std::getline(in, line)) {
        std::string_view row = strip_cr(line);
        if (row.empty()) continue;
        auto fields = split_fields(row);
        if (fields.size() != 7) {
            ++dropped;
            continue;
        }
        Bar bar;
        auto date = parse_date(fields[0]);
        bool ok = date.has_value() && parse_price(fields[1], bar.open) &&
                  parse_price(fields[2], bar.high) && parse_price(fields[3], bar.low) &&
                  parse_price(fields[4], bar.close) && parse_volume(fields[6], bar.volume);
        if (ok && !fields[5].empty()) {
            double adj = 0.0;
            ok = parse_price(fields[5], adj);
            bar.adj_close = adj;
        }
        if (ok) {
            bar.date = *date;
            ok = bar_is_valid(bar);
        }
        if (!ok) {
            ++dropped;
            continue;
        }
        series.bars.push_back(bar);
    }
    if (dropped_rows) *dropped_rows = dropped;

    if (series.bars.empty()) throw EmptySeries("no valid rows for " + ticker);

    std::stable_sort(series.bars.begin(), series.bars.end(),
                     [](const Bar& a, const Bar& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < series.bars.size(); ++i) {
        if (series.bars[i].date == series.bars[i - 1].date)
            throw DuplicateDate(ticker + " has duplicate bar " + to_string(series.bars[i].date));
    }
    return series;
}

std::string serialize_bars(const PriceSeries& series) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const Bar& bar : series.bars) {
        out += to_string(bar.date);
        out += ',';
        out += format_double(bar.open);
        out += ',';
        out += format_double(bar.high);
        out += ',';
        out += format_double(bar.low);
        out += ',';
        out += format_double(bar.close);
        out += ',';
        if (bar.adj_close) out += format_double(*bar.adj_close);
        out += ',';
        out += std::to_string(bar.volume);
        out += '\n';
    }
    return out;
}

PriceSeries slice_range(const PriceSeries& series, const Date& start, const Date& end) {
    PriceSeries out;
    out.ticker = series.ticker;
    for (const Bar& bar : series.bars) {
        if (bar.date >= start && bar.date <= end) out.bars.push_back(bar);
    }
    if (out.bars.empty())
        throw EmptySeries(series.ticker + " has no bars in [" + to_string(start) + ", " +
                          to_string(end) + "]");
    return out;
}

std::vector<DatedValue> closes_of(const PriceSeries& series) {
    std::vector<DatedValue> out;
    out.reserve(series.bars.size());
    for (const Bar& bar : series.bars) out.push_back({bar.date, bar.close});
    return out;
}

double mean_close(const PriceSeries& series) {
    if (series.bars.empty()) throw EmptySeries("mean_close over empty series");
    double sum = 0.0;
    for (const Bar& bar : series.bars) sum += bar.close;
    return sum / static_cast<double>(series.bars.size());
}

std::string DirectoryFeedClient::fetch_csv(const std::string& ticker, const Date&,
                                           const Date&) const {
    const std::string path = directory_ + "/" + ticker + ".csv";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FeedUnavailable("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw FeedUnavailable("read failure on " + path);
    return buf.str();
}

PriceSeries fetch_daily(const DataFeedClient& client, const std::string& ticker,
                        const Date& start, const Date& end, std::size_t* dropped_rows) {
    const std::string payload = client.fetch_csv(ticker, start, end);
    PriceSeries parsed = parse_bars(payload, ticker, dropped_rows);
    return slice_range(parsed, start, end);
}

}  // namespace sectorcast
