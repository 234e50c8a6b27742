#ifndef SECTORCAST_MARKET_DATA_HPP
#define SECTORCAST_MARKET_DATA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sectorcast/date.hpp"
#include "sectorcast/errors.hpp"

namespace sectorcast {

// One validated daily OHLCV bar. Prices are strictly positive and satisfy
// low <= open/close <= high.
struct Bar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    std::optional<double> adj_close;
    std::uint64_t volume = 0;

    bool operator==(const Bar&) const = default;
};

// Returns false if any Bar invariant is violated.
bool bar_is_valid(const Bar& bar);

// Date-ordered daily history for one ticker. Bars are strictly increasing
// by date and the series is non-empty once validated.
struct PriceSeries {
    std::string ticker;
    std::vector<Bar> bars;

    const Date& first_date() const { return bars.front().date; }
    const Date& last_date() const { return bars.back().date; }
    std::size_t size() const { return bars.size(); }

    bool operator==(const PriceSeries&) const = default;
};

// A (date, price) pair; the working currency of the backtest and metric
// stages.
struct DatedValue {
    Date date;
    double value = 0.0;

    bool operator==(const DatedValue&) const = default;
};

// The close column as dated values.
std::vector<DatedValue> closes_of(const PriceSeries& series);

struct TickerSpec {
    std::string symbol;      // exchange ticker, also the data file key
    std::string short_code;  // 3-letter code used in report rows
    std::optional<double> index_weight;  // percent, [0, 100]
};

struct SectorSpec {
    std::string name;
    std::vector<TickerSpec> tickers;  // 1..10 per sector
};

struct UniverseConfig {
    std::vector<SectorSpec> sectors;
    Date start_date;
    Date end_date;
    Date split_date;  // start_date < split_date <= end_date
};

// Throws ConfigInvalid when a TickerSpec/SectorSpec/UniverseConfig
// invariant is violated.
void validate_universe(const UniverseConfig& universe);

// Canonical CSV header, bit-exact: `date,open,high,low,close,adj_close,volume`.
extern const char* const kCsvHeader;

// Parses CSV text into a date-sorted series. Rows with a missing or
// unparsable required field, or failing Bar invariants, are dropped and
// counted in *dropped_rows (when non-null). adj_close may be empty.
// Throws MalformedHeader, DuplicateDate, EmptySeries.
PriceSeries parse_bars(const std::string& csv_text, const std::string& ticker,
                       std::size_t* dropped_rows = nullptr);

// Canonical serialization; parse_bars(serialize_bars(s)) == s.
std::string serialize_bars(const PriceSeries& series);

// Bars with start <= date <= end, order preserved. Throws EmptySeries when
// no bar falls in range.
PriceSeries slice_range(const PriceSeries& series, const Date& start, const Date& end);

// Arithmetic mean of close over the series. Throws EmptySeries.
double mean_close(const PriceSeries& series);

// Abstract daily-bars source. fetch_csv returns the raw CSV payload for
// (ticker, start, end) or throws FeedUnavailable on transport failure.
// Implementations must tolerate concurrent calls for distinct tickers.
class DataFeedClient {
public:
    virtual ~DataFeedClient() = default;
    virtual std::string fetch_csv(const std::string& ticker, const Date& start,
                                  const Date& end) const = 0;
};

// File-backed feed: serves `<dir>/<ticker>.csv`. A missing or unreadable
// file is a transport failure.
class DirectoryFeedClient : public DataFeedClient {
public:
    explicit DirectoryFeedClient(std::string directory) : directory_(std::move(directory)) {}
    std::string fetch_csv(const std::string& ticker, const Date& start,
                          const Date& end) const override;

private:
    std::string directory_;
};

// parse_bars over the client payload, then slice_range. Never called
// implicitly by any other operation.
PriceSeries fetch_daily(const DataFeedClient& client, const std::string& ticker,
                        const Date& start, const Date& end,
                        std::size_t* dropped_rows = nullptr);

}  // namespace sectorcast

#endif  // SECTORCAST_MARKET_DATA_HPP
