#ifndef SECTORCAST_BACKTEST_HPP
#define SECTORCAST_BACKTEST_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sectorcast/market_data.hpp"

namespace sectorcast {

enum class Action { kBuy, kSell };

// One mandatory trade decision; one signal per trading day except the
// final day of the evaluated range.
struct Signal {
    Date date;
    Action action = Action::kSell;

    bool operator==(const Signal&) const = default;
};

struct ProfitSummary {
    std::string ticker;
    double buy_profit = 0.0;
    double sell_profit = 0.0;
    double total_profit = 0.0;  // == buy_profit + sell_profit exactly
    double mean_price = 0.0;
    double ratio = 0.0;              // total_profit / mean_price
    long long ratio_display = 0;     // round half away from zero
};

// predicted[t] is the prediction FOR day t+1, known at day t (it carries
// day t+1's date). Buy when it exceeds day t's close, Sell otherwise
// (equality sells). Throws TooShort (fewer than 2 actual days) and
// Misaligned (dates disagree).
std::vector<Signal> signals_from_predictions(std::span<const DatedValue> actual,
                                             std::span<const DatedValue> predicted_for_next);

// Unit-share trades, no costs: a Buy at day t earns actual[t+1]-actual[t],
// a Sell earns actual[t]-actual[t+1]. mean_price is the mean close over
// the same range. Throws SignalGap and Misaligned.
ProfitSummary run_backtest(std::span<const DatedValue> actual, std::span<const Signal> signals,
                           const std::string& ticker = {});

// Upper bound of any signal sequence: sum of |daily move|. Throws TooShort.
double perfect_foresight_profit(std::span<const DatedValue> actual);

// (ratio, display) = (total/mean, rounded half away from zero). Throws
// NonPositiveMeanPrice.
std::pair<double, long long> profitability_ratio(double total_profit, double mean_price);

// Audit trail: `date,action,actual_close,next_close,trade_profit`.
std::string ledger_csv(std::span<const DatedValue> actual, std::span<const Signal> signals);

}  // namespace sectorcast

#endif  // SECTORCAST_BACKTEST_HPP
