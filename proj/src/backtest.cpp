#include "sectorcast/backtest.hpp"

#include <charconv>
#include <cmath>

namespace sectorcast {

std::vector<Signal> signals_from_predictions(std::span<const DatedValue> actual,
                                             std::span<const DatedValue> predicted_for_next) {
    if (actual.size() < 2) throw TooShort("need at least 2 trading days");
    if (predicted_for_next.size() != actual.size() - 1)
        throw Misaligned("expected one prediction per day after the first");
    std::vector<Signal> signals;
    signals.reserve(predicted_for_next.size());
    for (std::size_t t = 0; t + 1 < actual.size(); ++t) {
        if (predicted_for_next[t].date != actual[t + 1].date)
            throw Misaligned("prediction dated " + to_string(predicted_for_next[t].date) +
                             " does not target " + to_string(actual[t + 1].date));
        const Action action =
            predicted_for_next[t].value > actual[t].value ? Action::kBuy : Action::kSell;
        signals.push_back({actual[t].date, action});
    }
    return signals;
}

ProfitSummary run_backtest(std::span<const DatedValue> actual, std::span<const Signal> signals,
                           const std::string& ticker) {
    if (actual.empty()) throw TooShort("empty price series");
    if (signals.size() + 1 != actual.size())
        throw SignalGap("expected " + std::to_string(actual.size() - 1) + " signals, got " +
                        std::to_string(signals.size()));
    ProfitSummary summary;
    summary.ticker = ticker;
    double price_sum = 0.0;
    for (const DatedValue& day : actual) price_sum += day.value;
    summary.mean_price = price_sum / static_cast<double>(actual.size());

    for (std::size_t t = 0; t + 1 < actual.size(); ++t) {
        if (signals[t].date != actual[t].date)
            throw Misaligned("signal dated " + to_string(signals[t].date) + " where " +
                             to_string(actual[t].date) + " was expected");
        const double move = actual[t + 1].value - actual[t].value;
        if (signals[t].action == Action::kBuy)
            summary.buy_profit += move;
        else
            summary.sell_profit += -move;
    }
    summary.total_profit = summary.buy_profit + summary.sell_profit;
    auto [ratio, display] = profitability_ratio(summary.total_profit, summary.mean_price);
    summary.ratio = ratio;
    summary.ratio_display = display;
    return summary;
}

double perfect_foresight_profit(std::span<const DatedValue> actual) {
    if (actual.size() < 2) throw TooShort("need at least 2 trading days");
    double total = 0.0;
    for (std::size_t t = 0; t + 1 < actual.size(); ++t)
        total += std::abs(actual[t + 1].value - actual[t].value);
    return total;
}

std::pair<double, long long> profitability_ratio(double total_profit, double mean_price) {
    if (!(mean_price > 0.0))
        throw NonPositiveMeanPrice("mean price " + std::to_string(mean_price));
    const double ratio = total_profit / mean_price;
    return {ratio, std::llround(ratio)};
}

std::string ledger_csv(std::span<const DatedValue> actual, std::span<const Signal> signals) {
    if (!actual.empty() && signals.size() + 1 != actual.size())
        throw SignalGap("ledger requires one signal per day but the last");
    std::string out = "date,action,actual_close,next_close,trade_profit\n";
    char buf[32];
    auto append_double = [&](double v) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        (void)ec;
        out.append(buf, ptr);
    };
    for (std::size_t t = 0; t + 1 < actual.size(); ++t) {
        const double move = actual[t + 1].value - actual[t].value;
        const bool buy = signals[t].action == Action::kBuy;
        out += to_string(signals[t].date);
        out += buy ? ",buy," : ",sell,";
        append_double(actual[t].value);
        out += ',';
        append_double(actual[t + 1].value);
        out += ',';
        append_double(buy ? move : -move);
        out += '\n';
    }
    return out;
}

}  // namespace sectorcast
