#include "sectorcast/metrics.hpp"

#include <cmath>

#include "sectorcast/lstm.hpp"

namespace sectorcast {

double mae(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size())
        throw LengthMismatch(std::to_string(actual.size()) + " vs " +
                             std::to_string(predicted.size()));
    if (actual.empty()) throw Empty("mae over empty series");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) sum += std::abs(actual[i] - predicted[i]);
    return sum / static_cast<double>(actual.size());
}

double test_huber(std::span<const double> actual_scaled, std::span<const double> predicted_scaled,
                  double delta) {
    if (actual_scaled.size() != predicted_scaled.size())
        throw LengthMismatch(std::to_string(actual_scaled.size()) + " vs " +
                             std::to_string(predicted_scaled.size()));
    if (actual_scaled.empty()) throw Empty("huber over empty series");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual_scaled.size(); ++i)
        sum += huber_loss(predicted_scaled[i], actual_scaled[i], delta);
    return sum / static_cast<double>(actual_scaled.size());
}

double accuracy_score(std::span<const DatedValue> actual,
                      std::span<const DatedValue> predicted_for_next) {
    if (actual.size() < 2) throw TooShort("need at least 2 trading days");
    if (predicted_for_next.size() != actual.size() - 1)
        throw Misaligned("expected one prediction per day after the first");
    std::size_t correct = 0;
    for (std::size_t t = 0; t + 1 < actual.size(); ++t) {
        if (predicted_for_next[t].date != actual[t + 1].date)
            throw Misaligned("prediction dated " + to_string(predicted_for_next[t].date) +
                             " does not target " + to_string(actual[t + 1].date));
        const bool predicted_up = predicted_for_next[t].value > actual[t].value;
        const bool moved_up = actual[t + 1].value > actual[t].value;
        if (predicted_up == moved_up) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(actual.size() - 1);
}

}  // namespace sectorcast
