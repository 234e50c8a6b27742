#ifndef SECTORCAST_METRICS_HPP
#define SECTORCAST_METRICS_HPP

#include <span>
#include <string>

#include "sectorcast/market_data.hpp"

namespace sectorcast {

// Out-of-sample quality of one trained model. huber_loss lives in the
// scaled domain, mae in currency units.
struct EvalReport {
    std::string ticker;
    double huber_loss = 0.0;
    double mae = 0.0;
    double accuracy_score = 0.0;  // fraction in [0,1]
    std::size_t n_samples = 0;
};

// Mean |actual - predicted|, currency units. Throws LengthMismatch, Empty.
double mae(std::span<const double> actual, std::span<const double> predicted);

// Mean per-sample Huber loss over scaled series. Throws LengthMismatch,
// Empty.
double test_huber(std::span<const double> actual_scaled, std::span<const double> predicted_scaled,
                  double delta);

// Fraction of days whose predicted move direction (vs. today's close)
// matches the realized one. Moves are classed Up when strictly positive,
// Down otherwise, mirroring the sell-on-equal trade rule. Alignment as in
// signals_from_predictions. Throws TooShort, Misaligned.
double accuracy_score(std::span<const DatedValue> actual,
                      std::span<const DatedValue> predicted_for_next);

}  // namespace sectorcast

#endif  // SECTORCAST_METRICS_HPP
