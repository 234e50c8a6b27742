#ifndef SECTORCAST_DATASET_HPP
#define SECTORCAST_DATASET_HPP

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "sectorcast/market_data.hpp"

namespace sectorcast {

// Per-feature min/max fitted on training data only. max > min strictly for
// every feature.
struct ScalerParams {
    std::vector<std::string> feature_names;
    Eigen::VectorXd min;
    Eigen::VectorXd max;

    Eigen::Index feature_count() const { return min.size(); }
    Eigen::Index index_of(const std::string& feature) const;

    bool operator==(const ScalerParams& other) const {
        return feature_names == other.feature_names && min == other.min && max == other.max;
    }
};

struct SplitSpec {
    Date split_date;
    double validation_fraction = 0.1;  // of training windows, in [0, 0.5]
};

// Scaled sliding windows paired with next-day targets. inputs[i] is a
// lookback x feature_count matrix; targets[i] is the scaled close of the
// bar `horizon` steps past the window.
struct WindowedDataset {
    std::vector<Eigen::MatrixXd> inputs;
    std::vector<double> targets;
    int lookback = 50;
    int horizon = 1;
    std::vector<std::string> feature_names;
    ScalerParams scaler;
    std::vector<Date> target_dates;

    std::size_t size() const { return inputs.size(); }
};

// Valid feature column names for fit_scaler/make_windows. The list must
// contain "close" (the prediction target).
extern const std::vector<std::string> kAllFeatures;

// Raw (unscaled) feature matrix, one row per bar, columns ordered as
// `features`. Throws ConfigInvalid on an unknown feature name.
Eigen::MatrixXd feature_matrix(const PriceSeries& series,
                               const std::vector<std::string>& features);

// train = bars with date < split_date; test = bars with date >= split_date.
// Throws SplitOutOfRange when either side would be empty.
std::pair<PriceSeries, PriceSeries> chronological_split(const PriceSeries& series,
                                                        const SplitSpec& spec);

// The test series preceded by the final `lookback` training bars, so the
// first test target has a full window of history.
PriceSeries test_with_context(const PriceSeries& train, const PriceSeries& test, int lookback);

// Per-feature extrema from TRAIN data only. Throws DegenerateRange on a
// constant column.
ScalerParams fit_scaler(const PriceSeries& train, const std::vector<std::string>& features);

// v -> (v - min) / (max - min), per feature. Out-of-range inputs pass
// through unclamped.
Eigen::VectorXd scale(const Eigen::VectorXd& values, const ScalerParams& scaler);
Eigen::VectorXd inverse_scale(const Eigen::VectorXd& scaled, const ScalerParams& scaler);

// Single-feature helpers for the close column.
double scale_close(double value, const ScalerParams& scaler);
double inverse_scale_close(double scaled, const ScalerParams& scaler);

// Window i holds scaled features for bars [i, i+lookback); target i is the
// scaled close of bar i+lookback+horizon-1. Window count is
// N - lookback - horizon + 1. Throws InsufficientData.
WindowedDataset make_windows(const PriceSeries& series, const ScalerParams& scaler,
                             int lookback, int horizon,
                             const std::vector<std::string>& features);

// Debug CSV dump: `target_date,target,f0_t0,...` (one window per record).
std::string dump_windows(const WindowedDataset& dataset);

}  // namespace sectorcast

#endif  // SECTORCAST_DATASET_HPP
