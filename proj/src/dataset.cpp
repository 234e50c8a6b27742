#include "sectorcast/dataset.hpp"

#include <algorithm>
#include <charconv>

namespace sectorcast {

const std::vector<std::string> kAllFeatures = {"open", "high", "low", "close", "volume"};

Eigen::Index ScalerParams::index_of(const std::string& feature) const {
    auto it = std::find(feature_names.begin(), feature_names.end(), feature);
    if (it == feature_names.end())
        throw ScalerMismatch("scaler has no feature '" + feature + "'");
    return static_cast<Eigen::Index>(it - feature_names.begin());
}

namespace {

double bar_feature(const Bar& bar, const std::string& name) {
    if (name == "open") return bar.open;
    if (name == "high") return bar.high;
    if (name == "low") return bar.low;
    if (name == "close") return bar.close;
    if (name == "volume") return static_cast<double>(bar.volume);
    throw ConfigInvalid("unknown feature '" + name + "'");
}

void require_close(const std::vector<std::string>& features) {
    if (std::find(features.begin(), features.end(), "close") == features.end())
        throw ConfigInvalid("feature list must contain 'close' (the prediction target)");
}

}  // namespace

Eigen::MatrixXd feature_matrix(const PriceSeries& series,
                               const std::vector<std::string>& features) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(series.bars.size()),
                      static_cast<Eigen::Index>(features.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const Bar& bar = series.bars[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(r, c) = bar_feature(bar, features[static_cast<std::size_t>(c)]);
    }
    return m;
}

std::pair<PriceSeries, PriceSeries> chronological_split(const PriceSeries& series,
                                                        const SplitSpec& spec) {
    PriceSeries train, test;
    train.ticker = series.ticker;
    test.ticker = series.ticker;
    for (const Bar& bar : series.bars) {
        if (bar.date < spec.split_date)
            train.bars.push_back(bar);
        else
            test.bars.push_back(bar);
    }
    if (train.bars.empty())
        throw SplitOutOfRange("split " + to_string(spec.split_date) + " precedes all bars of " +
                              series.ticker);
    if (test.bars.empty())
        throw SplitOutOfRange("split " + to_string(spec.split_date) + " follows all bars of " +
                              series.ticker);
    return {std::move(train), std::move(test)};
}

PriceSeries test_with_context(const PriceSeries& train, const PriceSeries& test, int lookback) {
    PriceSeries out;
    out.ticker = test.ticker;
    const std::size_t context =
        std::min(train.bars.size(), static_cast<std::size_t>(std::max(lookback, 0)));
    out.bars.assign(train.bars.end() - static_cast<std::ptrdiff_t>(context), train.bars.end());
    out.bars.insert(out.bars.end(), test.bars.begin(), test.bars.end());
    return out;
}

ScalerParams fit_scaler(const PriceSeries& train, const std::vector<std::string>& features) {
    if (train.bars.empty()) throw EmptySeries("fit_scaler over empty series");
    require_close(features);
    const Eigen::MatrixXd m = feature_matrix(train, features);
    ScalerParams scaler;
    scaler.feature_names = features;
    scaler.min = m.colwise().minCoeff();
    scaler.max = m.colwise().maxCoeff();
    for (Eigen::Index c = 0; c < scaler.min.size(); ++c) {
        if (!(scaler.max(c) > scaler.min(c)))
            throw DegenerateRange("feature '" + features[static_cast<std::size_t>(c)] +
                                  "' is constant on the training range");
    }
    return scaler;
}

Eigen::VectorXd scale(const Eigen::VectorXd& values, const ScalerParams& scaler) {
    if (values.size() != scaler.feature_count())
        throw ScalerMismatch("value/feature count mismatch");
    return (values - scaler.min).cwiseQuotient(scaler.max - scaler.min);
}

Eigen::VectorXd inverse_scale(const Eigen::VectorXd& scaled, const ScalerParams& scaler) {
    if (scaled.size() != scaler.feature_count())
        throw ScalerMismatch("value/feature count mismatch");
    return scaled.cwiseProduct(scaler.max - scaler.min) + scaler.min;
}

double scale_close(double value, const ScalerParams& scaler) {
    const Eigen::Index c = scaler.index_of("close");
    return (value - scaler.min(c)) / (scaler.max(c) - scaler.min(c));
}

double inverse_scale_close(double scaled, const ScalerParams& scaler) {
    const Eigen::Index c = scaler.index_of("close");
    return scaled * (scaler.max(c) - scaler.min(c)) + scaler.min(c);
}

WindowedDataset make_windows(const PriceSeries& series, const ScalerParams& scaler,
                             int lookback, int horizon,
                             const std::vector<std::string>& features) {
    if (lookback < 1 || horizon < 1) throw ConfigInvalid("lookback and horizon must be >= 1");
    if (features != scaler.feature_names)
        throw ScalerMismatch("feature list differs from the fitted scaler");
    const auto n = static_cast<std::ptrdiff_t>(series.bars.size());
    if (n < lookback + horizon)
        throw InsufficientData(series.ticker + ": " + std::to_string(n) + " bars < lookback " +
                               std::to_string(lookback) + " + horizon " + std::to_string(horizon));

    Eigen::MatrixXd raw = feature_matrix(series, features);
    Eigen::MatrixXd scaled(raw.rows(), raw.cols());
    for (Eigen::Index c = 0; c < raw.cols(); ++c)
        scaled.col(c) = (raw.col(c).array() - scaler.min(c)) / (scaler.max(c) - scaler.min(c));

    const Eigen::Index close_col = scaler.index_of("close");
    const std::ptrdiff_t count = n - lookback - horizon + 1;

    WindowedDataset out;
    out.lookback = lookback;
    out.horizon = horizon;
    out.feature_names = features;
    out.scaler = scaler;
    out.inputs.reserve(static_cast<std::size_t>(count));
    out.targets.reserve(static_cast<std::size_t>(count));
    out.target_dates.reserve(static_cast<std::size_t>(count));
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        out.inputs.push_back(scaled.middleRows(i, lookback));
        const std::ptrdiff_t target_row = i + lookback + horizon - 1;
        out.targets.push_back(scaled(target_row, close_col));
        out.target_dates.push_back(series.bars[static_cast<std::size_t>(target_row)].date);
    }
    return out;
}

std::string dump_windows(const WindowedDataset& dataset) {
    std::string out = "target_date,target";
    for (int t = 0; t < dataset.lookback; ++t)
        for (std::size_t f = 0; f < dataset.feature_names.size(); ++f)
            out += ",f" + std::to_string(f) + "_t" + std::to_string(t);
    out += '\n';
    char buf[32];
    auto append_double = [&](double v) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        (void)ec;
        out.append(buf, ptr);
    };
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        out += to_string(dataset.target_dates[i]);
        out += ',';
        append_double(dataset.targets[i]);
        for (Eigen::Index t = 0; t < dataset.inputs[i].rows(); ++t) {
            for (Eigen::Index f = 0; f < dataset.inputs[i].cols(); ++f) {
                out += ',';
                append_double(dataset.inputs[i](t, f));
            }
        }
        out += '\n';
    }
    return out;
}

}  // namespace sectorcast
