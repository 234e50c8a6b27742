#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sectorcast/dataset.hpp"
#include "test_util.hpp"

using namespace sectorcast;
using namespace sectorcast::testutil;

namespace {

std::vector<double> ramp(int n, double start = 100.0, double step = 1.0) {
    std::vector<double> closes(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) closes[static_cast<std::size_t>(i)] = start + step * i;
    return closes;
}

}  // namespace

TEST_CASE("chronological_split fails outside the series span") {
    const auto series = make_series("X", d(2020, 1, 10), ramp(30));
    CHECK_THROWS_AS(chronological_split(series, {d(2020, 1, 1), 0.1}), SplitOutOfRange);
    CHECK_THROWS_AS(chronological_split(series, {d(2021, 1, 1), 0.1}), SplitOutOfRange);
    // split at the first bar leaves an empty train side
    CHECK_THROWS_AS(chronological_split(series, {series.first_date(), 0.1}), SplitOutOfRange);
}

TEST_CASE("chronological_split partitions a 100-bar fixture at bar 80") {
    const auto series = make_series("X", d(2019, 1, 1), ramp(100));
    const Date split = series.bars[80].date;
    const auto [train, test] = chronological_split(series, {split, 0.1});
    CHECK(train.size() == 80);
    CHECK(test.size() == 20);
    // partition oracle: concatenation restores the original
    PriceSeries young = train;
    young.bars.insert(young.bars.end(), test.bars.begin(), test.bars.end());
    CHECK(young.bars == series.bars);
    for (const Bar& bar : train.bars) CHECK(bar.date < split);
    for (const Bar& bar : test.bars) CHECK_FALSE(bar.date < split);
}

TEST_CASE("test_with_context prefixes the final lookback training bars") {
    const auto series = make_series("X", d(2019, 1, 1), ramp(60));
    const auto [train, test] = chronological_split(series, {series.bars[40].date, 0.1});
    const auto context = test_with_context(train, test, 10);
    CHECK(context.size() == 30);
    CHECK(context.bars[0] == train.bars[30]);
    CHECK(context.bars[10] == test.bars[0]);
}

TEST_CASE("fit_scaler finds per-feature extrema") {
    const auto series = make_series("X", d(2020, 1, 1), {10, 20});
    const auto scaler = fit_scaler(series, {"close"});
    CHECK(scaler.min(0) == 10);
    CHECK(scaler.max(0) == 20);
}

TEST_CASE("fit_scaler rejects a constant column") {
    const auto series = make_series("X", d(2020, 1, 1), {10, 10, 10});
    CHECK_THROWS_AS(fit_scaler(series, {"close"}), DegenerateRange);
}

TEST_CASE("fit_scaler requires close among the features") {
    const auto series = make_series("X", d(2020, 1, 1), {10, 20});
    CHECK_THROWS_AS(fit_scaler(series, {"open", "high"}), ConfigInvalid);
}

TEST_CASE("multi-feature scaler matches a columnwise scan oracle") {
    PriceSeries series;
    series.ticker = "X";
    std::mt19937_64 rng(13);
    Date date = d(2020, 1, 1);
    for (int i = 0; i < 40; ++i) {
        Bar bar;
        bar.date = date;
        bar.low = 10.0 + static_cast<double>(rng() % 100);
        bar.high = bar.low + 1.0 + static_cast<double>(rng() % 50);
        bar.open = bar.low + 0.25;
        bar.close = bar.high - 0.25;
        bar.volume = 100 + rng() % 100000;
        series.bars.push_back(bar);
        date = next_day(date);
    }
    const std::vector<std::string> features = {"open", "high", "low", "close", "volume"};
    const auto scaler = fit_scaler(series, features);
    const Eigen::MatrixXd m = feature_matrix(series, features);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        double lo = m(0, c), hi = m(0, c);
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            lo = std::min(lo, m(r, c));
            hi = std::max(hi, m(r, c));
        }
        CHECK(scaler.min(c) == lo);
        CHECK(scaler.max(c) == hi);
    }
}

TEST_CASE("scale maps the midpoint to one half and passes out-of-range through") {
    ScalerParams scaler;
    scaler.feature_names = {"close"};
    scaler.min = Eigen::VectorXd::Constant(1, 10.0);
    scaler.max = Eigen::VectorXd::Constant(1, 20.0);
    CHECK(scale(Eigen::VectorXd::Constant(1, 15.0), scaler)(0) == doctest::Approx(0.5));
    CHECK(scale(Eigen::VectorXd::Constant(1, 25.0), scaler)(0) == doctest::Approx(1.5));
    CHECK(scale_close(15.0, scaler) == doctest::Approx(0.5));
}

TEST_CASE("scale and inverse_scale round-trip within 1e-12 relative") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> value(-1000.0, 1000.0);
    ScalerParams scaler;
    scaler.feature_names = {"a", "b", "c"};
    scaler.min = Eigen::Vector3d(-5.0, 100.0, 0.25);
    scaler.max = Eigen::Vector3d(5.0, 900.0, 0.75);
    for (int round = 0; round < 200; ++round) {
        Eigen::VectorXd x(3);
        for (int i = 0; i < 3; ++i) x(i) = value(rng);
        const Eigen::VectorXd back = inverse_scale(scale(x, scaler), scaler);
        for (int i = 0; i < 3; ++i)
            CHECK(back(i) == doctest::Approx(x(i)).epsilon(1e-12));
    }
}

TEST_CASE("make_windows counts windows by the closed formula") {
    const auto series = make_series("X", d(2019, 1, 1), ramp(60));
    const auto scaler = fit_scaler(series, {"close"});
    const auto windows = make_windows(series, scaler, 50, 1, {"close"});
    CHECK(windows.size() == 10);
    CHECK(windows.inputs[0].rows() == 50);
    CHECK(windows.inputs[0].cols() == 1);
}

TEST_CASE("make_windows needs lookback + horizon bars") {
    const auto series = make_series("X", d(2019, 1, 1), ramp(50));
    const auto scaler = fit_scaler(series, {"close"});
    CHECK_THROWS_AS(make_windows(series, scaler, 50, 1, {"close"}), InsufficientData);
}

TEST_CASE("window targets follow the index arithmetic on a linear ramp") {
    const auto series = make_series("X", d(2019, 1, 1), ramp(55));
    const auto scaler = fit_scaler(series, {"close"});
    const auto windows = make_windows(series, scaler, 50, 1, {"close"});
    REQUIRE(windows.size() == 5);
    for (std::size_t i = 0; i < windows.size(); ++i) {
        // target i is the scaled close of bar i + 50 (0-based)
        const double expect = scale_close(series.bars[i + 50].close, scaler);
        CHECK(windows.targets[i] == doctest::Approx(expect).epsilon(1e-15));
        CHECK(windows.target_dates[i] == series.bars[i + 50].date);
    }
}

TEST_CASE("windows never look ahead of their target") {
    const auto series = make_series("X", d(2019, 1, 1), ramp(80));
    const auto scaler = fit_scaler(series, {"close"});
    for (int horizon : {1, 3}) {
        const auto windows = make_windows(series, scaler, 20, horizon, {"close"});
        for (std::size_t i = 0; i < windows.size(); ++i) {
            // every bar inside window i predates target i
            for (int r = 0; r < windows.lookback; ++r) {
                const Date bar_date = series.bars[i + static_cast<std::size_t>(r)].date;
                CHECK(bar_date < windows.target_dates[i]);
            }
        }
    }
}

TEST_CASE("scaled training data stays in [0,1]") {
    std::mt19937_64 rng(11);
    std::vector<double> closes;
    for (int i = 0; i < 70; ++i) closes.push_back(50.0 + static_cast<double>(rng() % 500));
    const auto series = make_series("X", d(2018, 1, 1), closes);
    const auto scaler = fit_scaler(series, {"close"});
    const auto windows = make_windows(series, scaler, 10, 1, {"close"});
    for (const auto& w : windows.inputs) {
        CHECK(w.minCoeff() >= 0.0);
        CHECK(w.maxCoeff() <= 1.0);
    }
    for (double t : windows.targets) {
        CHECK(t >= 0.0);
        CHECK(t <= 1.0);
    }
}

TEST_CASE("scaler fitted on train ignores test contents") {
    const auto series = make_series("X", d(2019, 1, 1), ramp(100));
    const auto [train, test] = chronological_split(series, {series.bars[80].date, 0.1});
    const auto scaler_a = fit_scaler(train, {"close"});
    // mutate the test side wildly; refit on train must be identical
    auto mutated = test;
    for (Bar& bar : mutated.bars) {
        bar.close *= 50.0;
        bar.high *= 50.0;
        bar.low *= 50.0;
        bar.open *= 50.0;
    }
    const auto scaler_b = fit_scaler(train, {"close"});
    CHECK(scaler_a == scaler_b);
}

TEST_CASE("window dump round-trips the header shape") {
    const auto series = make_series("X", d(2019, 1, 1), ramp(25));
    const auto scaler = fit_scaler(series, {"close"});
    const auto windows = make_windows(series, scaler, 20, 1, {"close"});
    const std::string dump = dump_windows(windows);
    CHECK(dump.rfind("target_date,target,f0_t0,", 0) == 0);
    CHECK(std::count(dump.begin(), dump.end(), '\n') ==
          static_cast<std::ptrdiff_t>(windows.size()) + 1);
}
