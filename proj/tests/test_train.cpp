#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sectorcast/checkpoint.hpp"
#include "sectorcast/lstm.hpp"
#include "test_util.hpp"

using namespace sectorcast;
using namespace sectorcast::testutil;

namespace {

PriceSeries sine_series(int n, double period, double offset = 250.0, double amplitude = 100.0) {
    std::vector<double> closes(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
        closes[static_cast<std::size_t>(t)] =
            offset + amplitude * std::sin(2.0 * M_PI * t / period);
    return make_series("SINE", d(2015, 1, 1), closes);
}

ModelConfig small_train_config() {
    ModelConfig config;
    config.lookback = 20;
    config.feature_count = 1;
    config.lstm_units = 8;
    config.lstm_layers = 2;
    config.dense_units = 8;
    config.dropout_rate = 0.1;
    config.batch_size = 32;
    config.epochs = 4;
    config.learning_rate = 0.005;
    config.seed = 99;
    return config;
}

WindowedDataset constant_target_dataset(std::size_t n) {
    WindowedDataset ds;
    ds.lookback = 5;
    ds.horizon = 1;
    ds.feature_names = {"close"};
    ds.scaler.feature_names = {"close"};
    ds.scaler.min = Eigen::VectorXd::Constant(1, 0.0);
    ds.scaler.max = Eigen::VectorXd::Constant(1, 1.0);
    Rng rng(12);
    Date date = d(2020, 1, 1);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::MatrixXd w(5, 1);
        for (Eigen::Index r = 0; r < w.size(); ++r) w.data()[r] = uniform01(rng);
        ds.inputs.push_back(w);
        ds.targets.push_back(0.5);
        ds.target_dates.push_back(date);
        date = next_day(date);
    }
    return ds;
}

}  // namespace

TEST_CASE("training reduces the loss on a constant-target dataset") {
    auto config = small_train_config();
    config.lookback = 5;
    config.epochs = 5;
    config.dropout_rate = 0.0;
    const auto ds = constant_target_dataset(64);
    const auto result = train(ds, config, 0.1);
    REQUIRE(result.history.train_loss.size() == 5);
    CHECK(result.history.train_loss.back() < result.history.train_loss.front());
}

TEST_CASE("training twice with one seed is bit-identical") {
    const auto series = sine_series(120, 40.0);
    const auto scaler = fit_scaler(series, {"close"});
    const auto ds = make_windows(series, scaler, 20, 1, {"close"});
    auto config = small_train_config();
    config.epochs = 2;

    const auto a = train(ds, config, 0.1);
    const auto b = train(ds, config, 0.1);
    CHECK(a.history == b.history);
    CHECK(checkpoint_to_bytes({a.params, scaler, config.seed}) ==
          checkpoint_to_bytes({b.params, scaler, config.seed}));

    auto reseeded = config;
    reseeded.seed = 100;
    const auto c = train(ds, reseeded, 0.1);
    CHECK(a.history != c.history);
}

TEST_CASE("train rejects an empty or inconsistent dataset") {
    WindowedDataset empty;
    empty.feature_names = {"close"};
    empty.lookback = 5;
    auto config = small_train_config();
    config.lookback = 5;
    CHECK_THROWS_AS(train(empty, config, 0.1), EmptyDataset);

    const auto ds = constant_target_dataset(10);
    auto wrong = small_train_config();
    wrong.lookback = 9;  // dataset windows are 5 long
    CHECK_THROWS_AS(train(ds, wrong, 0.1), ShapeMismatch);
}

TEST_CASE("a small model learns a noiseless sine") {
    const auto series = sine_series(260, 40.0);
    const auto scaler = fit_scaler(series, {"close"});
    const auto ds = make_windows(series, scaler, 20, 1, {"close"});
    auto config = small_train_config();
    config.epochs = 15;
    const auto result = train(ds, config, 0.1);
    CHECK(result.history.val_mae.back() < 0.08);
    CHECK(result.history.val_mae.back() < result.history.val_mae.front());
}

TEST_CASE("predict_series aligns with target dates and inverts the scaler") {
    const auto series = sine_series(140, 40.0);
    const auto scaler = fit_scaler(series, {"close"});
    const auto ds = make_windows(series, scaler, 20, 1, {"close"});
    auto config = small_train_config();
    config.epochs = 1;
    const auto result = train(ds, config, 0.1);

    const auto predictions = predict_series(result.params, ds);
    REQUIRE(predictions.size() == ds.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        CHECK(predictions[i].date == ds.target_dates[i]);
        CHECK(predictions[i].scaled > 0.0);
        CHECK(predictions[i].scaled < 1.0);
        CHECK(predictions[i].price ==
              doctest::Approx(inverse_scale_close(predictions[i].scaled, scaler))
                  .epsilon(1e-9));
    }
}

TEST_CASE("predict_series rejects a dataset with a different feature list") {
    const auto series = sine_series(140, 40.0);
    const auto scaler = fit_scaler(series, {"close"});
    const auto ds = make_windows(series, scaler, 20, 1, {"close"});
    auto config = small_train_config();
    config.epochs = 1;
    const auto result = train(ds, config, 0.1);

    PriceSeries rich = series;
    for (std::size_t i = 0; i < rich.bars.size(); ++i) {
        rich.bars[i].open = rich.bars[i].close * 0.99;
        rich.bars[i].high = rich.bars[i].close * 1.02;
        rich.bars[i].low = rich.bars[i].close * 0.98;
        rich.bars[i].volume = 1000 + i;
    }
    const std::vector<std::string> five = {"open", "high", "low", "close", "volume"};
    const auto scaler5 = fit_scaler(rich, five);
    const auto ds5 = make_windows(rich, scaler5, 20, 1, five);
    CHECK_THROWS_AS(predict_series(result.params, ds5), ScalerMismatch);
}

TEST_CASE("grid search with a singleton grid returns the base config") {
    const auto ds = constant_target_dataset(40);
    auto base = small_train_config();
    base.lookback = 5;
    base.epochs = 1;
    GridSpec grid;
    const auto result = grid_search(grid, base, ds, 0.1);
    CHECK(result.table.size() == 1);
    CHECK(result.best == base);
}

TEST_CASE("grid search prefers the learning config on learnable data") {
    const auto ds = constant_target_dataset(48);
    auto base = small_train_config();
    base.lookback = 5;
    base.epochs = 4;
    base.dropout_rate = 0.0;
    GridSpec grid;
    grid.learning_rate = {0.0, 0.01};  // frozen model vs trained model
    const auto result = grid_search(grid, base, ds, 0.2);
    REQUIRE(result.table.size() == 2);
    CHECK(result.best.learning_rate == 0.01);
    CHECK(result.table[1].final_val_loss < result.table[0].final_val_loss);
}

TEST_CASE("grid search table covers the whole product and honors the cap") {
    const auto ds = constant_target_dataset(30);
    auto base = small_train_config();
    base.lookback = 5;
    base.epochs = 1;
    GridSpec grid;
    grid.lstm_units = {4, 8};
    grid.dropout_rate = {0.0, 0.2};
    grid.learning_rate = {0.001, 0.01, 0.1};
    grid.max_combinations = 12;
    const auto result = grid_search(grid, base, ds, 0.1);
    CHECK(result.table.size() == 12);

    grid.max_combinations = 11;
    CHECK_THROWS_AS(grid_search(grid, base, ds, 0.1), GridTooLarge);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
    auto config = small_train_config();
    config.epochs = 1;
    const auto series = sine_series(80, 40.0);
    const auto scaler = fit_scaler(series, {"close"});
    const auto ds = make_windows(series, scaler, 20, 1, {"close"});
    const auto result = train(ds, config, 0.1);

    const Checkpoint saved{result.params, scaler, config.seed};
    const std::string dir = scratch_dir("ckpt");
    save_checkpoint(dir + "/m.ckpt", saved);
    const Checkpoint loaded = load_checkpoint(dir + "/m.ckpt");

    CHECK(loaded.seed == config.seed);
    CHECK(loaded.scaler == scaler);
    CHECK(loaded.params.config == config);
    CHECK(checkpoint_to_bytes(loaded) == checkpoint_to_bytes(saved));
}

TEST_CASE("checkpoint loading rejects corrupted containers") {
    auto config = small_train_config();
    config.epochs = 1;
    config.lookback = 5;
    const auto ds = constant_target_dataset(20);
    const auto result = train(ds, config, 0.1);
    const std::string bytes = checkpoint_to_bytes({result.params, ds.scaler, 1});

    SUBCASE("bad magic") {
        std::string bad = bytes;
        bad[0] = 'x';
        CHECK_THROWS_AS(checkpoint_from_bytes(bad), IoFailure);
    }
    SUBCASE("truncated payload") {
        CHECK_THROWS_AS(checkpoint_from_bytes(bytes.substr(0, bytes.size() / 2)), IoFailure);
    }
    SUBCASE("tensor shape tag disagrees with config") {
        // first tensor's row count sits right after config+scaler; easier
        // to corrupt via the config: bump lstm_units so expected shapes grow
        std::string bad = bytes;
        // config block starts after magic(8)+version(4)+seed(8); lstm_units
        // is the third u32 in the block
        const std::size_t units_offset = 8 + 4 + 8 + 4 + 4;
        bad[units_offset] = static_cast<char>(bad[units_offset] + 1);
        CHECK_THROWS_AS(checkpoint_from_bytes(bad), ShapeMismatch);
    }
}

TEST_CASE("history CSV round-trips") {
    TrainHistory history;
    history.train_loss = {0.5, 0.25, 0.125};
    history.val_loss = {0.6, 0.3, 0.15};
    history.val_mae = {0.4, 0.2, 0.1};
    const auto parsed = history_from_csv(history_to_csv(history));
    CHECK(parsed == history);
}
