#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "grad_check_util.hpp"

using namespace sectorcast;
using namespace sectorcast::testutil;

namespace {

ModelConfig small_config() {
    ModelConfig config;
    config.lookback = 5;
    config.feature_count = 1;
    config.lstm_units = 4;
    config.lstm_layers = 2;
    config.dense_units = 4;
    config.dropout_rate = 0.0;
    config.batch_size = 1;
    config.epochs = 1;
    config.seed = 2718;
    return config;
}

Eigen::MatrixXd sample_window(int lookback, int features, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd window(lookback, features);
    for (Eigen::Index i = 0; i < window.size(); ++i) window.data()[i] = uniform01(rng);
    return window;
}

}  // namespace

TEST_CASE("BPTT gradients match central finite differences") {
    const auto config = small_config();
    const auto window = sample_window(config.lookback, config.feature_count, 11);
    const auto report = check_gradients(config, window, 0.62, RunMode::kInfer, 99);
    CHECK(report.checked == 265);  // every parameter coordinate
    CHECK(report.failed == 0);
    CHECK(report.worst_rel_error < 1e-4);
}

TEST_CASE("BPTT gradients stay exact through fixed dropout masks") {
    auto config = small_config();
    config.dropout_rate = 0.4;
    config.lstm_units = 6;
    config.dense_units = 5;
    const auto window = sample_window(config.lookback, config.feature_count, 21);
    const auto report = check_gradients(config, window, 0.31, RunMode::kTrain, 4242);
    CHECK(report.failed == 0);
    CHECK(report.worst_rel_error < 1e-4);
}

TEST_CASE("gradients are exact on multivariate windows and three layers") {
    auto config = small_config();
    config.feature_count = 3;
    config.lstm_layers = 3;
    config.lookback = 4;
    const auto window = sample_window(config.lookback, config.feature_count, 31);
    const auto report = check_gradients(config, window, 0.5, RunMode::kInfer, 7);
    CHECK(report.failed == 0);
    CHECK(report.worst_rel_error < 1e-4);
}

TEST_CASE("batched gradients equal the mean of per-sample gradients") {
    const auto config = small_config();
    const auto params = init_params(config);
    std::vector<Eigen::MatrixXd> inputs = {sample_window(5, 1, 1), sample_window(5, 1, 2),
                                           sample_window(5, 1, 3)};
    const std::vector<double> targets = {0.3, 0.6, 0.9};
    const std::vector<std::size_t> all = {0, 1, 2};

    Rng rng(0);
    const ForwardCache cache = forward_batch(params, inputs, all, RunMode::kInfer, rng);
    const ModelParams batched = backward_batch(params, cache, targets);

    ModelParams mean = params;
    for_each_tensor([](auto& t) { t.setZero(); }, mean);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        Rng r2(0);
        const auto fwd = forward(params, inputs[i], RunMode::kInfer, r2);
        const auto g = backward(params, fwd.cache, targets[i]);
        for_each_tensor([&](auto& acc, const auto& gi) { acc += gi / 3.0; }, mean, g);
    }
    double worst = 0.0;
    for_each_tensor(
        [&](const auto& a, const auto& b) {
            if (a.size() > 0) worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
        },
        batched, mean);
    CHECK(worst < 1e-12);
}
