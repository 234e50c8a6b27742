#ifndef SECTORCAST_LSTM_HPP
#define SECTORCAST_LSTM_HPP

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sectorcast/dataset.hpp"
#include "sectorcast/errors.hpp"

namespace sectorcast {

// Deterministic random source. All stochastic choices (initialization,
// epoch shuffling, dropout masks) draw from explicitly seeded streams.
using Rng = std::mt19937_64;

// Uniform in [0,1) from the top 53 bits; stable across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Unbiased integer in [0, n) by rejection.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

// In-place Fisher-Yates shuffle with a reproducible draw sequence.
template <class T>
void shuffle_deterministic(std::vector<T>& values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i)
        std::swap(values[i - 1], values[uniform_below(rng, i)]);
}

struct ModelConfig {
    int lookback = 50;
    int feature_count = 1;
    int lstm_units = 256;
    int lstm_layers = 2;
    double dropout_rate = 0.30;
    int dense_units = 256;
    int batch_size = 64;
    int epochs = 100;
    double huber_delta = 1.0;
    double learning_rate = 0.001;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t seed = 0;

    bool operator==(const ModelConfig&) const = default;
};

// Throws ConfigInvalid on out-of-range fields.
void validate_config(const ModelConfig& config);

// Weights for one LSTM layer, gate order: input (i), forget (f), cell
// candidate (g), output (o).
struct LstmLayerParams {
    Eigen::MatrixXd w_i, w_f, w_g, w_o;  // units x input_dim
    Eigen::MatrixXd u_i, u_f, u_g, u_o;  // units x units
    Eigen::VectorXd b_i, b_f, b_g, b_o;  // units
};

struct DenseLayerParams {
    enum class Activation { kRelu, kSigmoid };
    Eigen::MatrixXd weight;  // out_dim x in_dim
    Eigen::VectorXd bias;    // out_dim
    Activation activation = Activation::kRelu;
};

// Full parameter set. Layer input/output dims chain
// feature_count -> units -> ... -> units -> dense_units -> 1.
struct ModelParams {
    std::vector<LstmLayerParams> lstm_layers;
    DenseLayerParams hidden_dense;  // relu
    DenseLayerParams output_dense;  // sigmoid, out_dim 1
    ModelConfig config;
};

// Applies fn to corresponding tensors of one or more ModelParams-shaped
// structures (parameters, gradients, moment accumulators).
namespace detail {
template <class Fn, class... L>
void visit_layer(Fn& fn, L&... layer) {
    fn(layer.w_i...);
    fn(layer.w_f...);
    fn(layer.w_g...);
    fn(layer.w_o...);
    fn(layer.u_i...);
    fn(layer.u_f...);
    fn(layer.u_g...);
    fn(layer.u_o...);
    fn(layer.b_i...);
    fn(layer.b_f...);
    fn(layer.b_g...);
    fn(layer.b_o...);
}
}  // namespace detail

template <class Fn, class P0, class... Ps>
void for_each_tensor(Fn fn, P0& first, Ps&... rest) {
    for (std::size_t k = 0; k < first.lstm_layers.size(); ++k)
        detail::visit_layer(fn, first.lstm_layers[k], rest.lstm_layers[k]...);
    fn(first.hidden_dense.weight, rest.hidden_dense.weight...);
    fn(first.hidden_dense.bias, rest.hidden_dense.bias...);
    fn(first.output_dense.weight, rest.output_dense.weight...);
    fn(first.output_dense.bias, rest.output_dense.bias...);
}

// Adam first/second moment accumulators, shapes mirroring ModelParams.
struct OptimizerState {
    ModelParams first_moment;
    ModelParams second_moment;
    std::int64_t t = 0;
};

// Zero-initialized accumulators shaped like `params`.
OptimizerState make_optimizer_state(const ModelParams& params);

struct TrainHistory {
    std::vector<double> train_loss;  // mean per-sample Huber, train mode
    std::vector<double> val_loss;    // mean per-sample Huber, dropout off
    std::vector<double> val_mae;     // scaled-domain MAE, dropout off

    bool operator==(const TrainHistory&) const = default;
};

// TrainHistory export: `epoch,train_loss,val_loss,val_mae`.
std::string history_to_csv(const TrainHistory& history);
TrainHistory history_from_csv(const std::string& text);

enum class RunMode { kTrain, kInfer };

// Everything backward needs: batched per-timestep activations (columns are
// batch samples) plus the dropout masks actually applied.
struct StepCache {
    Eigen::MatrixXd x;  // layer input at t (input_dim x batch)
    Eigen::MatrixXd gate_i, gate_f, gate_g, gate_o;
    Eigen::MatrixXd c, tanh_c, h;  // units x batch
};

struct ForwardCache {
    std::vector<std::vector<StepCache>> layers;  // [layer][t]
    // Inverted-dropout masks (entries 0 or 1/keep). One per LSTM layer:
    // masks for non-final layers apply per timestep to the emitted
    // sequence; the final layer's mask applies to its last hidden state.
    std::vector<std::vector<Eigen::MatrixXd>> seq_masks;  // [layer][t], empty rows in infer
    Eigen::MatrixXd head_mask;  // units x batch (empty in infer)

    Eigen::MatrixXd dense_in;    // units x batch, post dropout
    Eigen::MatrixXd z_hidden;    // dense_units x batch, pre-relu
    Eigen::MatrixXd relu_out;    // dense_units x batch
    Eigen::RowVectorXd z_out;    // 1 x batch, pre-sigmoid
    Eigen::RowVectorXd pred;     // 1 x batch, sigmoid output

    RunMode mode = RunMode::kInfer;
    int lookback = 0;
    int feature_count = 0;
    int units = 0;
    Eigen::Index batch = 0;
};

// Fan-balanced uniform initialization: every matrix entry is drawn from
// U(-b, b) with b = sqrt(6 / (fan_in + fan_out)); forget-gate biases start
// at 1, all other biases at 0. Fully determined by config.seed.
ModelParams init_params(const ModelConfig& config);

// One LSTM cell update:
//   i = sig(Wi x + Ui h_prev + bi), f/o analogous, g = tanh(...),
//   c = f (*) c_prev + i (*) g, h = o (*) tanh(c).
// Throws ShapeMismatch.
std::pair<Eigen::VectorXd, Eigen::VectorXd> lstm_cell_step(const LstmLayerParams& layer,
                                                           const Eigen::VectorXd& x_t,
                                                           const Eigen::VectorXd& h_prev,
                                                           const Eigen::VectorXd& c_prev);

// Batched forward pass over a mini-batch of windows (selected by `batch`
// indices into `inputs`). Non-final LSTM layers emit full sequences; the
// final LSTM layer contributes only its last hidden state. In train mode
// inverted dropout (keep prob 1 - dropout_rate) follows every LSTM layer,
// consuming `rng`; in infer mode dropout is the identity and rng is
// untouched.
ForwardCache forward_batch(const ModelParams& params,
                           const std::vector<Eigen::MatrixXd>& inputs,
                           std::span<const std::size_t> batch, RunMode mode, Rng& rng);

struct ForwardResult {
    double prediction = 0.0;  // scaled, strictly inside (0,1)
    ForwardCache cache;
};

// Single-window forward (window is lookback x feature_count).
ForwardResult forward(const ModelParams& params, const Eigen::MatrixXd& window, RunMode mode,
                      Rng& rng);

// Piecewise loss: 0.5 e^2 for |e| <= delta, delta (|e| - delta/2) beyond.
double huber_loss(double pred, double target, double delta);
double huber_grad(double pred, double target, double delta);

// Exact gradients of the (mean over batch) Huber loss w.r.t. every
// parameter, by backpropagation through time across all timesteps and all
// LSTM layers, reusing the cached dropout masks. Throws StaleCache when
// the cache does not match the parameter shapes.
ModelParams backward_batch(const ModelParams& params, const ForwardCache& cache,
                           std::span<const double> targets);

// Single-sample gradients (cache from forward()).
ModelParams backward(const ModelParams& params, const ForwardCache& cache, double target);

// Standard Adam with bias correction; t increments by one per update.
// Returns updated copies; adam_step_inplace is the allocation-free form
// used by the training loop.
void adam_step_inplace(ModelParams& params, const ModelParams& grads, OptimizerState& state,
                       const ModelConfig& config);
std::pair<ModelParams, OptimizerState> adam_step(const ModelParams& params,
                                                 const ModelParams& grads,
                                                 const OptimizerState& state,
                                                 const ModelConfig& config);

struct TrainResult {
    ModelParams params;
    TrainHistory history;
};

// Mini-batch training with per-epoch deterministic shuffling. The final
// `validation_fraction` of windows (chronological tail) is held out for
// the per-epoch validation loss/MAE, evaluated with dropout disabled.
// Throws EmptyDataset when no training window remains.
TrainResult train(const WindowedDataset& dataset, const ModelConfig& config,
                  double validation_fraction = 0.1);

struct Prediction {
    Date date;
    double price = 0.0;   // currency units (inverse-scaled)
    double scaled = 0.0;  // raw network output in (0,1)
};

// Infer-mode forward per window, inverse-scaled through dataset.scaler and
// aligned with target_dates. Throws ScalerMismatch when the dataset
// feature list disagrees with the trained configuration.
std::vector<Prediction> predict_series(const ModelParams& params, const WindowedDataset& dataset);

// Candidate values per hyperparameter; an empty list keeps the base value.
struct GridSpec {
    std::vector<int> lstm_units;
    std::vector<int> dense_units;
    std::vector<int> batch_size;
    std::vector<int> epochs;
    std::vector<double> dropout_rate;
    std::vector<double> learning_rate;
    std::vector<double> huber_delta;
    std::size_t max_combinations = 64;
};

struct GridEntry {
    ModelConfig config;
    double final_val_loss = 0.0;
};

struct GridResult {
    ModelConfig best;
    std::vector<GridEntry> table;  // one row per combination, grid order
};

// Trains one model per combination (all share base.seed) and selects the
// minimal final validation loss; ties keep the earlier combination.
// Throws GridTooLarge when the Cartesian product exceeds the cap.
GridResult grid_search(const GridSpec& grid, const ModelConfig& base,
                       const WindowedDataset& dataset, double validation_fraction = 0.1);

}  // namespace sectorcast

#endif  // SECTORCAST_LSTM_HPP
