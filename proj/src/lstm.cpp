#include "sectorcast/lstm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sectorcast/text.hpp"

namespace sectorcast {

namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
    return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

Eigen::MatrixXd tanh_m(const Eigen::MatrixXd& z) { return z.array().tanh().matrix(); }

// Distinct stream tags so initialization and training draws never overlap.
constexpr std::uint64_t kTrainStreamTag = 0x9E3779B97F4A7C15ULL;

double uniform_symmetric(Rng& rng, double bound) { return (2.0 * uniform01(rng) - 1.0) * bound; }

void fill_uniform(Eigen::MatrixXd& m, Rng& rng, double bound) {
    double* data = m.data();
    for (Eigen::Index i = 0; i < m.size(); ++i) data[i] = uniform_symmetric(rng, bound);
}

double glorot_bound(Eigen::Index fan_in, Eigen::Index fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

int layer_input_dim(const ModelConfig& config, int layer) {
    return layer == 0 ? config.feature_count : config.lstm_units;
}

// Inverted-dropout mask: entries are 0 with probability `rate`, otherwise
// 1/(1-rate). Drawn in column-major (storage) order.
Eigen::MatrixXd draw_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
    Eigen::MatrixXd mask(rows, cols);
    const double keep_inv = 1.0 / (1.0 - rate);
    double* data = mask.data();
    for (Eigen::Index i = 0; i < mask.size(); ++i)
        data[i] = uniform01(rng) < rate ? 0.0 : keep_inv;
    return mask;
}

void check_params_shape(const ModelParams& params) {
    const ModelConfig& c = params.config;
    if (static_cast<int>(params.lstm_layers.size()) != c.lstm_layers)
        throw ShapeMismatch("parameter layer count disagrees with config");
    for (int k = 0; k < c.lstm_layers; ++k) {
        const LstmLayerParams& l = params.lstm_layers[static_cast<std::size_t>(k)];
        const Eigen::Index in = layer_input_dim(c, k);
        const Eigen::Index u = c.lstm_units;
        if (l.w_i.rows() != u || l.w_i.cols() != in || l.u_i.rows() != u || l.u_i.cols() != u ||
            l.b_i.size() != u)
            throw ShapeMismatch("LSTM layer " + std::to_string(k) + " tensor shape");
    }
    if (params.hidden_dense.weight.rows() != c.dense_units ||
        params.hidden_dense.weight.cols() != c.lstm_units ||
        params.output_dense.weight.rows() != 1 ||
        params.output_dense.weight.cols() != c.dense_units)
        throw ShapeMismatch("dense head tensor shape");
}

}  // namespace

void validate_config(const ModelConfig& c) {
    if (c.lookback < 1 || c.feature_count < 1 || c.lstm_units < 1 || c.lstm_layers < 1 ||
        c.dense_units < 1 || c.batch_size < 1 || c.epochs < 1)
        throw ConfigInvalid("all model counts must be >= 1");
    if (!(c.dropout_rate >= 0.0 && c.dropout_rate < 1.0))
        throw ConfigInvalid("dropout_rate must lie in [0,1)");
    if (!(c.huber_delta > 0.0)) throw ConfigInvalid("huber_delta must be positive");
    if (!(c.learning_rate >= 0.0)) throw ConfigInvalid("learning_rate must be non-negative");
    if (!(c.adam_beta1 >= 0.0 && c.adam_beta1 < 1.0 && c.adam_beta2 >= 0.0 && c.adam_beta2 < 1.0))
        throw ConfigInvalid("adam betas must lie in [0,1)");
    if (!(c.adam_epsilon > 0.0)) throw ConfigInvalid("adam_epsilon must be positive");
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

ModelParams init_params(const ModelConfig& config) {
    validate_config(config);
    Rng rng(config.seed);
    ModelParams params;
    params.config = config;
    const Eigen::Index u = config.lstm_units;
    for (int k = 0; k < config.lstm_layers; ++k) {
        const Eigen::Index in = layer_input_dim(config, k);
        LstmLayerParams layer;
        const double wb = glorot_bound(in, u);
        const double ub = glorot_bound(u, u);
        for (Eigen::MatrixXd* w : {&layer.w_i, &layer.w_f, &layer.w_g, &layer.w_o}) {
            w->resize(u, in);
            fill_uniform(*w, rng, wb);
        }
        for (Eigen::MatrixXd* w : {&layer.u_i, &layer.u_f, &layer.u_g, &layer.u_o}) {
            w->resize(u, u);
            fill_uniform(*w, rng, ub);
        }
        layer.b_i = Eigen::VectorXd::Zero(u);
        layer.b_f = Eigen::VectorXd::Ones(u);  // forget-gate bias starts open
        layer.b_g = Eigen::VectorXd::Zero(u);
        layer.b_o = Eigen::VectorXd::Zero(u);
        params.lstm_layers.push_back(std::move(layer));
    }
    params.hidden_dense.weight.resize(config.dense_units, u);
    fill_uniform(params.hidden_dense.weight, rng, glorot_bound(u, config.dense_units));
    params.hidden_dense.bias = Eigen::VectorXd::Zero(config.dense_units);
    params.hidden_dense.activation = DenseLayerParams::Activation::kRelu;
    params.output_dense.weight.resize(1, config.dense_units);
    fill_uniform(params.output_dense.weight, rng, glorot_bound(config.dense_units, 1));
    params.output_dense.bias = Eigen::VectorXd::Zero(1);
    params.output_dense.activation = DenseLayerParams::Activation::kSigmoid;
    return params;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> lstm_cell_step(const LstmLayerParams& layer,
                                                           const Eigen::VectorXd& x_t,
                                                           const Eigen::VectorXd& h_prev,
                                                           const Eigen::VectorXd& c_prev) {
    const Eigen::Index u = layer.b_i.size();
    if (x_t.size() != layer.w_i.cols() || h_prev.size() != u || c_prev.size() != u)
        throw ShapeMismatch("lstm_cell_step input dimensions");
    const Eigen::MatrixXd i = sigmoid(layer.w_i * x_t + layer.u_i * h_prev + layer.b_i);
    const Eigen::MatrixXd f = sigmoid(layer.w_f * x_t + layer.u_f * h_prev + layer.b_f);
    const Eigen::MatrixXd g = tanh_m(layer.w_g * x_t + layer.u_g * h_prev + layer.b_g);
    const Eigen::MatrixXd o = sigmoid(layer.w_o * x_t + layer.u_o * h_prev + layer.b_o);
    Eigen::VectorXd c = f.cwiseProduct(c_prev) + i.cwiseProduct(g);
    Eigen::VectorXd h = o.cwiseProduct(tanh_m(c));
    return {std::move(h), std::move(c)};
}

ForwardCache forward_batch(const ModelParams& params, const std::vector<Eigen::MatrixXd>& inputs,
                           std::span<const std::size_t> batch, RunMode mode, Rng& rng) {
    check_params_shape(params);
    const ModelConfig& config = params.config;
    const Eigen::Index batch_size = static_cast<Eigen::Index>(batch.size());
    if (batch_size == 0) throw ShapeMismatch("empty batch");
    const int lookback = config.lookback;
    const Eigen::Index u = config.lstm_units;
    for (std::size_t idx : batch) {
        if (idx >= inputs.size()) throw ShapeMismatch("batch index past dataset end");
        const Eigen::MatrixXd& w = inputs[idx];
        if (w.rows() != lookback || w.cols() != config.feature_count)
            throw ShapeMismatch("window shape disagrees with config");
    }

    ForwardCache cache;
    cache.mode = mode;
    cache.lookback = lookback;
    cache.feature_count = config.feature_count;
    cache.units = static_cast<int>(u);
    cache.batch = batch_size;
    cache.layers.resize(static_cast<std::size_t>(config.lstm_layers));
    cache.seq_masks.resize(static_cast<std::size_t>(config.lstm_layers));

    const bool dropping = mode == RunMode::kTrain && config.dropout_rate > 0.0;

    // Layer 0 consumes the raw windows; feature vectors become columns.
    std::vector<Eigen::MatrixXd> layer_input(static_cast<std::size_t>(lookback));
    for (int t = 0; t < lookback; ++t) {
        Eigen::MatrixXd x(config.feature_count, batch_size);
        for (Eigen::Index b = 0; b < batch_size; ++b)
            x.col(b) = inputs[batch[static_cast<std::size_t>(b)]].row(t).transpose();
        layer_input[static_cast<std::size_t>(t)] = std::move(x);
    }

    for (int k = 0; k < config.lstm_layers; ++k) {
        const LstmLayerParams& layer = params.lstm_layers[static_cast<std::size_t>(k)];
        auto& steps = cache.layers[static_cast<std::size_t>(k)];
        steps.resize(static_cast<std::size_t>(lookback));
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(u, batch_size);
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(u, batch_size);
        for (int t = 0; t < lookback; ++t) {
            StepCache& s = steps[static_cast<std::size_t>(t)];
            s.x = std::move(layer_input[static_cast<std::size_t>(t)]);
            Eigen::MatrixXd a_i = layer.w_i * s.x + layer.u_i * h;
            a_i.colwise() += layer.b_i;
            Eigen::MatrixXd a_f = layer.w_f * s.x + layer.u_f * h;
            a_f.colwise() += layer.b_f;
            Eigen::MatrixXd a_g = layer.w_g * s.x + layer.u_g * h;
            a_g.colwise() += layer.b_g;
            Eigen::MatrixXd a_o = layer.w_o * s.x + layer.u_o * h;
            a_o.colwise() += layer.b_o;
            s.gate_i = sigmoid(a_i);
            s.gate_f = sigmoid(a_f);
            s.gate_g = tanh_m(a_g);
            s.gate_o = sigmoid(a_o);
            s.c = s.gate_f.cwiseProduct(c) + s.gate_i.cwiseProduct(s.gate_g);
            s.tanh_c = tanh_m(s.c);
            s.h = s.gate_o.cwiseProduct(s.tanh_c);
            h = s.h;
            c = s.c;
        }
        const bool final_layer = k == config.lstm_layers - 1;
        if (!final_layer) {
            // Emit the full dropped sequence as the next layer's input.
            layer_input.resize(static_cast<std::size_t>(lookback));
            auto& masks = cache.seq_masks[static_cast<std::size_t>(k)];
            if (dropping) masks.resize(static_cast<std::size_t>(lookback));
            for (int t = 0; t < lookback; ++t) {
                const Eigen::MatrixXd& ht = steps[static_cast<std::size_t>(t)].h;
                if (dropping) {
                    masks[static_cast<std::size_t>(t)] =
                        draw_mask(u, batch_size, config.dropout_rate, rng);
                    layer_input[static_cast<std::size_t>(t)] =
                        masks[static_cast<std::size_t>(t)].cwiseProduct(ht);
                } else {
                    layer_input[static_cast<std::size_t>(t)] = ht;
                }
            }
        } else {
            // Only the final hidden state feeds the dense head.
            if (dropping) {
                cache.head_mask = draw_mask(u, batch_size, config.dropout_rate, rng);
                cache.dense_in = cache.head_mask.cwiseProduct(h);
            } else {
                cache.dense_in = h;
            }
        }
    }

    cache.z_hidden = params.hidden_dense.weight * cache.dense_in;
    cache.z_hidden.colwise() += params.hidden_dense.bias;
    cache.relu_out = cache.z_hidden.cwiseMax(0.0);
    cache.z_out = params.output_dense.weight * cache.relu_out;
    cache.z_out.array() += params.output_dense.bias(0);
    cache.pred = sigmoid(cache.z_out);
    return cache;
}

ForwardResult forward(const ModelParams& params, const Eigen::MatrixXd& window, RunMode mode,
                      Rng& rng) {
    const std::vector<Eigen::MatrixXd> inputs = {window};
    const std::size_t batch[] = {0};
    ForwardResult result;
    result.cache = forward_batch(params, inputs, batch, mode, rng);
    result.prediction = result.cache.pred(0);
    return result;
}

double huber_loss(double pred, double target, double delta) {
    const double e = std::abs(pred - target);
    if (e <= delta) return 0.5 * e * e;
    return delta * (e - 0.5 * delta);
}

double huber_grad(double pred, double target, double delta) {
    const double e = pred - target;
    if (std::abs(e) <= delta) return e;
    return e > 0.0 ? delta : -delta;
}

namespace {

// BPTT through one LSTM layer. dh_ext[t] may be empty (treated as zero).
// Returns the gradients w.r.t. the layer's inputs per timestep.
std::vector<Eigen::MatrixXd> layer_backward(const LstmLayerParams& layer,
                                            const std::vector<StepCache>& steps,
                                            const std::vector<Eigen::MatrixXd>& dh_ext,
                                            LstmLayerParams& grads) {
    const auto t_count = static_cast<int>(steps.size());
    const Eigen::Index u = layer.b_i.size();
    const Eigen::Index batch = steps.front().h.cols();
    std::vector<Eigen::MatrixXd> dx(steps.size());

    Eigen::MatrixXd dh_rec = Eigen::MatrixXd::Zero(u, batch);
    Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(u, batch);
    for (int t = t_count - 1; t >= 0; --t) {
        const StepCache& s = steps[static_cast<std::size_t>(t)];
        Eigen::MatrixXd dh = dh_rec;
        if (dh_ext[static_cast<std::size_t>(t)].size() > 0)
            dh += dh_ext[static_cast<std::size_t>(t)];

        dc += dh.cwiseProduct(s.gate_o)
                  .cwiseProduct((1.0 - s.tanh_c.array().square()).matrix());
        const Eigen::MatrixXd da_o =
            dh.cwiseProduct(s.tanh_c)
                .cwiseProduct(s.gate_o.cwiseProduct((1.0 - s.gate_o.array()).matrix()));
        const Eigen::MatrixXd da_i =
            dc.cwiseProduct(s.gate_g)
                .cwiseProduct(s.gate_i.cwiseProduct((1.0 - s.gate_i.array()).matrix()));
        const Eigen::MatrixXd da_g =
            dc.cwiseProduct(s.gate_i)
                .cwiseProduct((1.0 - s.gate_g.array().square()).matrix());
        Eigen::MatrixXd da_f;
        if (t > 0) {
            const Eigen::MatrixXd& c_prev = steps[static_cast<std::size_t>(t - 1)].c;
            da_f = dc.cwiseProduct(c_prev).cwiseProduct(
                s.gate_f.cwiseProduct((1.0 - s.gate_f.array()).matrix()));
        } else {
            da_f = Eigen::MatrixXd::Zero(u, batch);  // c_{-1} = 0
        }

        grads.w_i.noalias() += da_i * s.x.transpose();
        grads.w_f.noalias() += da_f * s.x.transpose();
        grads.w_g.noalias() += da_g * s.x.transpose();
        grads.w_o.noalias() += da_o * s.x.transpose();
        if (t > 0) {
            const Eigen::MatrixXd& h_prev = steps[static_cast<std::size_t>(t - 1)].h;
            grads.u_i.noalias() += da_i * h_prev.transpose();
            grads.u_f.noalias() += da_f * h_prev.transpose();
            grads.u_g.noalias() += da_g * h_prev.transpose();
            grads.u_o.noalias() += da_o * h_prev.transpose();
        }
        grads.b_i += da_i.rowwise().sum();
        grads.b_f += da_f.rowwise().sum();
        grads.b_g += da_g.rowwise().sum();
        grads.b_o += da_o.rowwise().sum();

        dx[static_cast<std::size_t>(t)] = layer.w_i.transpose() * da_i +
                                          layer.w_f.transpose() * da_f +
                                          layer.w_g.transpose() * da_g +
                                          layer.w_o.transpose() * da_o;
        dh_rec = layer.u_i.transpose() * da_i + layer.u_f.transpose() * da_f +
                 layer.u_g.transpose() * da_g + layer.u_o.transpose() * da_o;
        dc = dc.cwiseProduct(s.gate_f);
    }
    return dx;
}

ModelParams make_zero_like(const ModelParams& params) {
    ModelParams zero = params;
    for_each_tensor([](auto& t) { t.setZero(); }, zero);
    return zero;
}

}  // namespace

ModelParams backward_batch(const ModelParams& params, const ForwardCache& cache,
                           std::span<const double> targets) {
    check_params_shape(params);
    const ModelConfig& config = params.config;
    if (cache.lookback != config.lookback || cache.feature_count != config.feature_count ||
        cache.units != config.lstm_units ||
        cache.layers.size() != static_cast<std::size_t>(config.lstm_layers))
        throw StaleCache("cache does not match parameter shapes");
    if (static_cast<Eigen::Index>(targets.size()) != cache.batch)
        throw StaleCache("target count does not match cached batch");

    const Eigen::Index batch = cache.batch;
    ModelParams grads = make_zero_like(params);

    // Mean-over-batch loss; each sample contributes 1/batch.
    Eigen::RowVectorXd dpred(batch);
    for (Eigen::Index b = 0; b < batch; ++b)
        dpred(b) = huber_grad(cache.pred(b), targets[static_cast<std::size_t>(b)],
                              config.huber_delta) /
                   static_cast<double>(batch);

    const Eigen::RowVectorXd dz_out =
        dpred.cwiseProduct(cache.pred.cwiseProduct((1.0 - cache.pred.array()).matrix()));
    grads.output_dense.weight.noalias() = dz_out * cache.relu_out.transpose();
    grads.output_dense.bias(0) = dz_out.sum();

    Eigen::MatrixXd dr = params.output_dense.weight.transpose() * dz_out;
    const Eigen::MatrixXd relu_gate = (cache.z_hidden.array() > 0.0).cast<double>().matrix();
    const Eigen::MatrixXd dz_hidden = dr.cwiseProduct(relu_gate);
    grads.hidden_dense.weight.noalias() = dz_hidden * cache.dense_in.transpose();
    grads.hidden_dense.bias = dz_hidden.rowwise().sum();

    Eigen::MatrixXd du = params.hidden_dense.weight.transpose() * dz_hidden;
    if (cache.head_mask.size() > 0) du = cache.head_mask.cwiseProduct(du);

    // Final LSTM layer: external gradient only on its last hidden state.
    const auto layer_count = static_cast<std::size_t>(config.lstm_layers);
    std::vector<Eigen::MatrixXd> dh_ext(static_cast<std::size_t>(config.lookback));
    dh_ext.back() = std::move(du);
    for (std::size_t k = layer_count; k-- > 0;) {
        std::vector<Eigen::MatrixXd> dx =
            layer_backward(params.lstm_layers[k], cache.layers[k], dh_ext,
                           grads.lstm_layers[k]);
        if (k == 0) break;
        // Gradients flow to the previous layer through its dropout mask.
        const auto& masks = cache.seq_masks[k - 1];
        for (std::size_t t = 0; t < dx.size(); ++t) {
            if (!masks.empty()) dx[t] = masks[t].cwiseProduct(dx[t]);
            dh_ext[t] = std::move(dx[t]);
        }
    }
    return grads;
}

ModelParams backward(const ModelParams& params, const ForwardCache& cache, double target) {
    const double targets[] = {target};
    return backward_batch(params, cache, targets);
}

OptimizerState make_optimizer_state(const ModelParams& params) {
    OptimizerState state;
    state.first_moment = make_zero_like(params);
    state.second_moment = make_zero_like(params);
    state.t = 0;
    return state;
}

void adam_step_inplace(ModelParams& params, const ModelParams& grads, OptimizerState& state,
                       const ModelConfig& config) {
    state.t += 1;
    const double b1 = config.adam_beta1;
    const double b2 = config.adam_beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    const double lr = config.learning_rate;
    const double eps = config.adam_epsilon;
    for_each_tensor(
        [&](auto& theta, const auto& g, auto& m, auto& v) {
            if (theta.rows() != g.rows() || theta.cols() != g.cols())
                throw ShapeMismatch("gradient shape disagrees with parameters");
            m = b1 * m + (1.0 - b1) * g;
            v.array() = b2 * v.array() + (1.0 - b2) * g.array().square();
            theta.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
        },
        params, grads, state.first_moment, state.second_moment);
}

std::pair<ModelParams, OptimizerState> adam_step(const ModelParams& params,
                                                 const ModelParams& grads,
                                                 const OptimizerState& state,
                                                 const ModelConfig& config) {
    ModelParams next_params = params;
    OptimizerState next_state = state;
    adam_step_inplace(next_params, grads, next_state, config);
    return {std::move(next_params), std::move(next_state)};
}

std::string history_to_csv(const TrainHistory& history) {
    std::string out = "epoch,train_loss,val_loss,val_mae\n";
    char buf[32];
    auto append_double = [&](double v) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        (void)ec;
        out.append(buf, ptr);
    };
    for (std::size_t e = 0; e < history.train_loss.size(); ++e) {
        out += std::to_string(e + 1);
        out += ',';
        append_double(history.train_loss[e]);
        out += ',';
        append_double(history.val_loss[e]);
        out += ',';
        append_double(history.val_mae[e]);
        out += '\n';
    }
    return out;
}

TrainHistory history_from_csv(const std::string& text) {
    TrainHistory history;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "epoch,train_loss,val_loss,val_mae")
        throw MalformedHeader("expected 'epoch,train_loss,val_loss,val_mae'");
    while (std::getline(in, line)) {
        std::string_view row = strip_cr(line);
        if (row.empty()) continue;
        double values[3];
        std::size_t field = 0;
        std::size_t begin = row.find(',');
        if (begin == std::string_view::npos) throw IoFailure("short history row");
        ++begin;
        while (field < 3) {
            std::size_t comma = row.find(',', begin);
            std::string_view cell = row.substr(
                begin, comma == std::string_view::npos ? std::string_view::npos : comma - begin);
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(),
                                             values[field]);
            if (ec != std::errc{} || ptr != cell.data() + cell.size())
                throw IoFailure("unparsable history cell");
            ++field;
            if (comma == std::string_view::npos) break;
            begin = comma + 1;
        }
        if (field != 3) throw IoFailure("short history row");
        history.train_loss.push_back(values[0]);
        history.val_loss.push_back(values[1]);
        history.val_mae.push_back(values[2]);
    }
    return history;
}

namespace {

struct EvalStats {
    double loss = 0.0;
    double mae = 0.0;
};

// Infer-mode mean loss/MAE over [begin, end) windows, in fixed chunks.
EvalStats evaluate(const ModelParams& params, const WindowedDataset& dataset, std::size_t begin,
                   std::size_t end, Rng& rng) {
    EvalStats stats;
    const std::size_t n = end - begin;
    if (n == 0) return stats;
    const auto chunk = static_cast<std::size_t>(params.config.batch_size);
    std::vector<std::size_t> indices;
    for (std::size_t start = begin; start < end; start += chunk) {
        const std::size_t stop = std::min(start + chunk, end);
        indices.resize(stop - start);
        std::iota(indices.begin(), indices.end(), start);
        ForwardCache cache = forward_batch(params, dataset.inputs, indices, RunMode::kInfer, rng);
        for (std::size_t j = 0; j < indices.size(); ++j) {
            const double target = dataset.targets[indices[j]];
            const double pred = cache.pred(static_cast<Eigen::Index>(j));
            stats.loss += huber_loss(pred, target, params.config.huber_delta);
            stats.mae += std::abs(pred - target);
        }
    }
    stats.loss /= static_cast<double>(n);
    stats.mae /= static_cast<double>(n);
    return stats;
}

}  // namespace

TrainResult train(const WindowedDataset& dataset, const ModelConfig& config,
                  double validation_fraction) {
    validate_config(config);
    if (!(validation_fraction >= 0.0 && validation_fraction <= 0.5))
        throw ConfigInvalid("validation_fraction must lie in [0, 0.5]");
    const std::size_t n = dataset.size();
    if (n == 0) throw EmptyDataset("dataset holds no windows");
    if (static_cast<int>(dataset.feature_names.size()) != config.feature_count)
        throw ShapeMismatch("dataset feature count disagrees with config");
    if (dataset.lookback != config.lookback)
        throw ShapeMismatch("dataset lookback disagrees with config");

    const auto n_val = static_cast<std::size_t>(validation_fraction * static_cast<double>(n));
    const std::size_t n_train = n - n_val;
    if (n_train == 0) throw EmptyDataset("no training window after validation carve-out");

    TrainResult result;
    result.params = init_params(config);
    OptimizerState state = make_optimizer_state(result.params);
    Rng train_rng(config.seed ^ kTrainStreamTag);

    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> batch_targets;

    const auto batch_size = static_cast<std::size_t>(config.batch_size);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_deterministic(order, train_rng);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n_train; start += batch_size) {
            const std::size_t stop = std::min(start + batch_size, n_train);
            std::span<const std::size_t> batch(order.data() + start, stop - start);
            ForwardCache cache =
                forward_batch(result.params, dataset.inputs, batch, RunMode::kTrain, train_rng);
            batch_targets.resize(batch.size());
            for (std::size_t j = 0; j < batch.size(); ++j) {
                batch_targets[j] = dataset.targets[batch[j]];
                loss_sum += huber_loss(cache.pred(static_cast<Eigen::Index>(j)),
                                       batch_targets[j], config.huber_delta);
            }
            const ModelParams grads = backward_batch(result.params, cache, batch_targets);
            adam_step_inplace(result.params, grads, state, config);
        }
        result.history.train_loss.push_back(loss_sum / static_cast<double>(n_train));
        const EvalStats val = evaluate(result.params, dataset, n_train, n, train_rng);
        result.history.val_loss.push_back(val.loss);
        result.history.val_mae.push_back(val.mae);
    }
    return result;
}

std::vector<Prediction> predict_series(const ModelParams& params, const WindowedDataset& dataset) {
    if (static_cast<int>(dataset.feature_names.size()) != params.config.feature_count)
        throw ScalerMismatch("dataset feature list disagrees with the trained model");
    if (dataset.lookback != params.config.lookback)
        throw ShapeMismatch("dataset lookback disagrees with the trained model");
    std::vector<Prediction> out;
    out.reserve(dataset.size());
    Rng unused(0);
    const auto chunk = static_cast<std::size_t>(params.config.batch_size);
    std::vector<std::size_t> indices;
    for (std::size_t start = 0; start < dataset.size(); start += chunk) {
        const std::size_t stop = std::min(start + chunk, dataset.size());
        indices.resize(stop - start);
        std::iota(indices.begin(), indices.end(), start);
        ForwardCache cache =
            forward_batch(params, dataset.inputs, indices, RunMode::kInfer, unused);
        for (std::size_t j = 0; j < indices.size(); ++j) {
            Prediction p;
            p.date = dataset.target_dates[indices[j]];
            p.scaled = cache.pred(static_cast<Eigen::Index>(j));
            p.price = inverse_scale_close(p.scaled, dataset.scaler);
            out.push_back(p);
        }
    }
    return out;
}

GridResult grid_search(const GridSpec& grid, const ModelConfig& base,
                       const WindowedDataset& dataset, double validation_fraction) {
    auto ints = [](const std::vector<int>& list, int fallback) {
        return list.empty() ? std::vector<int>{fallback} : list;
    };
    auto reals = [](const std::vector<double>& list, double fallback) {
        return list.empty() ? std::vector<double>{fallback} : list;
    };
    const auto units = ints(grid.lstm_units, base.lstm_units);
    const auto dense = ints(grid.dense_units, base.dense_units);
    const auto batches = ints(grid.batch_size, base.batch_size);
    const auto epochs = ints(grid.epochs, base.epochs);
    const auto dropouts = reals(grid.dropout_rate, base.dropout_rate);
    const auto rates = reals(grid.learning_rate, base.learning_rate);
    const auto deltas = reals(grid.huber_delta, base.huber_delta);

    const std::size_t combinations = units.size() * dense.size() * batches.size() *
                                     epochs.size() * dropouts.size() * rates.size() *
                                     deltas.size();
    if (combinations > grid.max_combinations)
        throw GridTooLarge(std::to_string(combinations) + " combinations exceed cap " +
                           std::to_string(grid.max_combinations));

    GridResult result;
    result.table.reserve(combinations);
    for (int u : units)
        for (int d : dense)
            for (int b : batches)
                for (int e : epochs)
                    for (double dr : dropouts)
                        for (double lr : rates)
                            for (double hd : deltas) {
                                ModelConfig candidate = base;
                                candidate.lstm_units = u;
                                candidate.dense_units = d;
                                candidate.batch_size = b;
                                candidate.epochs = e;
                                candidate.dropout_rate = dr;
                                candidate.learning_rate = lr;
                                candidate.huber_delta = hd;
                                TrainResult trained =
                                    train(dataset, candidate, validation_fraction);
                                GridEntry entry;
                                entry.config = candidate;
                                entry.final_val_loss = trained.history.val_loss.back();
                                result.table.push_back(std::move(entry));
                            }
    std::size_t best = 0;
    for (std::size_t i = 1; i < result.table.size(); ++i)
        if (result.table[i].final_val_loss < result.table[best].final_val_loss) best = i;
    result.best = result.table[best].config;
    return result;
}

}  // namespace sectorcast
