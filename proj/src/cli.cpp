#include "sectorcast/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sectorcast/checkpoint.hpp"
#include "sectorcast/dataset.hpp"
#include "sectorcast/text.hpp"
#include "sectorcast/version.hpp"

namespace sectorcast {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path, const char* who) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure(std::string(who) + ": cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoFailure(std::string(who) + ": read failure on " + path);
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    out << text;
    if (!out) throw IoFailure("write failure on " + path);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoFailure("cannot create " + dir + ": " + ec.message());
}

FileDigest digest_of(const std::string& path, const std::string& bytes) {
    return {path, to_hex(fnv1a64(bytes))};
}

FileDigest digest_file(const std::string& path) {
    return digest_of(path, read_file(path, "digest"));
}

Date json_date(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
        throw ConfigInvalid(std::string("missing or non-string '") + key + "'");
    auto parsed = parse_date(j[key].get<std::string>());
    if (!parsed) throw ConfigInvalid(std::string("unparsable date in '") + key + "'");
    return *parsed;
}

std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// Index-parallel loop for independent per-ticker work.
template <class Fn>
void run_jobs(std::size_t count, int jobs, Fn fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> workers;
    const int n = std::min<int>(jobs, static_cast<int>(count));
    workers.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) workers.emplace_back(worker);
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

json model_to_json(const ModelConfig& m) {
    return json{{"lookback", m.lookback},
                {"feature_count", m.feature_count},
                {"lstm_units", m.lstm_units},
                {"lstm_layers", m.lstm_layers},
                {"dropout_rate", m.dropout_rate},
                {"dense_units", m.dense_units},
                {"batch_size", m.batch_size},
                {"epochs", m.epochs},
                {"huber_delta", m.huber_delta},
                {"learning_rate", m.learning_rate},
                {"adam_beta1", m.adam_beta1},
                {"adam_beta2", m.adam_beta2},
                {"adam_epsilon", m.adam_epsilon},
                {"seed", m.seed}};
}

json result_to_json(const StockResult& row) {
    json ticker{{"symbol", row.ticker_spec.symbol}, {"short_code", row.ticker_spec.short_code}};
    if (row.ticker_spec.index_weight) ticker["index_weight"] = *row.ticker_spec.index_weight;
    return json{{"ticker", ticker},
                {"profit",
                 {{"ticker", row.profit.ticker},
                  {"buy_profit", row.profit.buy_profit},
                  {"sell_profit", row.profit.sell_profit},
                  {"total_profit", row.profit.total_profit},
                  {"mean_price", row.profit.mean_price},
                  {"ratio", row.profit.ratio},
                  {"ratio_display", row.profit.ratio_display}}},
                {"eval",
                 {{"ticker", row.eval.ticker},
                  {"huber_loss", row.eval.huber_loss},
                  {"mae", row.eval.mae},
                  {"accuracy_score", row.eval.accuracy_score},
                  {"n_samples", row.eval.n_samples}}}};
}

StockResult result_from_json(const json& j) {
    StockResult row;
    row.ticker_spec.symbol = j.at("ticker").at("symbol").get<std::string>();
    row.ticker_spec.short_code = j.at("ticker").at("short_code").get<std::string>();
    if (j.at("ticker").contains("index_weight"))
        row.ticker_spec.index_weight = j.at("ticker").at("index_weight").get<double>();
    const json& p = j.at("profit");
    row.profit.ticker = p.at("ticker").get<std::string>();
    row.profit.buy_profit = p.at("buy_profit").get<double>();
    row.profit.sell_profit = p.at("sell_profit").get<double>();
    row.profit.total_profit = p.at("total_profit").get<double>();
    row.profit.mean_price = p.at("mean_price").get<double>();
    row.profit.ratio = p.at("ratio").get<double>();
    row.profit.ratio_display = p.at("ratio_display").get<long long>();
    const json& e = j.at("eval");
    row.eval.ticker = e.at("ticker").get<std::string>();
    row.eval.huber_loss = e.at("huber_loss").get<double>();
    row.eval.mae = e.at("mae").get<double>();
    row.eval.accuracy_score = e.at("accuracy_score").get<double>();
    row.eval.n_samples = e.at("n_samples").get<std::size_t>();
    return row;
}

// Shared per-ticker pipeline state for train/predict/backtest.
struct TickerData {
    TickerSpec spec;
    PriceSeries full;   // sliced to [start_date, end_date]
    PriceSeries train;
    PriceSeries test;
    FileDigest csv_digest;
};

TickerData load_ticker_data(const RunConfig& config, const std::string& ticker,
                            const std::string& data_dir) {
    TickerData data;
    data.spec = resolve_ticker(config.universe, ticker);
    const std::string path = data_dir + "/" + data.spec.symbol + ".csv";
    const std::string csv = read_file(path, "market data");
    data.csv_digest = digest_of(path, csv);
    const PriceSeries parsed = parse_bars(csv, data.spec.symbol);
    data.full = slice_range(parsed, config.universe.start_date, config.universe.end_date);
    SplitSpec split{config.universe.split_date, config.validation_fraction};
    std::tie(data.train, data.test) = chronological_split(data.full, split);
    return data;
}

ModelConfig effective_model(const RunConfig& config, const CommonOptions& options) {
    ModelConfig model = config.model;
    model.feature_count = static_cast<int>(config.features.size());
    if (options.seed) model.seed = *options.seed;
    return model;
}

std::vector<PredictionRow> to_prediction_rows(const PriceSeries& series,
                                              const std::vector<Prediction>& predictions,
                                              int lookback, int horizon) {
    std::vector<PredictionRow> rows;
    rows.reserve(predictions.size());
    const std::size_t offset = static_cast<std::size_t>(lookback + horizon - 1);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const Bar& bar = series.bars[offset + i];
        rows.push_back({predictions[i].date, bar.close, predictions[i].price});
    }
    return rows;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path, "config"));
    } catch (const IoFailure& e) {
        throw ConfigInvalid(e.what());
    } catch (const json::exception& e) {
        throw ConfigInvalid(path + ": " + e.what());
    }

    RunConfig config;
    try {
        config.universe.start_date = json_date(j, "start_date");
        config.universe.end_date = json_date(j, "end_date");
        config.universe.split_date = json_date(j, "split_date");
        if (!j.contains("sectors") || !j["sectors"].is_array())
            throw ConfigInvalid("missing 'sectors' array");
        for (const json& js : j["sectors"]) {
            SectorSpec sector;
            sector.name = js.at("name").get<std::string>();
            for (const json& jt : js.at("tickers")) {
                TickerSpec t;
                t.symbol = jt.at("symbol").get<std::string>();
                t.short_code =
                    jt.contains("short_code") ? jt["short_code"].get<std::string>() : t.symbol;
                if (jt.contains("index_weight"))
                    t.index_weight = jt["index_weight"].get<double>();
                sector.tickers.push_back(std::move(t));
            }
            config.universe.sectors.push_back(std::move(sector));
        }
        if (j.contains("features")) {
            config.features = j["features"].get<std::vector<std::string>>();
            if (config.features.empty()) throw ConfigInvalid("'features' must be non-empty");
        }
        if (j.contains("horizon")) config.horizon = j["horizon"].get<int>();
        if (config.horizon < 1) throw ConfigInvalid("'horizon' must be >= 1");
        if (j.contains("validation_fraction"))
            config.validation_fraction = j["validation_fraction"].get<double>();
        if (!(config.validation_fraction >= 0.0 && config.validation_fraction <= 0.5))
            throw ConfigInvalid("'validation_fraction' must lie in [0, 0.5]");
        if (j.contains("model")) {
            const json& m = j["model"];
            ModelConfig& mc = config.model;
            if (m.contains("lookback")) mc.lookback = m["lookback"].get<int>();
            if (m.contains("lstm_units")) mc.lstm_units = m["lstm_units"].get<int>();
            if (m.contains("lstm_layers")) mc.lstm_layers = m["lstm_layers"].get<int>();
            if (m.contains("dropout_rate")) mc.dropout_rate = m["dropout_rate"].get<double>();
            if (m.contains("dense_units")) mc.dense_units = m["dense_units"].get<int>();
            if (m.contains("batch_size")) mc.batch_size = m["batch_size"].get<int>();
            if (m.contains("epochs")) mc.epochs = m["epochs"].get<int>();
            if (m.contains("huber_delta")) mc.huber_delta = m["huber_delta"].get<double>();
            if (m.contains("learning_rate"))
                mc.learning_rate = m["learning_rate"].get<double>();
            if (m.contains("adam_beta1")) mc.adam_beta1 = m["adam_beta1"].get<double>();
            if (m.contains("adam_beta2")) mc.adam_beta2 = m["adam_beta2"].get<double>();
            if (m.contains("adam_epsilon")) mc.adam_epsilon = m["adam_epsilon"].get<double>();
            if (m.contains("seed")) mc.seed = m["seed"].get<std::uint64_t>();
        }
        if (j.contains("grid")) {
            const json& g = j["grid"];
            GridSpec& grid = config.grid;
            if (g.contains("lstm_units")) grid.lstm_units = g["lstm_units"].get<std::vector<int>>();
            if (g.contains("dense_units"))
                grid.dense_units = g["dense_units"].get<std::vector<int>>();
            if (g.contains("batch_size")) grid.batch_size = g["batch_size"].get<std::vector<int>>();
            if (g.contains("epochs")) grid.epochs = g["epochs"].get<std::vector<int>>();
            if (g.contains("dropout_rate"))
                grid.dropout_rate = g["dropout_rate"].get<std::vector<double>>();
            if (g.contains("learning_rate"))
                grid.learning_rate = g["learning_rate"].get<std::vector<double>>();
            if (g.contains("huber_delta"))
                grid.huber_delta = g["huber_delta"].get<std::vector<double>>();
            if (g.contains("max_combinations"))
                grid.max_combinations = g["max_combinations"].get<std::size_t>();
        }
    } catch (const json::exception& e) {
        throw ConfigInvalid(path + ": " + e.what());
    }
    config.model.feature_count = static_cast<int>(config.features.size());
    validate_universe(config.universe);
    validate_config(config.model);
    return config;
}

const TickerSpec& resolve_ticker(const UniverseConfig& universe, const std::string& ticker) {
    for (const SectorSpec& sector : universe.sectors)
        for (const TickerSpec& spec : sector.tickers)
            if (spec.symbol == ticker || spec.short_code == ticker) return spec;
    throw ConfigInvalid("ticker '" + ticker + "' is not in the configured universe");
}

std::string manifest_to_json(const RunManifest& manifest) {
    json j{{"command", manifest.command},
           {"config", manifest.config_path},
           {"seed", manifest.seed},
           {"duration_ms", manifest.duration_ms},
           {"timestamp", manifest.timestamp},
           {"engine_version", manifest.engine_version}};
    if (!manifest.label.empty()) j["label"] = manifest.label;
    j["inputs"] = json::array();
    for (const FileDigest& d : manifest.inputs)
        j["inputs"].push_back({{"path", d.path}, {"fnv1a64", d.fnv1a64_hex}});
    j["outputs"] = json::array();
    for (const FileDigest& d : manifest.outputs)
        j["outputs"].push_back({{"path", d.path}, {"fnv1a64", d.fnv1a64_hex}});
    return j.dump(2) + "\n";
}

std::string write_manifest(const RunManifest& manifest, const std::string& out_dir) {
    std::string name = "manifest_" + manifest.command;
    if (!manifest.label.empty()) name += "_" + manifest.label;
    const std::string path = out_dir + "/" + name + ".json";
    write_file(path, manifest_to_json(manifest));
    return path;
}

RunManifest cmd_fetch(const CommonOptions& options) {
    Stopwatch watch;
    const RunConfig config = load_run_config(options.config_path);

    std::string feed_dir = options.feed_dir;
    if (feed_dir.empty()) {
        const char* env = std::getenv("SECTORCAST_FEED_DIR");
        if (env) feed_dir = env;
    }
    if (feed_dir.empty())
        throw ConfigInvalid("no feed configured: pass --feed-dir or set SECTORCAST_FEED_DIR");

    ensure_dir(options.out_dir);
    const DirectoryFeedClient client(feed_dir);

    std::vector<std::string> symbols;
    for (const SectorSpec& sector : config.universe.sectors)
        for (const TickerSpec& spec : sector.tickers)
            if (std::find(symbols.begin(), symbols.end(), spec.symbol) == symbols.end())
                symbols.push_back(spec.symbol);

    RunManifest manifest;
    manifest.inputs.resize(symbols.size());
    manifest.outputs.resize(symbols.size());
    run_jobs(symbols.size(), options.jobs, [&](std::size_t i) {
        const std::string& symbol = symbols[i];
        const PriceSeries series = fetch_daily(client, symbol, config.universe.start_date,
                                               config.universe.end_date);
        const std::string out_path = options.out_dir + "/" + symbol + ".csv";
        const std::string text = serialize_bars(series);
        write_file(out_path, text);
        manifest.inputs[i] = digest_file(feed_dir + "/" + symbol + ".csv");
        manifest.outputs[i] = digest_of(out_path, text);
    });

    manifest.command = "fetch";
    manifest.config_path = options.config_path;
    manifest.seed = config.model.seed;
    manifest.inputs.insert(manifest.inputs.begin(), digest_file(options.config_path));
    manifest.duration_ms = watch.elapsed_ms();
    manifest.timestamp = timestamp_utc();
    manifest.engine_version = kEngineVersion;
    write_manifest(manifest, options.out_dir);
    return manifest;
}

RunManifest cmd_train(const CommonOptions& options, const std::string& ticker,
                      const std::string& data_dir) {
    Stopwatch watch;
    const RunConfig config = load_run_config(options.config_path);
    const ModelConfig model = effective_model(config, options);
    const TickerData data = load_ticker_data(config, ticker, data_dir);

    const ScalerParams scaler = fit_scaler(data.train, config.features);
    const WindowedDataset dataset =
        make_windows(data.train, scaler, model.lookback, config.horizon, config.features);
    const TrainResult trained = train(dataset, model, config.validation_fraction);

    ensure_dir(options.out_dir);
    const std::string& code = data.spec.short_code;
    const std::string ckpt_path = options.out_dir + "/model_" + code + ".ckpt";
    save_checkpoint(ckpt_path, Checkpoint{trained.params, scaler, model.seed});
    const std::string history_path = options.out_dir + "/history_" + code + ".csv";
    const std::string history_text = history_to_csv(trained.history);
    write_file(history_path, history_text);

    RunManifest manifest;
    manifest.command = "train";
    manifest.label = code;
    manifest.config_path = options.config_path;
    manifest.seed = model.seed;
    manifest.inputs = {digest_file(options.config_path), data.csv_digest};
    manifest.outputs = {digest_file(ckpt_path), digest_of(history_path, history_text)};
    manifest.duration_ms = watch.elapsed_ms();
    manifest.timestamp = timestamp_utc();
    manifest.engine_version = kEngineVersion;
    write_manifest(manifest, options.out_dir);
    return manifest;
}

namespace {

// Predictions over a windowed view of `series`, plus the day-aligned
// actual closes needed by the trading rule: actual[k] pairs with
// predicted_for_next[k] targeting actual[k+1].
struct AlignedPredictions {
    std::vector<Prediction> predictions;
    std::vector<DatedValue> actual;              // series[lookback-1 ..]
    std::vector<DatedValue> predicted_for_next;  // dates = series[lookback ..]
    WindowedDataset dataset;
};

AlignedPredictions predict_over(const PriceSeries& series, const Checkpoint& checkpoint,
                                const RunConfig& config) {
    if (config.horizon != 1)
        throw ConfigInvalid("the daily trading rule requires horizon == 1");
    AlignedPredictions out;
    out.dataset = make_windows(series, checkpoint.scaler, checkpoint.params.config.lookback,
                               config.horizon, config.features);
    out.predictions = predict_series(checkpoint.params, out.dataset);
    const auto lookback = static_cast<std::size_t>(checkpoint.params.config.lookback);
    for (std::size_t i = lookback - 1; i < series.bars.size(); ++i)
        out.actual.push_back({series.bars[i].date, series.bars[i].close});
    for (const Prediction& p : out.predictions)
        out.predicted_for_next.push_back({p.date, p.price});
    return out;
}

}  // namespace

RunManifest cmd_predict(const CommonOptions& options, const std::string& ticker,
                        const std::string& checkpoint_path, const std::string& data_dir) {
    Stopwatch watch;
    const RunConfig config = load_run_config(options.config_path);
    const TickerData data = load_ticker_data(config, ticker, data_dir);
    const Checkpoint checkpoint = load_checkpoint(checkpoint_path);
    if (checkpoint.scaler.feature_names != config.features)
        throw ScalerMismatch("checkpoint features differ from configured features");

    const AlignedPredictions run = predict_over(data.full, checkpoint, config);
    const std::vector<PredictionRow> rows = to_prediction_rows(
        data.full, run.predictions, checkpoint.params.config.lookback, config.horizon);

    ensure_dir(options.out_dir);
    const std::string& code = data.spec.short_code;
    std::string pred_text = "date,actual,predicted\n";
    for (const PredictionRow& row : rows) {
        char buf[32];
        pred_text += to_string(row.date);
        auto append = [&](double v) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
            (void)ec;
            pred_text.append(buf, ptr);
        };
        pred_text += ',';
        append(row.actual);
        pred_text += ',';
        append(row.predicted);
        pred_text += '\n';
    }
    const std::string pred_path = options.out_dir + "/pred_" + code + ".csv";
    write_file(pred_path, pred_text);

    RunManifest manifest;
    manifest.command = "predict";
    manifest.label = code;
    manifest.config_path = options.config_path;
    manifest.seed = checkpoint.seed;
    manifest.inputs = {digest_file(options.config_path), data.csv_digest,
                       digest_file(checkpoint_path)};
    manifest.outputs = {digest_of(pred_path, pred_text)};
    manifest.duration_ms = watch.elapsed_ms();
    manifest.timestamp = timestamp_utc();
    manifest.engine_version = kEngineVersion;
    write_manifest(manifest, options.out_dir);
    return manifest;
}

RunManifest cmd_backtest(const CommonOptions& options, const std::string& ticker,
                         const std::string& checkpoint_path, const std::string& data_dir) {
    Stopwatch watch;
    if (options.eval_range != "full" && options.eval_range != "test")
        throw ConfigInvalid("--eval-range must be 'full' or 'test'");
    const RunConfig config = load_run_config(options.config_path);
    const TickerData data = load_ticker_data(config, ticker, data_dir);
    const Checkpoint checkpoint = load_checkpoint(checkpoint_path);
    if (checkpoint.scaler.feature_names != config.features)
        throw ScalerMismatch("checkpoint features differ from configured features");

    const int lookback = checkpoint.params.config.lookback;
    const PriceSeries test_series = test_with_context(data.train, data.test, lookback);

    // Metrics always describe the held-out test range.
    const AlignedPredictions test_run = predict_over(test_series, checkpoint, config);
    const std::string& code = data.spec.short_code;
    EvalReport eval;
    eval.ticker = code;
    eval.n_samples = test_run.predictions.size();
    {
        std::vector<double> actual_prices, predicted_prices, predicted_scaled;
        for (std::size_t i = 0; i < test_run.predictions.size(); ++i) {
            actual_prices.push_back(
                test_series.bars[static_cast<std::size_t>(lookback + config.horizon - 1) + i]
                    .close);
            predicted_prices.push_back(test_run.predictions[i].price);
            predicted_scaled.push_back(test_run.predictions[i].scaled);
        }
        eval.mae = mae(actual_prices, predicted_prices);
        eval.huber_loss = test_huber(test_run.dataset.targets, predicted_scaled,
                                     checkpoint.params.config.huber_delta);
        eval.accuracy_score = accuracy_score(test_run.actual, test_run.predicted_for_next);
    }

    // Profits over the selected evaluation range (full period by default).
    const bool full_range = options.eval_range == "full";
    const AlignedPredictions eval_run =
        full_range ? predict_over(data.full, checkpoint, config) : test_run;
    const std::vector<Signal> signals =
        signals_from_predictions(eval_run.actual, eval_run.predicted_for_next);
    const ProfitSummary profit = run_backtest(eval_run.actual, signals, code);

    ensure_dir(options.out_dir);
    const std::string ledger_path = options.out_dir + "/ledger_" + code + ".csv";
    const std::string ledger_text = ledger_csv(eval_run.actual, signals);
    write_file(ledger_path, ledger_text);

    // Plot data: loss curves from the sibling history file (when the
    // checkpoint came from `train`), predictions from the evaluated range.
    TrainHistory history;
    const fs::path history_path =
        fs::path(checkpoint_path).parent_path() / ("history_" + code + ".csv");
    if (fs::exists(history_path)) history = history_from_csv(read_file(history_path.string(), "history"));
    const PriceSeries& eval_series = full_range ? data.full : test_series;
    const std::vector<PredictionRow> rows =
        to_prediction_rows(eval_series, eval_run.predictions, lookback, config.horizon);
    const PlotManifest plots = emit_plot_data(history, rows, code, options.out_dir);

    StockResult row{data.spec, profit, eval};
    const std::string result_path = options.out_dir + "/result_" + code + ".json";
    const std::string result_text = result_to_json(row).dump(2) + "\n";
    write_file(result_path, result_text);

    RunManifest manifest;
    manifest.command = "backtest";
    manifest.label = code;
    manifest.config_path = options.config_path;
    manifest.seed = checkpoint.seed;
    manifest.inputs = {digest_file(options.config_path), data.csv_digest,
                       digest_file(checkpoint_path)};
    manifest.outputs = {digest_of(ledger_path, ledger_text),
                        digest_of(result_path, result_text)};
    for (const std::string& path : plots.paths) manifest.outputs.push_back(digest_file(path));
    manifest.duration_ms = watch.elapsed_ms();
    manifest.timestamp = timestamp_utc();
    manifest.engine_version = kEngineVersion;
    write_manifest(manifest, options.out_dir);
    return manifest;
}

RunManifest cmd_sector_report(const CommonOptions& options, const std::string& results_dir,
                              TableFormat format) {
    Stopwatch watch;
    const RunConfig config = load_run_config(options.config_path);

    RunManifest manifest;
    manifest.inputs.push_back(digest_file(options.config_path));

    ReportDoc doc;
    doc.engine_version = kEngineVersion;
    std::uint64_t run_digest = fnv1a64(read_file(options.config_path, "config"));
    for (const SectorSpec& sector : config.universe.sectors) {
        std::vector<StockResult> rows;
        for (const TickerSpec& spec : sector.tickers) {
            const std::string path = results_dir + "/result_" + spec.short_code + ".json";
            if (!fs::exists(path))
                throw MissingStockResult("no result row for ticker '" + spec.short_code + "'");
            const std::string text = read_file(path, "stock result");
            run_digest ^= fnv1a64(text);
            manifest.inputs.push_back(digest_of(path, text));
            try {
                rows.push_back(result_from_json(json::parse(text)));
            } catch (const json::exception& e) {
                throw IoFailure(path + ": " + e.what());
            }
        }
        doc.sectors.push_back(aggregate_sector(sector.name, rows));
    }
    for (const SectorResult& ranked : rank_sectors(doc.sectors))
        doc.ranking.push_back(ranked.name);
    doc.universe_echo = fs::path(options.config_path).filename().string() + " fnv1a64=" +
                        to_hex(fnv1a64(read_file(options.config_path, "config"))) +
                        " range=" + to_string(config.universe.start_date) + ".." +
                        to_string(config.universe.end_date) +
                        " split=" + to_string(config.universe.split_date);
    doc.generated_at = timestamp_utc();

    ensure_dir(options.out_dir);
    const std::string run_id = to_hex(run_digest);
    const char* extension = format == TableFormat::kMarkdown ? ".md" : ".csv";
    const std::string report_path = options.out_dir + "/report_" + run_id + extension;
    const std::string report_text = render_tables(doc, format);
    write_file(report_path, report_text);

    std::string ranking_text = "rank,sector,avg_ratio_display\n";
    for (std::size_t i = 0; i < doc.ranking.size(); ++i) {
        long long display = 0;
        for (const SectorResult& s : doc.sectors)
            if (s.name == doc.ranking[i]) display = s.avg_ratio_display;
        ranking_text +=
            std::to_string(i + 1) + "," + doc.ranking[i] + "," + std::to_string(display) + "\n";
    }
    const std::string ranking_path = options.out_dir + "/ranking_" + run_id + ".csv";
    write_file(ranking_path, ranking_text);

    manifest.command = "sector-report";
    manifest.config_path = options.config_path;
    manifest.seed = config.model.seed;
    manifest.outputs = {digest_of(report_path, report_text),
                        digest_of(ranking_path, ranking_text)};
    manifest.duration_ms = watch.elapsed_ms();
    manifest.timestamp = timestamp_utc();
    manifest.engine_version = kEngineVersion;
    write_manifest(manifest, options.out_dir);
    return manifest;
}

RunManifest cmd_gridsearch(const CommonOptions& options, const std::string& ticker,
                           const std::string& data_dir, std::size_t max_combinations) {
    Stopwatch watch;
    const RunConfig config = load_run_config(options.config_path);
    const ModelConfig model = effective_model(config, options);
    const TickerData data = load_ticker_data(config, ticker, data_dir);

    const ScalerParams scaler = fit_scaler(data.train, config.features);
    const WindowedDataset dataset =
        make_windows(data.train, scaler, model.lookback, config.horizon, config.features);

    GridSpec grid = config.grid;
    grid.max_combinations = max_combinations;
    const GridResult result = grid_search(grid, model, dataset, config.validation_fraction);

    ensure_dir(options.out_dir);
    const std::string& code = data.spec.short_code;
    std::string table =
        "lstm_units,dense_units,batch_size,epochs,dropout_rate,learning_rate,huber_delta,"
        "final_val_loss\n";
    char buf[32];
    auto append = [&](double v) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        (void)ec;
        table.append(buf, ptr);
    };
    for (const GridEntry& entry : result.table) {
        table += std::to_string(entry.config.lstm_units) + "," +
                 std::to_string(entry.config.dense_units) + "," +
                 std::to_string(entry.config.batch_size) + "," +
                 std::to_string(entry.config.epochs) + ",";
        append(entry.config.dropout_rate);
        table += ',';
        append(entry.config.learning_rate);
        table += ',';
        append(entry.config.huber_delta);
        table += ',';
        append(entry.final_val_loss);
        table += '\n';
    }
    const std::string table_path = options.out_dir + "/gridsearch_" + code + ".csv";
    write_file(table_path, table);
    const std::string best_path = options.out_dir + "/gridbest_" + code + ".json";
    const std::string best_text = model_to_json(result.best).dump(2) + "\n";
    write_file(best_path, best_text);

    RunManifest manifest;
    manifest.command = "gridsearch";
    manifest.label = code;
    manifest.config_path = options.config_path;
    manifest.seed = model.seed;
    manifest.inputs = {digest_file(options.config_path), data.csv_digest};
    manifest.outputs = {digest_of(table_path, table), digest_of(best_path, best_text)};
    manifest.duration_ms = watch.elapsed_ms();
    manifest.timestamp = timestamp_utc();
    manifest.engine_version = kEngineVersion;
    write_manifest(manifest, options.out_dir);
    return manifest;
}

}  // namespace sectorcast
