#ifndef SECTORCAST_CLI_HPP
#define SECTORCAST_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sectorcast/lstm.hpp"
#include "sectorcast/market_data.hpp"
#include "sectorcast/sector_report.hpp"

namespace sectorcast {

// Everything a run reads from the JSON config file: the ticker universe,
// model settings, feature list and validation fraction, plus an optional
// grid section for `gridsearch`.
struct RunConfig {
    UniverseConfig universe;
    ModelConfig model;
    std::vector<std::string> features = {"close"};
    int horizon = 1;
    double validation_fraction = 0.1;
    GridSpec grid;
};

// Throws ConfigInvalid on unreadable/unparsable files or violated
// invariants.
RunConfig load_run_config(const std::string& path);

// Resolves a user-supplied ticker (symbol or short code) against the
// universe. Throws ConfigInvalid when unknown.
const TickerSpec& resolve_ticker(const UniverseConfig& universe, const std::string& ticker);

struct FileDigest {
    std::string path;
    std::string fnv1a64_hex;
};

// Provenance record written next to each command's outputs. The wall
// clock lives only here; every other artifact is byte-stable under rerun.
struct RunManifest {
    std::string command;
    std::string label;  // filename suffix, e.g. the ticker short code
    std::string config_path;
    std::uint64_t seed = 0;
    std::vector<FileDigest> inputs;
    std::vector<FileDigest> outputs;
    double duration_ms = 0.0;
    std::string timestamp;  // ISO-8601 UTC
    std::string engine_version;
};

std::string manifest_to_json(const RunManifest& manifest);

// Writes manifest_<command>[_<label>].json under out_dir, returns the path.
std::string write_manifest(const RunManifest& manifest, const std::string& out_dir);

struct CommonOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides the config seed
    int jobs = 1;
    std::string eval_range = "full";  // full | test
    std::string feed_dir;             // fetch only; falls back to SECTORCAST_FEED_DIR
};

// fetch: one canonical CSV per configured ticker, pulled through the
// injectable feed client (file-backed unless a real endpoint is wired in).
RunManifest cmd_fetch(const CommonOptions& options);

// train: slice -> split -> fit scaler on train -> windows -> train; writes
// model_<code>.ckpt and history_<code>.csv.
RunManifest cmd_train(const CommonOptions& options, const std::string& ticker,
                      const std::string& data_dir);

// predict: infer over the full configured range; writes pred_<code>.csv.
RunManifest cmd_predict(const CommonOptions& options, const std::string& ticker,
                        const std::string& checkpoint_path, const std::string& data_dir);

// backtest: predictions -> signals -> profits over the evaluation range,
// metrics over the held-out test range; writes ledger_<code>.csv,
// pred_<code>.csv and result_<code>.json.
RunManifest cmd_backtest(const CommonOptions& options, const std::string& ticker,
                         const std::string& checkpoint_path, const std::string& data_dir);

// sector-report: collects result_<code>.json for every configured ticker,
// aggregates, ranks and renders report_<run-id>.{md,csv} + ranking CSV.
RunManifest cmd_sector_report(const CommonOptions& options, const std::string& results_dir,
                              TableFormat format);

// gridsearch: bounded hyperparameter sweep on the training split; writes
// gridsearch_<code>.csv and the winning config as JSON.
RunManifest cmd_gridsearch(const CommonOptions& options, const std::string& ticker,
                           const std::string& data_dir, std::size_t max_combinations);

}  // namespace sectorcast

#endif  // SECTORCAST_CLI_HPP
