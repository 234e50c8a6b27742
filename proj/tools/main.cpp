#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sectorcast/cli.hpp"
#include "sectorcast/version.hpp"

int main(int argc, char** argv) {
    using namespace sectorcast;

    CLI::App app{"Daily stock forecasting, trading backtest and sector profitability reports"};
    app.set_version_flag("--version", std::string("sectorcast ") + kEngineVersion);
    app.require_subcommand(1);

    CommonOptions options;
    std::string ticker, checkpoint, data_dir, results_dir, format = "md";
    std::size_t max_combinations = 16;

    auto add_common = [&](CLI::App* cmd, bool with_seed = true) {
        cmd->add_option("--config", options.config_path, "Run configuration (JSON)")
            ->required();
        cmd->add_option("--out", options.out_dir, "Output directory");
        if (with_seed) cmd->add_option("--seed", options.seed, "Override the model seed");
    };

    CLI::App* fetch = app.add_subcommand("fetch", "Pull daily bars for every configured ticker");
    add_common(fetch, false);
    fetch->add_option("--feed-dir", options.feed_dir,
                      "Directory feed (falls back to $SECTORCAST_FEED_DIR)");
    fetch->add_option("--jobs", options.jobs, "Concurrent tickers")->check(CLI::PositiveNumber);

    CLI::App* train = app.add_subcommand("train", "Train the forecaster for one ticker");
    add_common(train);
    train->add_option("--ticker", ticker, "Symbol or short code")->required();
    train->add_option("--data", data_dir, "Directory of fetched CSVs")->required();

    CLI::App* predict = app.add_subcommand("predict", "Emit next-day predictions for one ticker");
    add_common(predict, false);
    predict->add_option("--ticker", ticker, "Symbol or short code")->required();
    predict->add_option("--checkpoint", checkpoint, "Trained model checkpoint")->required();
    predict->add_option("--data", data_dir, "Directory of fetched CSVs")->required();

    CLI::App* backtest =
        app.add_subcommand("backtest", "Run the daily trading rule and quality metrics");
    add_common(backtest, false);
    backtest->add_option("--ticker", ticker, "Symbol or short code")->required();
    backtest->add_option("--checkpoint", checkpoint, "Trained model checkpoint")->required();
    backtest->add_option("--data", data_dir, "Directory of fetched CSVs")->required();
    backtest->add_option("--eval-range", options.eval_range, "full | test")
        ->check(CLI::IsMember({"full", "test"}));

    CLI::App* report = app.add_subcommand("sector-report", "Aggregate stock results per sector");
    add_common(report, false);
    report->add_option("--results", results_dir, "Directory of result_<code>.json rows")
        ->required();
    report->add_option("--format", format, "md | csv")->check(CLI::IsMember({"md", "csv"}));

    CLI::App* grid = app.add_subcommand("gridsearch", "Bounded hyperparameter sweep");
    add_common(grid);
    grid->add_option("--ticker", ticker, "Symbol or short code")->required();
    grid->add_option("--data", data_dir, "Directory of fetched CSVs")->required();
    grid->add_option("--max-combos", max_combinations, "Cap on grid combinations")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (fetch->parsed()) {
            cmd_fetch(options);
        } else if (train->parsed()) {
            cmd_train(options, ticker, data_dir);
        } else if (predict->parsed()) {
            cmd_predict(options, ticker, checkpoint, data_dir);
        } else if (backtest->parsed()) {
            cmd_backtest(options, ticker, checkpoint, data_dir);
        } else if (report->parsed()) {
            cmd_sector_report(options, results_dir,
                              format == "csv" ? TableFormat::kCsv : TableFormat::kMarkdown);
        } else if (grid->parsed()) {
            cmd_gridsearch(options, ticker, data_dir, max_combinations);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
