#include "sectorcast/sector_report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

namespace sectorcast {

namespace {

std::string fixed6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string integer(double v) { return std::to_string(std::llround(v)); }

std::string shortest(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    out << text;
    if (!out) throw IoFailure("write failure on " + path);
}

}  // namespace

SectorResult aggregate_sector(const std::string& name, const std::vector<StockResult>& rows) {
    if (rows.empty()) throw EmptySector("sector '" + name + "' has no stock rows");
    SectorResult sector;
    sector.name = name;
    sector.stock_results = rows;
    for (const StockResult& row : rows) {
        if (row.profit.ticker != row.eval.ticker)
            throw ConfigInvalid("stock row ticker fields disagree: '" + row.profit.ticker +
                                "' vs '" + row.eval.ticker + "'");
        sector.avg_ratio += row.profit.ratio;
        sector.avg_huber += row.eval.huber_loss;
        sector.avg_mae += row.eval.mae;
        sector.avg_accuracy += row.eval.accuracy_score;
    }
    const double n = static_cast<double>(rows.size());
    sector.avg_ratio /= n;
    sector.avg_huber /= n;
    sector.avg_mae /= n;
    sector.avg_accuracy /= n;
    sector.avg_ratio_display = std::llround(sector.avg_ratio);
    return sector;
}

std::vector<SectorResult> rank_sectors(const std::vector<SectorResult>& results) {
    if (results.empty()) throw EmptySector("no sectors to rank");
    std::set<std::string> names;
    for (const SectorResult& s : results)
        if (!names.insert(s.name).second) throw DuplicateSector("duplicate sector '" + s.name + "'");
    std::vector<SectorResult> ranked = results;
    std::sort(ranked.begin(), ranked.end(), [](const SectorResult& a, const SectorResult& b) {
        if (a.avg_ratio != b.avg_ratio) return a.avg_ratio > b.avg_ratio;
        return a.name < b.name;
    });
    return ranked;
}

std::string render_tables(const ReportDoc& doc, TableFormat format) {
    std::string out;
    if (format == TableFormat::kMarkdown) {
        out += "# Sector profitability report\n\n";
        out += "engine: sectorcast " + doc.engine_version + "\n";
        if (!doc.universe_echo.empty()) out += "config: " + doc.universe_echo + "\n";
        out += "\n## Ranking\n\n";
        for (std::size_t i = 0; i < doc.ranking.size(); ++i)
            out += std::to_string(i + 1) + ". " + doc.ranking[i] + "\n";
        for (const SectorResult& sector : doc.sectors) {
            out += "\n## " + sector.name + "\n\n";
            out += "| Stock | Profit in Buying | Profit in Selling | Total Profit | Mean Price "
                   "| Total Profit / Mean Price |\n";
            out += "|---|---|---|---|---|---|\n";
            for (const StockResult& row : sector.stock_results) {
                out += "| " + row.profit.ticker + " | " + integer(row.profit.buy_profit) +
                       " | " + integer(row.profit.sell_profit) + " | " +
                       integer(row.profit.total_profit) + " | " + integer(row.profit.mean_price) +
                       " | " + std::to_string(row.profit.ratio_display) + " |\n";
            }
            out += "\nAvg. profit/mean price of the sector: " +
                   std::to_string(sector.avg_ratio_display) + "\n";
            out += "\n| Stock | Huber Loss | Mean Abs. Err. | Acc. Score |\n";
            out += "|---|---|---|---|\n";
            for (const StockResult& row : sector.stock_results) {
                out += "| " + row.eval.ticker + " | " + fixed6(row.eval.huber_loss) + " | " +
                       fixed6(row.eval.mae) + " | " + fixed6(row.eval.accuracy_score) + " |\n";
            }
            out += "| Average | " + fixed6(sector.avg_huber) + " | " + fixed6(sector.avg_mae) +
                   " | " + fixed6(sector.avg_accuracy) + " |\n";
        }
        return out;
    }

    // CSV: per-sector blocks with the same column order.
    out += "# sectorcast " + doc.engine_version + "\n";
    out += "# ranking," ;
    for (std::size_t i = 0; i < doc.ranking.size(); ++i) {
        if (i) out += ';';
        out += doc.ranking[i];
    }
    out += '\n';
    for (const SectorResult& sector : doc.sectors) {
        out += "# sector," + sector.name + "\n";
        out += "stock,profit_in_buying,profit_in_selling,total_profit,mean_price,"
               "total_profit_over_mean_price\n";
        for (const StockResult& row : sector.stock_results) {
            out += row.profit.ticker + "," + integer(row.profit.buy_profit) + "," +
                   integer(row.profit.sell_profit) + "," + integer(row.profit.total_profit) +
                   "," + integer(row.profit.mean_price) + "," +
                   std::to_string(row.profit.ratio_display) + "\n";
        }
        out += "sector_average,,,,," + std::to_string(sector.avg_ratio_display) + "\n";
        out += "stock,huber_loss,mean_abs_err,acc_score\n";
        for (const StockResult& row : sector.stock_results) {
            out += row.eval.ticker + "," + fixed6(row.eval.huber_loss) + "," +
                   fixed6(row.eval.mae) + "," + fixed6(row.eval.accuracy_score) + "\n";
        }
        out += "average," + fixed6(sector.avg_huber) + "," + fixed6(sector.avg_mae) + "," +
               fixed6(sector.avg_accuracy) + "\n";
    }
    return out;
}

PlotManifest emit_plot_data(const TrainHistory& history,
                            const std::vector<PredictionRow>& predictions,
                            const std::string& ticker, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoFailure("cannot create " + out_dir + ": " + ec.message());

    PlotManifest manifest;
    std::string loss = "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < history.train_loss.size(); ++e)
        loss += std::to_string(e + 1) + "," + shortest(history.train_loss[e]) + "," +
                shortest(history.val_loss[e]) + "\n";
    const std::string loss_path = out_dir + "/loss_" + ticker + ".csv";
    write_text_file(loss_path, loss);
    manifest.paths.push_back(loss_path);

    std::string pred = "date,actual,predicted\n";
    for (const PredictionRow& row : predictions)
        pred += to_string(row.date) + "," + shortest(row.actual) + "," +
                shortest(row.predicted) + "\n";
    const std::string pred_path = out_dir + "/pred_" + ticker + ".csv";
    write_text_file(pred_path, pred);
    manifest.paths.push_back(pred_path);
    return manifest;
}

}  // namespace sectorcast
