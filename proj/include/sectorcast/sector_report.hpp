#ifndef SECTORCAST_SECTOR_REPORT_HPP
#define SECTORCAST_SECTOR_REPORT_HPP

#include <string>
#include <vector>

#include "sectorcast/backtest.hpp"
#include "sectorcast/lstm.hpp"
#include "sectorcast/metrics.hpp"

namespace sectorcast {

struct StockResult {
    TickerSpec ticker_spec;
    ProfitSummary profit;
    EvalReport eval;
};

struct SectorResult {
    std::string name;
    std::vector<StockResult> stock_results;
    double avg_ratio = 0.0;            // mean of unrounded per-stock ratios
    long long avg_ratio_display = 0;   // rounded half away from zero, last
    double avg_huber = 0.0;
    double avg_mae = 0.0;
    double avg_accuracy = 0.0;
};

struct ReportDoc {
    std::string universe_echo;   // compact config echo for provenance
    std::vector<SectorResult> sectors;
    std::vector<std::string> ranking;  // sector names, most profitable first
    std::string generated_at;    // provenance only; never rendered
    std::string engine_version;
};

// Arithmetic means over the constituent rows; display rounding applied
// after averaging. Throws EmptySector; the per-row ticker fields must
// agree across sub-records.
SectorResult aggregate_sector(const std::string& name, const std::vector<StockResult>& rows);

// Descending by avg_ratio, ties broken alphabetically by sector name.
// Throws EmptySector, DuplicateSector.
std::vector<SectorResult> rank_sectors(const std::vector<SectorResult>& results);

enum class TableFormat { kMarkdown, kCsv };

// One profit table and one metrics table per sector, columns ordered
// Stock | Profit in Buying | Profit in Selling | Total Profit | Mean
// Price | Total Profit / Mean Price and Stock | Huber Loss | Mean Abs.
// Err. | Acc. Score. Profit columns render as integers, metric columns to
// 6 decimals; each table carries its sector-average footer. Deterministic:
// identical docs yield byte-identical text.
std::string render_tables(const ReportDoc& doc, TableFormat format);

struct PredictionRow {
    Date date;
    double actual = 0.0;
    double predicted = 0.0;
};

struct PlotManifest {
    std::vector<std::string> paths;
};

// Writes `loss_<ticker>.csv` (epoch,train_loss,val_loss) and
// `pred_<ticker>.csv` (date,actual,predicted) under out_dir; parsing the
// emitted files reproduces the in-memory values. Throws IoFailure.
PlotManifest emit_plot_data(const TrainHistory& history,
                            const std::vector<PredictionRow>& predictions,
                            const std::string& ticker, const std::string& out_dir);

}  // namespace sectorcast

#endif  // SECTORCAST_SECTOR_REPORT_HPP
