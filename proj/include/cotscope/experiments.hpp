#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cotscope/config.hpp"
#include "cotscope/results.hpp"

namespace cotscope {

enum class Analysis { difficulty, ig, flow, mif, faith_grid, recall_analysis };

std::string_view to_string(Analysis a);
std::optional<Analysis> parse_analysis(std::string_view name);

/// Outcome of one subcommand. Per-sample failures are counted in `errors`
/// and listed in errors.csv; the remaining results are still written.
struct RunReport {
  std::filesystem::path dir;
  std::string fingerprint;
  std::size_t samples = 0;
  std::size_t errors = 0;
  std::vector<MetricRecord> aggregates;
};

/// Accuracy with and without CoT, and their difference.
/// Writes <output_dir>/effectiveness/{metrics,per_sample,figure1}.csv.
RunReport run_effectiveness(const RunConfig& cfg);

/// One of the analysis subcommands; writes <output_dir>/<name>/.
///   difficulty       difficulty.csv, figure2.csv (level accuracy), figure3.csv (histogram)
///   ig               ig_faithful.csv, ig_unfaithful.csv, ig_average.csv
///   flow             curves.csv, figure5.csv, attribution/<id>.tsv
///   mif              mif.csv (figure 6 data)
///   faith-grid       labels.csv, table1.csv
///   recall-analysis  recall.csv, per_sample.csv (settings unfaithful/average/random)
RunReport run_analysis(const RunConfig& cfg, Analysis which);

/// QUIRE against plain SC and the two ablations.
/// Writes <output_dir>/quire/{metrics,table2,per_sample}.csv and audit.jsonl.
RunReport run_quire_experiment(const RunConfig& cfg);

/// Collects aggregate records from every subcommand directory under
/// output_dir into <output_dir>/report/summary.csv.
RunReport run_report(const RunConfig& cfg);

}  // namespace cotscope
