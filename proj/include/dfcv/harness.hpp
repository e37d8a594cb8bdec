#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dfcv {

// Monte Carlo comparison of psi estimators over the mixture catalog:
// RRMSE per (density, n, estimator) cell, ratio-to-best within each
// (density, n) row, and per-estimator summaries of the ratios.

struct ExperimentConfig {
  std::vector<int> densities;                        // catalog ids
  std::vector<int> sizes{100, 1000};                 // sample sizes
  int replicates = 500;                              // B
  std::vector<std::string> estimators{"CT", "SHD", "JS"};
  std::uint64_t base_seed = 42;
  int workers = 1;
};

// One replicate; every estimator sees the identical sample (paired design),
// which the checksum lets downstream consumers verify.
struct ReplicateRecord {
  int density = 0;
  int n = 0;
  int replicate = 0;
  std::uint64_t sample_checksum = 0;
  std::vector<double> estimates;   // parallel to config.estimators; NaN = failed
  std::vector<std::string> notes;  // nonempty = failure message or fallback flag
};

struct CellStat {
  int density = 0;
  int n = 0;
  std::string estimator;
  double rrmse = 0.0;   // over replicates with a value
  double ratio = 0.0;   // rrmse / row minimum; exactly 1.0 for the best
  int failures = 0;     // replicates with no value
  int fallbacks = 0;    // flagged replicates whose value is still used
};

struct SummaryRow {
  std::string estimator;
  int n = 0;
  double mean_ratio = 0.0;
  double median_ratio = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ReplicateRecord> records;  // (density, size, replicate)-major
  std::vector<CellStat> cells;           // (density, size, estimator)-major
  std::vector<SummaryRow> summary;       // (estimator, size)-major
};

// Runs the full grid.  Replicates are the unit of parallelism; each writes
// only its preassigned slot, so results are byte-identical for any worker
// count.  Replicate seeds come from derive_seed(base, density, n, replicate).
// Estimator exceptions are recorded (NaN + note), never rethrown; fallback
// estimates (flagged solve-the-equation roots) keep their value but are
// counted and reported.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Writes summary.csv, cells.csv, reldist.csv (per-replicate relative errors
// with sample checksums) and failures.csv under dir, creating it if needed.
// All files carry a header row; numbers are shortest-round-trip formatted.
void export_csv(const ExperimentResult& r, const std::string& dir);

// JSON mirror of the CSV content (config, summary, cells, replicates).
std::string result_json(const ExperimentResult& r);

// "1,3,5-7" -> {1, 3, 5, 6, 7}; order kept, malformed tokens rejected.
std::vector<int> parse_id_list(const std::string& text);

// Flat key=value file ('#' comments): densities, n, B, estimators, seed,
// workers.  Missing keys keep the defaults above (densities: full catalog).
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace dfcv
