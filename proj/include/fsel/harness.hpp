#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fsel/classify.hpp"
#include "fsel/core.hpp"
#include "fsel/gaussian.hpp"
#include "fsel/stats.hpp"
#include "fsel/storage.hpp"

namespace fsel {

enum class Adjust { kNone, kOracle, kEstimated, kEstimatedAugmented };
enum class ProbeKind { kNcc, kLogistic };
enum class RankSource { kOracle, kEstimated };
// kExact integrates the fitted rule against the Gaussian source instead of
// sampling query points; only valid for Gaussian sources.
enum class Evaluation { kSampled, kExact };

struct ExperimentConfig {
  // Exactly one source must be set.
  std::optional<GaussianTaskSpec> gaussian;
  std::shared_ptr<const LabeledFeatureSet> features;

  std::vector<std::size_t> ways{2};
  std::vector<std::size_t> shots{1};
  std::size_t query_per_class = kDefaultQueryPerClass;
  std::size_t n_tasks = 2000;
  // Empty selects the default grid: powers of two below dim, plus dim.
  std::vector<std::size_t> keep_counts;

  Adjust adjust = Adjust::kNone;
  ProbeKind classifier = ProbeKind::kNcc;
  RankSource rank = RankSource::kOracle;
  Evaluation evaluation = Evaluation::kSampled;

  std::size_t views = 0;
  double rho = kDefaultViewNoiseRatio;
  double view_bias = 0.0;
  double epsilon = 1e-6;
  FitConfig fit;

  // table1 knobs.
  std::size_t large_shot = 500;
  std::size_t eval_query = 10000;

  std::uint64_t base_seed = 0;
  std::size_t workers = 1;
  bool progress = false;

  std::size_t dim() const;
  bool is_gaussian() const noexcept { return gaussian.has_value(); }
  // Keep counts after defaulting; validated against dim.
  std::vector<std::size_t> resolved_keep_counts() const;
  void validate() const;
};

std::vector<std::size_t> default_keep_grid(std::size_t dim);

// Named synthetic specs:
//   bench          the two-dimensional bench (mean_b = -mean_a = (1, 10), std (0.6, 10))
//   redundancy512  2 dims with importance 1.5, 510 dims with importance 0.1
//                  (10 of them with a large spread)
//   hetero         16 dims with importance falling from 1.5 to 0.05 and
//                  stds spanning 0.5 to 20, means offset away from zero
std::optional<GaussianTaskSpec> gaussian_preset(const std::string& name);
std::vector<std::string> gaussian_preset_names();

struct Table1Cell {
  std::string dims;        // "one" or "two"
  std::size_t shot = 0;
  std::string classifier;  // "shared", "logreg", "ncc"
  double mean_accuracy = 0.0;  // percent
  double std_error = 0.0;      // percent
  std::size_t n_tasks = 0;
};

struct Table1Report {
  std::vector<Table1Cell> cells;
  const Table1Cell& at(const std::string& dims, std::size_t shot,
                       const std::string& classifier) const;
};

Table1Report run_table1(const ExperimentConfig& cfg);

struct SweepPoint {
  std::size_t keep = 0;
  double mean_error = 0.0;
  double std_error = 0.0;
  std::size_t n_tasks = 0;
};

struct SweepCurve {
  std::size_t way = 0;
  std::size_t shot = 0;
  std::vector<SweepPoint> points;

  const SweepPoint& at_keep(std::size_t keep) const;
};

// One curve per (way, shot) in the config, in config order. Task t always uses
// seed derive_task_seed({base_seed, t}).
std::vector<SweepCurve> run_mask_sweep(const ExperimentConfig& cfg);

struct WayShotEntry {
  std::size_t way = 0;
  std::size_t shot = 0;
  double full_error = 0.0;
  double full_std_error = 0.0;
  double best_error = 0.0;
  double best_std_error = 0.0;
  std::size_t best_keep = 0;

  double gap() const noexcept { return full_error - best_error; }
};

std::vector<WayShotEntry> run_wayshot_grid(const ExperimentConfig& cfg);
WayShotEntry summarize_curve(const SweepCurve& curve);

struct RankStat {
  std::size_t rank = 0;
  double oracle_mean = 0.0;
  double oracle_std = 0.0;
  double estimate_mean = 0.0;
  double estimate_std = 0.0;
  double deviation_mean = 0.0;      // mean of (estimate - oracle)
  double deviation_abs_mean = 0.0;  // mean of |estimate - oracle|
};

struct AggregateStat {
  std::vector<RankStat> ranks;
  double mean_estimate_std() const;
};

// Groups estimates by the oracle rank of their dimension within each task.
AggregateStat aggregate_by_oracle_rank(const std::vector<std::vector<double>>& oracle,
                                       const std::vector<std::vector<double>>& estimate);

struct FiQualityReport {
  std::size_t way = 0;
  std::size_t shot = 0;
  AggregateStat raw;
  std::optional<AggregateStat> augmented;
};

// Raw estimation always; augmented estimation when cfg.views > 0 (Gaussian) or
// the feature file carries groups.
std::vector<FiQualityReport> run_fi_quality(const ExperimentConfig& cfg);

struct TopkFrequency {
  std::size_t k = 0;
  std::size_t n_tasks = 0;
  std::vector<std::size_t> fi_count;
  std::vector<std::size_t> magnitude_count;
};

// Over every class pair: top-k membership by oracle importance and by mean
// absolute feature value over the pair's rows.
TopkFrequency run_topk_frequency(const LabeledFeatureSet& data, std::size_t k);

struct AdjustReport {
  std::size_t way = 0;
  std::size_t shot = 0;
  std::size_t n_tasks = 0;
  double baseline_accuracy = 0.0;  // percent
  double baseline_std_error = 0.0;
  double adjusted_accuracy = 0.0;
  double adjusted_std_error = 0.0;
  double delta = 0.0;              // adjusted - baseline, percent
  double delta_std_error = 0.0;
};

std::vector<AdjustReport> run_adjust_eval(const ExperimentConfig& cfg);

// Result tables, one row per cell/point/rank/dimension.
ResultsTable to_table(const Table1Report& report);
ResultsTable to_table(const std::vector<SweepCurve>& curves);
ResultsTable to_table(const std::vector<WayShotEntry>& grid);
ResultsTable to_table(const std::vector<FiQualityReport>& reports);
ResultsTable to_table(const TopkFrequency& freq);
ResultsTable to_table(const std::vector<AdjustReport>& reports);

double mean_of(const std::vector<double>& v);
// Standard error of the mean with the n-1 sample standard deviation.
double std_error_of(const std::vector<double>& v);

}  // namespace fsel
