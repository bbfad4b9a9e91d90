#include "fsel/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <string>

#include "fsel/error.hpp"
#include "fsel/parallel.hpp"
#include "fsel/select.hpp"

namespace fsel {

// ---------------------------------------------------------------------------
// Config

std::size_t ExperimentConfig::dim() const {
  if (gaussian) return gaussian->dim();
  if (features) return features->dim();
  return 0;
}

std::vector<std::size_t> default_keep_grid(std::size_t dim) {
  std::vector<std::size_t> grid;
  for (std::size_t k = 1; k < dim; k *= 2) grid.push_back(k);
  grid.push_back(dim);
  return grid;
}

std::vector<std::size_t> ExperimentConfig::resolved_keep_counts() const {
  const std::size_t d = dim();
  if (keep_counts.empty()) return default_keep_grid(d);
  for (std::size_t i = 0; i < keep_counts.size(); ++i) {
    const std::size_t k = keep_counts[i];
    if (k == 0 || k > d) {
      throw ValidationError("keep count " + std::to_string(k) + " outside [1, " +
                            std::to_string(d) + "]");
    }
    if (i > 0 && k <= keep_counts[i - 1]) {
      throw ValidationError("keep counts must be strictly ascending (" +
                            std::to_string(keep_counts[i - 1]) + " then " +
                            std::to_string(k) + ")");
    }
  }
  return keep_counts;
}

void ExperimentConfig::validate() const {
  if (gaussian.has_value() == (features != nullptr)) {
    throw ValidationError("exactly one source (gaussian spec or feature file) is required");
  }
  if (gaussian) gaussian->validate();
  if (n_tasks < 1) throw ValidationError("n_tasks must be >= 1");
  if (ways.empty() || shots.empty()) throw ValidationError("ways and shots must be non-empty");
  for (auto w : ways) {
    if (w < 2) throw ValidationError("way must be >= 2, got " + std::to_string(w));
    if (gaussian && w != 2) {
      throw ValidationError("gaussian source is binary; way must be 2, got " +
                            std::to_string(w));
    }
    if (features && w > features->n_classes()) {
      throw ValidationError("way " + std::to_string(w) + " exceeds the " +
                            std::to_string(features->n_classes()) + " classes in the data");
    }
  }
  for (auto s : shots) {
    if (s < 1) throw ValidationError("shot must be >= 1");
  }
  if (query_per_class < 1) throw ValidationError("query_per_class must be >= 1");
  resolved_keep_counts();
  if (evaluation == Evaluation::kExact && !gaussian) {
    throw ValidationError("exact evaluation needs a gaussian source");
  }
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw ValidationError("rho must be >= 0");
  if (!std::isfinite(view_bias)) throw ValidationError("view bias must be finite");
  if (!(epsilon >= 0.0)) throw ValidationError("epsilon must be >= 0");
  if (adjust == Adjust::kEstimatedAugmented && gaussian && views == 0) {
    throw ValidationError("estimated-augmented adjustment needs views >= 1");
  }
  if (adjust == Adjust::kEstimatedAugmented && features && !features->has_groups()) {
    throw ValidationError("estimated-augmented adjustment needs a feature file with groups");
  }
  if (views > 0 && features) {
    throw ValidationError("simulated views need a gaussian source; feature files carry their own");
  }
  if (large_shot < 1 || eval_query < 1) {
    throw ValidationError("large_shot and eval_query must be >= 1");
  }
}

std::optional<GaussianTaskSpec> gaussian_preset(const std::string& name) {
  if (name == "bench") return GaussianTaskSpec::bench_example();
  if (name == "redundancy512") {
    GaussianTaskSpec spec;
    for (std::size_t i = 0; i < 512; ++i) {
      double sd = 1.0, omega = 0.1;
      if (i < 2) {
        omega = 1.5;
      } else if (i < 12) {
        sd = 30.0;
      }
      spec.stddev.push_back(sd);
      spec.mean_a.push_back(-omega * sd);
      spec.mean_b.push_back(omega * sd);
    }
    return spec;
  }
  if (name == "hetero") {
    GaussianTaskSpec spec;
    const std::size_t m = 16;
    for (std::size_t i = 0; i < m; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(m - 1);
      const double sd = 0.5 * std::pow(40.0, f);
      const double omega = 1.5 + (0.05 - 1.5) * f;
      const double center = 3.0 * sd;
      spec.stddev.push_back(sd);
      spec.mean_a.push_back(center - omega * sd);
      spec.mean_b.push_back(center + omega * sd);
    }
    return spec;
  }
  return std::nullopt;
}

std::vector<std::string> gaussian_preset_names() { return {"bench", "redundancy512", "hetero"}; }

// ---------------------------------------------------------------------------
// Small statistics helpers

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

namespace {

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

double std_error_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  return sample_std(v) / std::sqrt(static_cast<double>(v.size()));
}

namespace {

// ---------------------------------------------------------------------------
// Progress on stderr, roughly every tenth of the work.

class Progress {
 public:
  Progress(bool enabled, std::string label, std::size_t total)
      : enabled_(enabled), label_(std::move(label)), total_(total) {}

  void tick() {
    if (!enabled_) return;
    const std::size_t done = ++done_;
    const std::size_t step = std::max<std::size_t>(1, total_ / 10);
    if (done % step == 0 || done == total_) {
      std::lock_guard<std::mutex> lock(mutex_);
      std::fprintf(stderr, "%s: %zu/%zu\n", label_.c_str(), done, total_);
    }
  }

 private:
  bool enabled_;
  std::string label_;
  std::size_t total_;
  std::atomic<std::size_t> done_{0};
  std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Task sources

struct TaskDraw {
  Episode ep;
  std::optional<ImportanceVector> oracle;
  std::vector<double> oracle_mean;
};

constexpr std::uint64_t kViewStream = 0x7669657773ULL;

class Source {
 public:
  explicit Source(const ExperimentConfig& cfg) : cfg_(cfg) {
    cfg.validate();
    if (cfg.features) {
      // Population proxy: statistics of every base sample in the file.
      const LabeledFeatureSet base = cfg.features->base_rows();
      const auto counts = base.class_counts();
      const bool enough =
          std::all_of(counts.begin(), counts.end(), [](std::size_t n) { return n >= 2; });
      if (enough) full_ = class_stats(base, VarianceSpec::sample());
    }
  }

  TaskDraw draw(std::size_t way, std::size_t shot, std::size_t query,
                std::uint64_t seed) const {
    TaskDraw d;
    if (cfg_.gaussian) {
      const auto& spec = *cfg_.gaussian;
      d.ep = sample_task(spec, shot, query, seed);
      if (cfg_.views > 0) {
        ViewOptions opt{cfg_.views, cfg_.rho, cfg_.view_bias};
        d.ep = simulate_views(d.ep, spec, opt, derive_task_seed({seed, kViewStream}));
      }
      d.oracle = spec.oracle_importance();
      d.oracle_mean = spec.overall_mean();
      return d;
    }
    d.ep = sample_episode(*cfg_.features, way, shot, query, seed);
    if (full_) {
      d.oracle = importance_for_classes(*full_, d.ep.classes, Provenance::kOracle);
      d.oracle_mean.assign(full_->dim(), 0.0);
      for (auto c : d.ep.classes) {
        const auto m = full_->mean.row(c);
        for (std::size_t k = 0; k < m.size(); ++k) d.oracle_mean[k] += m[k];
      }
      for (double& v : d.oracle_mean) v /= static_cast<double>(d.ep.classes.size());
    }
    return d;
  }

  const ImportanceVector& require_oracle(const TaskDraw& d) const {
    if (!d.oracle) {
      throw ValidationError("oracle importance needs >= 2 base samples in every class");
    }
    return *d.oracle;
  }

 private:
  const ExperimentConfig& cfg_;
  std::optional<ClassStats> full_;
};

// ---------------------------------------------------------------------------
// One task: rank, mask, optionally adjust, fit, evaluate.

struct Adjustment {
  ImportanceVector omega;
  std::vector<double> mean;
  // Rows whose mean squared norm the scales preserve, before masking.
  const LabeledFeatureSet* norm_rows = nullptr;
};

LinearClassifier fit_probe(const ExperimentConfig& cfg, const LabeledFeatureSet& train) {
  return cfg.classifier == ProbeKind::kNcc ? fit_ncc(train) : fit_logreg(train, cfg.fit);
}

class TaskRunner {
 public:
  TaskRunner(const ExperimentConfig& cfg, const Source& source)
      : cfg_(cfg), source_(source) {}

  // Error per keep count, in keep order.
  std::vector<double> errors(const TaskDraw& d, const std::vector<std::size_t>& keeps,
                             Adjust adjust) const {
    const LabeledFeatureSet base = d.ep.train.base_rows();
    const ImportanceVector rank_fi = cfg_.rank == RankSource::kOracle
                                         ? source_.require_oracle(d)
                                         : importance_estimated(d.ep.train);
    const auto ranking = rank_dimensions(rank_fi);

    std::optional<Adjustment> adj;
    if (adjust != Adjust::kNone) adj = adjustment(d, base, adjust);

    std::vector<double> out;
    out.reserve(keeps.size());
    for (std::size_t keep : keeps) {
      const MaskSpec mask{keep, ranking};
      LabeledFeatureSet train = hard_mask(base, mask);
      std::vector<double> t(base.dim(), 0.0);
      for (std::size_t i = 0; i < keep; ++i) t[ranking[i]] = 1.0;

      std::optional<ScaleVector> scales;
      if (adj) {
        const LabeledFeatureSet norm_rows = hard_mask(*adj->norm_rows, mask);
        scales = soft_mask_scales(adj->omega, adj->mean, norm_rows, cfg_.epsilon);
        train = apply_scales(train, *scales);
        for (std::size_t k = 0; k < t.size(); ++k) t[k] *= scales->s[k];
      }
      const LinearClassifier clf = fit_probe(cfg_, train);

      if (cfg_.evaluation == Evaluation::kExact) {
        // The probe sees t * z, so the rule on raw features has weights w * t.
        std::vector<double> w(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) {
          w[k] = (clf.weights(1, k) - clf.weights(0, k)) * t[k];
        }
        out.push_back(linear_rule_error(*cfg_.gaussian, w, clf.bias[1] - clf.bias[0]));
      } else {
        LabeledFeatureSet query = hard_mask(d.ep.query, mask);
        if (scales) query = apply_scales(query, *scales);
        out.push_back(evaluate(clf, query));
      }
    }
    return out;
  }

 private:
  Adjustment adjustment(const TaskDraw& d, const LabeledFeatureSet& base,
                        Adjust adjust) const {
    Adjustment a;
    switch (adjust) {
      case Adjust::kOracle:
        a.omega = source_.require_oracle(d);
        a.mean = d.oracle_mean;
        a.norm_rows = &base;
        break;
      case Adjust::kEstimated:
        a.omega = importance_estimated(base);
        a.mean = class_stats(base, VarianceSpec::fixed()).overall_mean;
        a.norm_rows = &base;
        break;
      case Adjust::kEstimatedAugmented:
        if (!d.ep.train.has_groups()) {
          throw ValidationError("estimated-augmented adjustment needs views in the train split");
        }
        a.omega = importance_estimated(d.ep.train);
        a.mean = class_stats(d.ep.train, VarianceSpec::fixed()).overall_mean;
        a.norm_rows = &d.ep.train;
        break;
      case Adjust::kNone:
        break;
    }
    return a;
  }

  const ExperimentConfig& cfg_;
  const Source& source_;
};

std::vector<std::vector<double>> run_tasks(const ExperimentConfig& cfg, const Source& source,
                                           std::size_t way, std::size_t shot,
                                           const std::vector<std::size_t>& keeps,
                                           Adjust adjust, const std::string& label) {
  const TaskRunner runner(cfg, source);
  Progress progress(cfg.progress, label, cfg.n_tasks);
  return parallel_map(cfg.n_tasks, cfg.workers, [&](std::size_t t) {
    const TaskDraw d =
        source.draw(way, shot, cfg.query_per_class, derive_task_seed({cfg.base_seed, t}));
    auto e = runner.errors(d, keeps, adjust);
    progress.tick();
    return e;
  });
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t j) {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i][j];
  return out;
}

std::string way_shot_label(const char* what, std::size_t way, std::size_t shot) {
  return std::string(what) + " " + std::to_string(way) + "-way " + std::to_string(shot) +
         "-shot";
}

}  // namespace

// ---------------------------------------------------------------------------
// table1

const Table1Cell& Table1Report::at(const std::string& dims, std::size_t shot,
                                   const std::string& classifier) const {
  for (const auto& c : cells) {
    if (c.dims == dims && c.shot == shot && c.classifier == classifier) return c;
  }
  throw ValidationError("no table cell " + dims + "/" + std::to_string(shot) + "/" +
                        classifier);
}

Table1Report run_table1(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  if (!cfg.gaussian && !cfg.features) cfg.gaussian = GaussianTaskSpec::bench_example();
  if (!cfg.gaussian) throw ValidationError("table1 needs a gaussian source");
  if (cfg.gaussian->dim() != 2) throw ValidationError("table1 needs a two-dimensional spec");
  cfg.ways = {2};
  cfg.shots = {1};
  cfg.keep_counts = {1, 2};
  cfg.rank = RankSource::kOracle;
  cfg.adjust = Adjust::kNone;
  cfg.views = 0;
  const Source source(cfg);

  ExperimentConfig ncc = cfg;
  ncc.classifier = ProbeKind::kNcc;
  ncc.evaluation = Evaluation::kExact;
  ExperimentConfig logreg = cfg;
  logreg.classifier = ProbeKind::kLogistic;
  logreg.evaluation = Evaluation::kSampled;
  const std::vector<std::size_t> keeps{1, 2};

  struct PerTask {
    std::vector<double> shared, ncc, logreg;
  };
  Progress progress(cfg.progress, "table1", cfg.n_tasks);
  const TaskRunner ncc_runner(ncc, source);
  const TaskRunner logreg_runner(logreg, source);
  const auto per = parallel_map(cfg.n_tasks, cfg.workers, [&](std::size_t t) {
    const std::uint64_t seed = derive_task_seed({cfg.base_seed, t});
    PerTask out;
    const TaskDraw small = source.draw(2, 1, cfg.query_per_class, seed);
    out.shared = ncc_runner.errors(small, keeps, Adjust::kNone);
    const TaskDraw large = source.draw(2, cfg.large_shot, cfg.eval_query, seed);
    out.ncc = ncc_runner.errors(large, keeps, Adjust::kNone);
    out.logreg = logreg_runner.errors(large, keeps, Adjust::kNone);
    progress.tick();
    return out;
  });

  Table1Report report;
  auto add = [&](const char* dims, std::size_t shot, const char* name, std::size_t j,
                 std::vector<double> PerTask::*field) {
    std::vector<double> acc(per.size());
    for (std::size_t i = 0; i < per.size(); ++i) acc[i] = 100.0 * (1.0 - (per[i].*field)[j]);
    report.cells.push_back({dims, shot, name, mean_of(acc), std_error_of(acc), per.size()});
  };
  add("one", 1, "shared", 0, &PerTask::shared);
  add("two", 1, "shared", 1, &PerTask::shared);
  add("one", cfg.large_shot, "logreg", 0, &PerTask::logreg);
  add("two", cfg.large_shot, "logreg", 1, &PerTask::logreg);
  add("one", cfg.large_shot, "ncc", 0, &PerTask::ncc);
  add("two", cfg.large_shot, "ncc", 1, &PerTask::ncc);
  return report;
}

// ---------------------------------------------------------------------------
// Sweeps

const SweepPoint& SweepCurve::at_keep(std::size_t keep) const {
  for (const auto& p : points) {
    if (p.keep == keep) return p;
  }
  throw ValidationError("no sweep point at keep " + std::to_string(keep));
}

std::vector<SweepCurve> run_mask_sweep(const ExperimentConfig& cfg) {
  const Source source(cfg);
  const auto keeps = cfg.resolved_keep_counts();
  std::vector<SweepCurve> curves;
  for (auto way : cfg.ways) {
    for (auto shot : cfg.shots) {
      const auto rows = run_tasks(cfg, source, way, shot, keeps, cfg.adjust,
                                  way_shot_label("mask-sweep", way, shot));
      SweepCurve curve{way, shot, {}};
      for (std::size_t j = 0; j < keeps.size(); ++j) {
        const auto e = column(rows, j);
        curve.points.push_back({keeps[j], mean_of(e), std_error_of(e), e.size()});
      }
      curves.push_back(std::move(curve));
    }
  }
  return curves;
}

WayShotEntry summarize_curve(const SweepCurve& curve) {
  if (curve.points.empty()) throw ValidationError("empty sweep curve");
  WayShotEntry e;
  e.way = curve.way;
  e.shot = curve.shot;
  const SweepPoint& full = curve.points.back();
  e.full_error = full.mean_error;
  e.full_std_error = full.std_error;
  const SweepPoint* best = &curve.points.front();
  for (const auto& p : curve.points) {
    if (p.mean_error < best->mean_error) best = &p;
  }
  e.best_error = best->mean_error;
  e.best_std_error = best->std_error;
  e.best_keep = best->keep;
  return e;
}

std::vector<WayShotEntry> run_wayshot_grid(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  auto keeps = cfg.resolved_keep_counts();
  if (keeps.back() != cfg.dim()) keeps.push_back(cfg.dim());
  cfg.keep_counts = keeps;
  std::vector<WayShotEntry> grid;
  for (const auto& curve : run_mask_sweep(cfg)) grid.push_back(summarize_curve(curve));
  return grid;
}

// ---------------------------------------------------------------------------
// Importance estimation quality

double AggregateStat::mean_estimate_std() const {
  if (ranks.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : ranks) s += r.estimate_std;
  return s / static_cast<double>(ranks.size());
}

AggregateStat aggregate_by_oracle_rank(const std::vector<std::vector<double>>& oracle,
                                       const std::vector<std::vector<double>>& estimate) {
  if (oracle.size() != estimate.size() || oracle.empty()) {
    throw ValidationError("aggregate_by_oracle_rank: need matching, non-empty task lists");
  }
  const std::size_t dim = oracle.front().size();
  std::vector<std::vector<double>> by_rank_oracle(dim), by_rank_est(dim);
  for (std::size_t t = 0; t < oracle.size(); ++t) {
    if (oracle[t].size() != dim || estimate[t].size() != dim) {
      throw ValidationError("aggregate_by_oracle_rank: inconsistent dims");
    }
    ImportanceVector iv{oracle[t], Provenance::kOracle, false};
    const auto ranking = rank_dimensions(iv);
    for (std::size_t r = 0; r < dim; ++r) {
      by_rank_oracle[r].push_back(oracle[t][ranking[r]]);
      by_rank_est[r].push_back(estimate[t][ranking[r]]);
    }
  }
  AggregateStat out;
  for (std::size_t r = 0; r < dim; ++r) {
    RankStat s;
    s.rank = r;
    s.oracle_mean = mean_of(by_rank_oracle[r]);
    s.oracle_std = sample_std(by_rank_oracle[r]);
    s.estimate_mean = mean_of(by_rank_est[r]);
    s.estimate_std = sample_std(by_rank_est[r]);
    double dev = 0.0, dev_abs = 0.0;
    for (std::size_t i = 0; i < by_rank_est[r].size(); ++i) {
      const double d = by_rank_est[r][i] - by_rank_oracle[r][i];
      dev += d;
      dev_abs += std::abs(d);
    }
    const double n = static_cast<double>(by_rank_est[r].size());
    s.deviation_mean = dev / n;
    s.deviation_abs_mean = dev_abs / n;
    out.ranks.push_back(s);
  }
  return out;
}

std::vector<FiQualityReport> run_fi_quality(const ExperimentConfig& cfg) {
  const Source source(cfg);
  std::vector<FiQualityReport> reports;
  for (auto way : cfg.ways) {
    for (auto shot : cfg.shots) {
      struct PerTask {
        std::vector<double> oracle, raw, augmented;
      };
      Progress progress(cfg.progress, way_shot_label("fi-quality", way, shot), cfg.n_tasks);
      const auto per = parallel_map(cfg.n_tasks, cfg.workers, [&](std::size_t t) {
        const TaskDraw d = source.draw(way, shot, cfg.query_per_class,
                                       derive_task_seed({cfg.base_seed, t}));
        PerTask out;
        out.oracle = source.require_oracle(d).omega;
        out.raw = importance_estimated(d.ep.train.base_rows()).omega;
        if (d.ep.train.has_groups()) out.augmented = importance_estimated(d.ep.train).omega;
        progress.tick();
        return out;
      });
      std::vector<std::vector<double>> oracle, raw, augmented;
      for (const auto& p : per) {
        oracle.push_back(p.oracle);
        raw.push_back(p.raw);
        if (!p.augmented.empty()) augmented.push_back(p.augmented);
      }
      FiQualityReport rep{way, shot, aggregate_by_oracle_rank(oracle, raw), std::nullopt};
      if (augmented.size() == oracle.size()) {
        rep.augmented = aggregate_by_oracle_rank(oracle, augmented);
      }
      reports.push_back(std::move(rep));
    }
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Top-k frequency

TopkFrequency run_topk_frequency(const LabeledFeatureSet& data, std::size_t k) {
  const std::size_t dim = data.dim();
  const std::size_t classes = data.n_classes();
  if (classes < 2) throw ValidationError("top-k frequency needs >= 2 classes");
  if (k == 0 || k > dim) {
    throw ValidationError("k " + std::to_string(k) + " outside [1, " + std::to_string(dim) + "]");
  }
  const ClassStats stats = class_stats(data, VarianceSpec::sample());

  // Per-class sums of |feature| so pair averages weight every row equally.
  Matrix abs_sum(classes, dim);
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto s = abs_sum.row(data.labels()[i]);
    const auto x = data.features().row(i);
    for (std::size_t j = 0; j < dim; ++j) s[j] += std::abs(x[j]);
  }

  TopkFrequency out;
  out.k = k;
  out.fi_count.assign(dim, 0);
  out.magnitude_count.assign(dim, 0);
  for (std::size_t a = 0; a < classes; ++a) {
    for (std::size_t b = a + 1; b < classes; ++b) {
      const auto fi = importance_binary(stats, a, b);
      const auto fi_rank = rank_dimensions(fi);
      ImportanceVector mag;
      mag.omega.resize(dim);
      const double n = static_cast<double>(stats.counts[a] + stats.counts[b]);
      for (std::size_t j = 0; j < dim; ++j) mag.omega[j] = (abs_sum(a, j) + abs_sum(b, j)) / n;
      const auto mag_rank = rank_dimensions(mag);
      for (std::size_t r = 0; r < k; ++r) {
        ++out.fi_count[fi_rank[r]];
        ++out.magnitude_count[mag_rank[r]];
      }
      ++out.n_tasks;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Soft-mask evaluation

std::vector<AdjustReport> run_adjust_eval(const ExperimentConfig& cfg) {
  if (cfg.adjust == Adjust::kNone) {
    throw ValidationError("adjust-eval needs an adjustment (estimated, estimated-augmented or oracle)");
  }
  const Source source(cfg);
  const std::vector<std::size_t> keeps{cfg.dim()};
  std::vector<AdjustReport> reports;
  for (auto way : cfg.ways) {
    for (auto shot : cfg.shots) {
      const TaskRunner runner(cfg, source);
      Progress progress(cfg.progress, way_shot_label("adjust-eval", way, shot), cfg.n_tasks);
      const auto per = parallel_map(cfg.n_tasks, cfg.workers, [&](std::size_t t) {
        const TaskDraw d = source.draw(way, shot, cfg.query_per_class,
                                       derive_task_seed({cfg.base_seed, t}));
        const double base = runner.errors(d, keeps, Adjust::kNone)[0];
        const double adjusted = runner.errors(d, keeps, cfg.adjust)[0];
        progress.tick();
        return std::make_pair(base, adjusted);
      });
      std::vector<double> base(per.size()), adjusted(per.size()), delta(per.size());
      for (std::size_t i = 0; i < per.size(); ++i) {
        base[i] = 100.0 * (1.0 - per[i].first);
        adjusted[i] = 100.0 * (1.0 - per[i].second);
        delta[i] = adjusted[i] - base[i];
      }
      AdjustReport rep;
      rep.way = way;
      rep.shot = shot;
      rep.n_tasks = per.size();
      rep.baseline_accuracy = mean_of(base);
      rep.baseline_std_error = std_error_of(base);
      rep.adjusted_accuracy = mean_of(adjusted);
      rep.adjusted_std_error = std_error_of(adjusted);
      rep.delta = mean_of(delta);
      rep.delta_std_error = std_error_of(delta);
      reports.push_back(rep);
    }
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Result tables

namespace {

Cell count(std::size_t v) { return static_cast<std::int64_t>(v); }

}  // namespace

ResultsTable to_table(const Table1Report& report) {
  ResultsTable t;
  t.columns = {"dims", "shot", "classifier", "accuracy", "std_error", "n_tasks"};
  for (const auto& c : report.cells) {
    t.add_row({c.dims, count(c.shot), c.classifier, c.mean_accuracy, c.std_error,
               count(c.n_tasks)});
  }
  return t;
}

ResultsTable to_table(const std::vector<SweepCurve>& curves) {
  ResultsTable t;
  t.columns = {"way", "shot", "keep", "mean_error", "std_error", "n_tasks"};
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      t.add_row({count(c.way), count(c.shot), count(p.keep), p.mean_error, p.std_error,
                 count(p.n_tasks)});
    }
  }
  return t;
}

ResultsTable to_table(const std::vector<WayShotEntry>& grid) {
  ResultsTable t;
  t.columns = {"way", "shot", "full_error", "full_std_error", "best_error",
               "best_std_error", "best_keep", "gap"};
  for (const auto& e : grid) {
    t.add_row({count(e.way), count(e.shot), e.full_error, e.full_std_error, e.best_error,
               e.best_std_error, count(e.best_keep), e.gap()});
  }
  return t;
}

ResultsTable to_table(const std::vector<FiQualityReport>& reports) {
  ResultsTable t;
  t.columns = {"way", "shot", "estimator", "rank", "oracle_mean", "oracle_std",
               "estimate_mean", "estimate_std", "deviation_mean", "deviation_abs_mean"};
  auto emit = [&](const FiQualityReport& r, const char* name, const AggregateStat& a) {
    for (const auto& s : a.ranks) {
      t.add_row({count(r.way), count(r.shot), std::string(name), count(s.rank), s.oracle_mean,
                 s.oracle_std, s.estimate_mean, s.estimate_std, s.deviation_mean,
                 s.deviation_abs_mean});
    }
  };
  for (const auto& r : reports) {
    emit(r, "raw", r.raw);
    if (r.augmented) emit(r, "augmented", *r.augmented);
  }
  return t;
}

ResultsTable to_table(const TopkFrequency& freq) {
  ResultsTable t;
  t.columns = {"dim", "fi_count", "magnitude_count"};
  for (std::size_t j = 0; j < freq.fi_count.size(); ++j) {
    t.add_row({count(j), count(freq.fi_count[j]), count(freq.magnitude_count[j])});
  }
  t.metadata = {{"k", std::to_string(freq.k)},
                {"n_tasks", std::to_string(freq.n_tasks)},
                {"magnitude_statistic", "mean absolute feature value over the rows of the pair"}};
  return t;
}

ResultsTable to_table(const std::vector<AdjustReport>& reports) {
  ResultsTable t;
  t.columns = {"way", "shot", "n_tasks", "baseline_accuracy", "baseline_std_error",
               "adjusted_accuracy", "adjusted_std_error", "delta", "delta_std_error"};
  for (const auto& r : reports) {
    t.add_row({count(r.way), count(r.shot), count(r.n_tasks), r.baseline_accuracy,
               r.baseline_std_error, r.adjusted_accuracy, r.adjusted_std_error, r.delta,
               r.delta_std_error});
  }
  return t;
}

}  // namespace fsel
