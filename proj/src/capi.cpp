#include "fsel/fsel.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <map>
#include <memory>
#include <new>
#include <set>
#include <string>
#include <vector>

#include "fsel/error.hpp"
#include "fsel/gaussian.hpp"
#include "fsel/harness.hpp"
#include "fsel/storage.hpp"

struct fsel_config {
  std::map<std::string, std::string> values;
  std::string scratch;
};

struct fsel_result {
  fsel::ResultsTable table;
  std::vector<std::vector<std::string>> cells;  // formatted once for the C accessors
};

struct fsel_dataset {
  fsel::LabeledFeatureSet data;
};

namespace {

thread_local std::string g_last_error;

using fsel::ValidationError;

// ---------------------------------------------------------------------------
// Value parsing

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    throw ValidationError("invalid value '" + v + "' for " + key + ": expected an integer");
  }
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ValidationError("invalid value '" + v + "' for " + key + ": out of range");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (v.empty() || used != v.size() || !std::isfinite(d)) {
    throw ValidationError("invalid value '" + v + "' for " + key + ": expected a number");
  }
  return d;
}

std::vector<std::size_t> parse_list(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const auto end = comma == std::string::npos ? v.size() : comma;
    std::string item = v.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    while (!item.empty() && item.back() == ' ') item.pop_back();
    out.push_back(static_cast<std::size_t>(parse_u64(key, item)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ValidationError("invalid value '" + v + "' for " + key + ": expected true or false");
}

enum class Kind { kText, kPath, kU64, kSize, kList, kDouble, kBool, kChoice };

struct KeyInfo {
  Kind kind;
  std::vector<std::string> choices;
};

const std::map<std::string, KeyInfo>& keys() {
  static const std::map<std::string, KeyInfo> table = {
      {"preset", {Kind::kChoice, {"bench", "redundancy512", "hetero"}}},
      {"spec", {Kind::kPath, {}}},
      {"data", {Kind::kPath, {}}},
      {"seed", {Kind::kU64, {}}},
      {"tasks", {Kind::kSize, {}}},
      {"ways", {Kind::kList, {}}},
      {"shots", {Kind::kList, {}}},
      {"query", {Kind::kSize, {}}},
      {"keep", {Kind::kList, {}}},
      {"adjust", {Kind::kChoice, {"none", "oracle", "estimated", "estimated-augmented"}}},
      {"classifier", {Kind::kChoice, {"ncc", "logreg"}}},
      {"rank", {Kind::kChoice, {"oracle", "estimated"}}},
      {"eval", {Kind::kChoice, {"sampled", "exact"}}},
      {"eval_query", {Kind::kSize, {}}},
      {"large_shot", {Kind::kSize, {}}},
      {"views", {Kind::kSize, {}}},
      {"rho", {Kind::kDouble, {}}},
      {"view_bias", {Kind::kDouble, {}}},
      {"epsilon", {Kind::kDouble, {}}},
      {"draws", {Kind::kSize, {}}},
      {"k", {Kind::kSize, {}}},
      {"lambda", {Kind::kDouble, {}}},
      {"max_iters", {Kind::kSize, {}}},
      {"tolerance", {Kind::kDouble, {}}},
      {"workers", {Kind::kSize, {}}},
      {"progress", {Kind::kBool, {}}},
      {"frozen_meta", {Kind::kBool, {}}},
      {"classes", {Kind::kSize, {}}},
      {"samples", {Kind::kSize, {}}},
  };
  return table;
}

// Keys left out of result metadata: they change how a run executes, not what
// it computes.
const std::set<std::string> kExecutionKeys = {"workers", "progress", "frozen_meta"};

void check_value(const std::string& key, const std::string& value) {
  const auto it = keys().find(key);
  if (it == keys().end()) throw fsel::UsageError("unknown config key '" + key + "'");
  const KeyInfo& info = it->second;
  switch (info.kind) {
    case Kind::kText:
      break;
    case Kind::kPath:
      if (value.empty()) throw ValidationError(key + " must not be empty");
      break;
    case Kind::kU64:
    case Kind::kSize:
      parse_u64(key, value);
      break;
    case Kind::kList:
      if (!value.empty()) parse_list(key, value);
      break;
    case Kind::kDouble:
      parse_double(key, value);
      break;
    case Kind::kBool:
      parse_bool(key, value);
      break;
    case Kind::kChoice: {
      bool ok = false;
      for (const auto& c : info.choices) ok = ok || c == value;
      if (!ok) {
        std::string all;
        for (const auto& c : info.choices) all += (all.empty() ? "" : ", ") + c;
        throw ValidationError("invalid value '" + value + "' for " + key + ": expected one of " +
                              all);
      }
      break;
    }
  }
}

const std::set<std::string> kExperiments = {
    "table1",      "thm1-check", "thm1-verify", "thm2-gap",    "mask-sweep",
    "wayshot-grid", "fi-quality", "topk-freq",   "adjust-eval", "ffsb-info"};

std::string default_value(const std::string& experiment, const std::string& key) {
  if (key == "preset" || key == "spec" || key == "data") return "";
  if (key == "seed") return "0";
  if (key == "tasks") return "2000";
  if (key == "ways") return "2";
  if (key == "shots") {
    if (experiment == "thm2-gap") return "4,16,64,256";
    if (experiment == "thm1-check" || experiment == "thm1-verify") return "1";
    return "1";
  }
  if (key == "query") return std::to_string(fsel::kDefaultQueryPerClass);
  if (key == "keep") return "";
  if (key == "adjust") return experiment == "adjust-eval" ? "estimated" : "none";
  if (key == "classifier") return "ncc";
  if (key == "rank") return "oracle";
  if (key == "eval") return "sampled";
  if (key == "eval_query") return "10000";
  if (key == "large_shot") return "500";
  if (key == "views") return "0";
  if (key == "rho") return "0.5";
  if (key == "view_bias") return "0";
  if (key == "epsilon") return "1e-06";
  if (key == "draws") return experiment == "thm2-gap" ? "200" : "2000";
  if (key == "k") return "10";
  if (key == "lambda") return "";  // 1 / n_train
  if (key == "max_iters") return "2000";
  if (key == "tolerance") return "1e-08";
  if (key == "workers") return "1";
  if (key == "progress") return "false";
  if (key == "frozen_meta") return "false";
  if (key == "classes") return "2";
  if (key == "samples") return "100";
  return "";
}

class View {
 public:
  View(const fsel_config* cfg, std::string experiment)
      : cfg_(cfg), experiment_(std::move(experiment)) {}

  bool is_set(const std::string& key) const { return cfg_ && cfg_->values.count(key); }

  std::string get(const std::string& key) const {
    if (is_set(key)) return cfg_->values.at(key);
    return default_value(experiment_, key);
  }
  std::uint64_t u64(const std::string& key) const { return parse_u64(key, get(key)); }
  std::size_t size(const std::string& key) const {
    return static_cast<std::size_t>(parse_u64(key, get(key)));
  }
  double number(const std::string& key) const { return parse_double(key, get(key)); }
  bool flag(const std::string& key) const { return parse_bool(key, get(key)); }
  std::vector<std::size_t> list(const std::string& key) const {
    const std::string v = get(key);
    return v.empty() ? std::vector<std::size_t>{} : parse_list(key, v);
  }
  const std::string& experiment() const { return experiment_; }

 private:
  const fsel_config* cfg_;
  std::string experiment_;
};

// ---------------------------------------------------------------------------
// Config translation

fsel::GaussianTaskSpec gaussian_source(const View& v) {
  if (v.is_set("spec") && v.is_set("preset")) {
    throw ValidationError("spec and preset are mutually exclusive");
  }
  if (v.is_set("spec")) return fsel::read_gaussian_spec(v.get("spec"));
  const std::string name = v.is_set("preset") ? v.get("preset") : "bench";
  return *fsel::gaussian_preset(name);
}

fsel::ExperimentConfig experiment_config(const View& v) {
  fsel::ExperimentConfig cfg;
  if (v.is_set("data")) {
    if (v.is_set("spec") || v.is_set("preset")) {
      throw ValidationError("data is mutually exclusive with spec and preset");
    }
    cfg.features =
        std::make_shared<const fsel::LabeledFeatureSet>(fsel::read_feature_file(v.get("data")));
  } else {
    cfg.gaussian = gaussian_source(v);
  }
  cfg.ways = v.list("ways");
  cfg.shots = v.list("shots");
  cfg.query_per_class = v.size("query");
  cfg.n_tasks = v.size("tasks");
  cfg.keep_counts = v.list("keep");

  const std::string adjust = v.get("adjust");
  cfg.adjust = adjust == "oracle"                ? fsel::Adjust::kOracle
               : adjust == "estimated"           ? fsel::Adjust::kEstimated
               : adjust == "estimated-augmented" ? fsel::Adjust::kEstimatedAugmented
                                                 : fsel::Adjust::kNone;
  cfg.classifier =
      v.get("classifier") == "logreg" ? fsel::ProbeKind::kLogistic : fsel::ProbeKind::kNcc;
  cfg.rank = v.get("rank") == "estimated" ? fsel::RankSource::kEstimated
                                          : fsel::RankSource::kOracle;
  cfg.evaluation =
      v.get("eval") == "exact" ? fsel::Evaluation::kExact : fsel::Evaluation::kSampled;

  cfg.views = v.size("views");
  cfg.rho = v.number("rho");
  cfg.view_bias = v.number("view_bias");
  cfg.epsilon = v.number("epsilon");
  if (v.is_set("lambda")) cfg.fit.l2_lambda = v.number("lambda");
  cfg.fit.max_iters = v.size("max_iters");
  cfg.fit.tolerance = v.number("tolerance");
  cfg.large_shot = v.size("large_shot");
  cfg.eval_query = v.size("eval_query");
  cfg.base_seed = v.u64("seed");
  cfg.workers = std::max<std::size_t>(1, v.size("workers"));
  cfg.progress = v.flag("progress");
  return cfg;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void add_metadata(fsel::ResultsTable& table, const View& v) {
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("experiment", v.experiment());
  meta.emplace_back("library_version", fsel_version());
  for (const auto& [key, info] : keys()) {
    if (kExecutionKeys.count(key)) continue;
    meta.emplace_back("config." + key, v.get(key));
  }
  for (auto& kv : table.metadata) meta.push_back(std::move(kv));
  if (!v.flag("frozen_meta")) meta.emplace_back("created", utc_timestamp());
  table.metadata = std::move(meta);
}

fsel::Cell count(std::size_t n) { return static_cast<std::int64_t>(n); }

fsel::Cell as_bool(bool b) { return static_cast<std::int64_t>(b ? 1 : 0); }

// ---------------------------------------------------------------------------
// Experiments

fsel::ResultsTable run_theorem1_check(const View& v) {
  const auto spec = gaussian_source(v);
  fsel::ResultsTable t;
  t.columns = {"shot", "condition_1", "condition_2", "margin_1", "margin_2",
               "guarantee_probability"};
  for (auto shot : v.list("shots")) {
    const auto r = fsel::theorem1_conditions(spec, shot);
    t.add_row({count(shot), as_bool(r.conditions_hold[0]), as_bool(r.conditions_hold[1]),
               r.margins[0], r.margins[1], r.guarantee_probability});
  }
  return t;
}

fsel::ResultsTable run_theorem1_verify(const View& v) {
  const auto spec = gaussian_source(v);
  const auto workers = std::max<std::size_t>(1, v.size("workers"));
  fsel::ResultsTable t;
  t.columns = {"shot",
               "draws",
               "conditions_hold",
               "guarantee_probability",
               "empirical_frequency",
               "mean_accuracy_one_dim",
               "mean_accuracy_two_dim",
               "centroid_order_prob"};
  for (auto shot : v.list("shots")) {
    const auto r = fsel::theorem1_verify(spec, shot, v.size("draws"), v.u64("seed"), workers);
    t.add_row({count(shot), count(r.draws), as_bool(r.all_conditions_hold()),
               r.guarantee_probability, r.empirical_frequency, r.mean_accuracy_one_dim,
               r.mean_accuracy_two_dim, fsel::centroid_order_prob(spec, shot)});
  }
  return t;
}

fsel::ResultsTable run_theorem2(const View& v) {
  const auto spec = gaussian_source(v);
  const auto workers = std::max<std::size_t>(1, v.size("workers"));
  fsel::ResultsTable t;
  t.columns = {"shot",          "draws",       "median_gap",
               "mean_gap",      "bayes_gap_component", "mean_accuracy_one_dim",
               "mean_accuracy_two_dim"};
  for (auto shot : v.list("shots")) {
    const auto r = fsel::theorem2_gap(spec, shot, v.size("draws"), v.u64("seed"), workers);
    t.add_row({count(shot), count(r.draws), r.median_gap, r.mean_gap, r.bayes_gap_component,
               r.mean_accuracy_one_dim, r.mean_accuracy_two_dim});
  }
  return t;
}

fsel::ResultsTable run_ffsb_info(const View& v) {
  if (!v.is_set("data")) throw ValidationError("ffsb-info needs a data path");
  const auto data = fsel::read_feature_file(v.get("data"));
  const auto counts = data.class_counts();
  fsel::ResultsTable t;
  t.columns = {"n_samples", "dim", "n_classes", "has_groups", "n_groups",
               "min_class_count", "max_class_count"};
  t.add_row({count(data.size()), count(data.dim()), count(data.n_classes()),
             as_bool(data.has_groups()), count(data.base_row_indices().size()),
             count(*std::min_element(counts.begin(), counts.end())),
             count(*std::max_element(counts.begin(), counts.end()))});
  return t;
}

fsel::ResultsTable dispatch(const View& v) {
  const std::string& e = v.experiment();
  if (e == "thm1-check") return run_theorem1_check(v);
  if (e == "thm1-verify") return run_theorem1_verify(v);
  if (e == "thm2-gap") return run_theorem2(v);
  if (e == "ffsb-info") return run_ffsb_info(v);
  if (e == "topk-freq") {
    if (!v.is_set("data")) throw ValidationError("topk-freq needs a data path");
    return fsel::to_table(fsel::run_topk_frequency(fsel::read_feature_file(v.get("data")),
                                                   v.size("k")));
  }
  const auto cfg = experiment_config(v);
  if (e == "table1") return fsel::to_table(fsel::run_table1(cfg));
  if (e == "mask-sweep") return fsel::to_table(fsel::run_mask_sweep(cfg));
  if (e == "wayshot-grid") return fsel::to_table(fsel::run_wayshot_grid(cfg));
  if (e == "fi-quality") return fsel::to_table(fsel::run_fi_quality(cfg));
  if (e == "adjust-eval") return fsel::to_table(fsel::run_adjust_eval(cfg));
  throw fsel::UsageError("unknown experiment '" + e + "'");
}

fsel_status to_status(fsel::ErrorKind kind) {
  switch (kind) {
    case fsel::ErrorKind::kUsage: return FSEL_ERR_USAGE;
    case fsel::ErrorKind::kValidation: return FSEL_ERR_VALIDATION;
    case fsel::ErrorKind::kIo: return FSEL_ERR_IO;
    case fsel::ErrorKind::kNumerical: return FSEL_ERR_NUMERICAL;
  }
  return FSEL_ERR_INTERNAL;
}

fsel_status guarded(const std::function<void()>& body) {
  try {
    body();
    g_last_error.clear();
    return FSEL_OK;
  } catch (const fsel::Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FSEL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FSEL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return FSEL_ERR_INTERNAL;
  }
}

fsel_status null_argument(const char* what) {
  g_last_error = std::string(what) + " must not be NULL";
  return FSEL_ERR_USAGE;
}

}  // namespace

extern "C" {

const char* fsel_version(void) { return "0.1.0"; }

const char* fsel_last_error(void) { return g_last_error.c_str(); }

const char* fsel_status_name(fsel_status status) {
  switch (status) {
    case FSEL_OK: return "ok";
    case FSEL_ERR_USAGE: return "usage";
    case FSEL_ERR_VALIDATION: return "validation";
    case FSEL_ERR_IO: return "io";
    case FSEL_ERR_NUMERICAL: return "numerical";
    case FSEL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

fsel_status fsel_config_new(fsel_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = new fsel_config(); });
}

void fsel_config_free(fsel_config* cfg) { delete cfg; }

fsel_status fsel_config_set(fsel_config* cfg, const char* key, const char* value) {
  if (!cfg) return null_argument("cfg");
  if (!key || !value) return null_argument("key/value");
  return guarded([&] {
    check_value(key, value);
    cfg->values[key] = value;
  });
}

fsel_status fsel_config_get(fsel_config* cfg, const char* experiment, const char* key,
                            const char** value) {
  if (!cfg) return null_argument("cfg");
  if (!key || !value) return null_argument("key/value");
  return guarded([&] {
    if (!keys().count(key)) throw fsel::UsageError(std::string("unknown config key '") + key + "'");
    cfg->scratch = View(cfg, experiment ? experiment : "").get(key);
    *value = cfg->scratch.c_str();
  });
}

fsel_status fsel_run(const char* experiment, const fsel_config* cfg, fsel_result** out) {
  if (!experiment) return null_argument("experiment");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    if (!kExperiments.count(experiment)) {
      throw fsel::UsageError(std::string("unknown experiment '") + experiment + "'");
    }
    const View view(cfg, experiment);
    auto result = std::make_unique<fsel_result>();
    result->table = dispatch(view);
    add_metadata(result->table, view);
    for (const auto& row : result->table.rows) {
      std::vector<std::string> formatted;
      for (const auto& cell : row) formatted.push_back(fsel::format_cell(cell));
      result->cells.push_back(std::move(formatted));
    }
    *out = result.release();
  });
}

void fsel_result_free(fsel_result* result) { delete result; }

size_t fsel_result_rows(const fsel_result* result) {
  return result ? result->table.rows.size() : 0;
}

size_t fsel_result_cols(const fsel_result* result) {
  return result ? result->table.columns.size() : 0;
}

const char* fsel_result_column(const fsel_result* result, size_t col) {
  if (!result || col >= result->table.columns.size()) return nullptr;
  return result->table.columns[col].c_str();
}

const char* fsel_result_cell(const fsel_result* result, size_t row, size_t col) {
  if (!result || row >= result->cells.size() || col >= result->cells[row].size()) {
    return nullptr;
  }
  return result->cells[row][col].c_str();
}

fsel_status fsel_result_number(const fsel_result* result, size_t row, size_t col,
                               double* value) {
  if (!result) return null_argument("result");
  if (!value) return null_argument("value");
  return guarded([&] {
    if (row >= result->table.rows.size() || col >= result->table.columns.size()) {
      throw fsel::UsageError("cell (" + std::to_string(row) + ", " + std::to_string(col) +
                             ") out of range");
    }
    *value = result->table.number(row, result->table.columns[col]);
  });
}

size_t fsel_result_meta_count(const fsel_result* result) {
  return result ? result->table.metadata.size() : 0;
}

const char* fsel_result_meta_key(const fsel_result* result, size_t i) {
  if (!result || i >= result->table.metadata.size()) return nullptr;
  return result->table.metadata[i].first.c_str();
}

const char* fsel_result_meta_value(const fsel_result* result, size_t i) {
  if (!result || i >= result->table.metadata.size()) return nullptr;
  return result->table.metadata[i].second.c_str();
}

fsel_status fsel_result_write(const fsel_result* result, const char* path, const char* format) {
  if (!result) return null_argument("result");
  if (!path || !format) return null_argument("path/format");
  return guarded([&] {
    const std::string f = format;
    if (f != "csv" && f != "json") {
      throw ValidationError("unknown results format '" + f + "' (csv or json)");
    }
    fsel::write_results(result->table, path,
                        f == "csv" ? fsel::ResultsFormat::kCsv : fsel::ResultsFormat::kJson);
  });
}

fsel_status fsel_result_write_metadata(const fsel_result* result, const char* path) {
  if (!result) return null_argument("result");
  if (!path) return null_argument("path");
  return guarded([&] { fsel::write_metadata(result->table, path); });
}

fsel_status fsel_dataset_open(const char* path, fsel_dataset** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new fsel_dataset{fsel::read_feature_file(path)}; });
}

void fsel_dataset_free(fsel_dataset* dataset) { delete dataset; }

fsel_status fsel_dataset_info_get(const fsel_dataset* dataset, fsel_dataset_info* info) {
  if (!dataset) return null_argument("dataset");
  if (!info) return null_argument("info");
  return guarded([&] {
    const auto& d = dataset->data;
    info->n_samples = static_cast<uint32_t>(d.size());
    info->dim = static_cast<uint32_t>(d.dim());
    info->n_classes = d.n_classes();
    info->has_groups = d.has_groups() ? 1 : 0;
    info->n_groups = static_cast<uint32_t>(d.base_row_indices().size());
  });
}

fsel_status fsel_synthesize_ffsb(const fsel_config* cfg, const char* path) {
  if (!path) return null_argument("path");
  return guarded([&] {
    const View v(cfg, "synth-ffsb");
    if (v.is_set("data")) throw ValidationError("synthesis takes a spec or preset, not data");
    const auto spec = gaussian_source(v);
    fsel::ViewOptions views{v.size("views"), v.number("rho"), v.number("view_bias")};
    const auto data =
        fsel::sample_feature_set(spec, v.size("classes"), v.size("samples"), views, v.u64("seed"));
    fsel::write_feature_file(data, path);
  });
}

}  // extern "C"
