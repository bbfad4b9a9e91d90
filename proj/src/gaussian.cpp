#include "fsel/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fsel/error.hpp"
#include "fsel/parallel.hpp"
#include "fsel/rng.hpp"

namespace fsel {

void GaussianTaskSpec::validate() const {
  if (stddev.empty()) throw ValidationError("gaussian spec: dim must be >= 1");
  if (mean_a.size() != stddev.size() || mean_b.size() != stddev.size()) {
    throw ValidationError("gaussian spec: mean_a, mean_b and std lengths differ (" +
                          std::to_string(mean_a.size()) + ", " +
                          std::to_string(mean_b.size()) + ", " +
                          std::to_string(stddev.size()) + ")");
  }
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!std::isfinite(mean_a[i]) || !std::isfinite(mean_b[i])) {
      throw ValidationError("gaussian spec: non-finite mean in dimension " +
                            std::to_string(i));
    }
    if (!(stddev[i] > 0.0) || !std::isfinite(stddev[i])) {
      throw ValidationError("gaussian spec: std must be positive in dimension " +
                            std::to_string(i));
    }
  }
}

ImportanceVector GaussianTaskSpec::oracle_importance() const {
  ImportanceVector out;
  out.provenance = Provenance::kOracle;
  out.omega.resize(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    out.omega[i] = std::abs(mean_a[i] - mean_b[i]) / (2.0 * stddev[i]);
  }
  return out;
}

std::vector<double> GaussianTaskSpec::overall_mean() const {
  std::vector<double> m(dim());
  for (std::size_t i = 0; i < dim(); ++i) m[i] = 0.5 * (mean_a[i] + mean_b[i]);
  return m;
}

GaussianTaskSpec GaussianTaskSpec::bench_example() {
  return {{-1.0, -10.0}, {1.0, 10.0}, {0.6, 10.0}};
}

namespace {

void draw_rows(Rng& rng, const std::vector<double>& mean, const std::vector<double>& stddev,
               std::size_t count, std::uint32_t label, std::vector<double>& x,
               std::vector<std::uint32_t>& y) {
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t i = 0; i < mean.size(); ++i) x.push_back(rng.normal(mean[i], stddev[i]));
    y.push_back(label);
  }
}

struct Draw {
  std::vector<double> centroid_a;
  std::vector<double> centroid_b;
};

Draw draw_centroids(const GaussianTaskSpec& spec, std::size_t shot, std::uint64_t seed) {
  Rng rng(seed);
  Draw d{std::vector<double>(spec.dim(), 0.0), std::vector<double>(spec.dim(), 0.0)};
  for (auto* target : {&d.centroid_a, &d.centroid_b}) {
    const auto& mean = target == &d.centroid_a ? spec.mean_a : spec.mean_b;
    for (std::size_t r = 0; r < shot; ++r) {
      for (std::size_t i = 0; i < spec.dim(); ++i) {
        (*target)[i] += rng.normal(mean[i], spec.stddev[i]);
      }
    }
    for (double& v : *target) v /= static_cast<double>(shot);
  }
  return d;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double average(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void require_two_dims(const GaussianTaskSpec& spec, const char* name) {
  spec.validate();
  if (spec.dim() < 2) {
    throw ValidationError(std::string(name) + " needs a spec with at least 2 dimensions");
  }
}

}  // namespace

Episode sample_task(const GaussianTaskSpec& spec, std::size_t shot,
                    std::size_t query_per_class, std::uint64_t seed) {
  spec.validate();
  if (shot < 1) throw ValidationError("shot must be >= 1");
  if (query_per_class < 1) throw ValidationError("query_per_class must be >= 1");
  const std::size_t dim = spec.dim();
  Rng rng(seed);
  std::vector<double> tx, qx;
  std::vector<std::uint32_t> ty, qy;
  tx.reserve(2 * shot * dim);
  qx.reserve(2 * query_per_class * dim);
  // Train rows come first so the train split does not depend on the query size.
  draw_rows(rng, spec.mean_a, spec.stddev, shot, 0, tx, ty);
  draw_rows(rng, spec.mean_b, spec.stddev, shot, 1, tx, ty);
  draw_rows(rng, spec.mean_a, spec.stddev, query_per_class, 0, qx, qy);
  draw_rows(rng, spec.mean_b, spec.stddev, query_per_class, 1, qx, qy);

  Episode ep;
  ep.way = 2;
  ep.shot = shot;
  ep.train = LabeledFeatureSet(Matrix(2 * shot, dim, std::move(tx)), std::move(ty), 2);
  ep.query = LabeledFeatureSet(Matrix(2 * query_per_class, dim, std::move(qx)),
                               std::move(qy), 2);
  ep.task_id = seed;
  ep.classes = {0, 1};
  return ep;
}

Episode simulate_views(const Episode& episode, const GaussianTaskSpec& spec,
                       const ViewOptions& options, std::uint64_t seed) {
  spec.validate();
  if (options.views_per_sample < 1) throw ValidationError("views_per_sample must be >= 1");
  if (!(options.noise_ratio >= 0.0)) throw ValidationError("view noise ratio must be >= 0");
  if (episode.train.has_groups()) throw ValidationError("episode already has views");
  if (episode.train.dim() != spec.dim()) {
    throw ValidationError("simulate_views: episode dim does not match spec");
  }
  const std::size_t dim = spec.dim();
  const std::size_t n = episode.train.size();
  const std::size_t per = options.views_per_sample + 1;
  Rng rng(seed);
  std::vector<double> x;
  std::vector<std::uint32_t> y, g;
  x.reserve(n * per * dim);
  for (std::size_t r = 0; r < n; ++r) {
    const auto base = episode.train.features().row(r);
    const auto label = episode.train.labels()[r];
    x.insert(x.end(), base.begin(), base.end());
    y.push_back(label);
    g.push_back(static_cast<std::uint32_t>(r));
    for (std::size_t v = 0; v < options.views_per_sample; ++v) {
      for (std::size_t i = 0; i < dim; ++i) {
        const double center = base[i] + options.mean_bias * spec.stddev[i];
        x.push_back(rng.normal(center, options.noise_ratio * spec.stddev[i]));
      }
      y.push_back(label);
      g.push_back(static_cast<std::uint32_t>(r));
    }
  }
  Episode out = episode;
  out.train = LabeledFeatureSet(Matrix(n * per, dim, std::move(x)), std::move(y),
                                episode.train.n_classes(), std::move(g));
  return out;
}

LabeledFeatureSet sample_feature_set(const GaussianTaskSpec& spec, std::size_t n_classes,
                                     std::size_t per_class, const ViewOptions& views,
                                     std::uint64_t seed) {
  spec.validate();
  if (n_classes < 2) throw ValidationError("sample_feature_set needs >= 2 classes");
  if (per_class < 1) throw ValidationError("sample_feature_set needs >= 1 sample per class");
  if (!(views.noise_ratio >= 0.0)) throw ValidationError("view noise ratio must be >= 0");
  const std::size_t dim = spec.dim();
  Rng rng(seed);
  std::vector<double> x;
  std::vector<std::uint32_t> y, g;
  std::vector<double> mean(dim);
  std::uint32_t group = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double f = static_cast<double>(c) / static_cast<double>(n_classes - 1);
    for (std::size_t i = 0; i < dim; ++i) {
      mean[i] = spec.mean_a[i] + f * (spec.mean_b[i] - spec.mean_a[i]);
    }
    for (std::size_t r = 0; r < per_class; ++r, ++group) {
      const std::size_t start = x.size();
      for (std::size_t i = 0; i < dim; ++i) x.push_back(rng.normal(mean[i], spec.stddev[i]));
      y.push_back(static_cast<std::uint32_t>(c));
      g.push_back(group);
      for (std::size_t v = 0; v < views.views_per_sample; ++v) {
        for (std::size_t i = 0; i < dim; ++i) {
          const double center = x[start + i] + views.mean_bias * spec.stddev[i];
          x.push_back(rng.normal(center, views.noise_ratio * spec.stddev[i]));
        }
        y.push_back(static_cast<std::uint32_t>(c));
        g.push_back(group);
      }
    }
  }
  const std::size_t rows = y.size();
  std::optional<std::vector<std::uint32_t>> groups;
  if (views.views_per_sample > 0) groups = std::move(g);
  return {Matrix(rows, dim, std::move(x)), std::move(y),
          static_cast<std::uint32_t>(n_classes), std::move(groups)};
}

double linear_rule_error(std::span<const double> mean, std::span<const double> stddev,
                         std::span<const double> w, double c, std::size_t test_class) {
  if (mean.size() < w.size() || stddev.size() < w.size()) {
    throw ValidationError("linear_rule_error: rule has more dims than the spec");
  }
  double m = c;
  double var = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    m += w[i] * mean[i];
    var += w[i] * w[i] * stddev[i] * stddev[i];
  }
  const bool class_b = test_class == 1;
  if (var == 0.0) {
    const bool predicts_b = m > 0.0;
    return predicts_b == class_b ? 0.0 : 1.0;
  }
  const double t = m / std::sqrt(var);
  return class_b ? normal_cdf(-t) : normal_cdf(t);
}

double linear_rule_error(const GaussianTaskSpec& spec, std::span<const double> w,
                         double c) {
  return 0.5 * (linear_rule_error(spec.mean_a, spec.stddev, w, c, 0) +
                linear_rule_error(spec.mean_b, spec.stddev, w, c, 1));
}

double population_error(const GaussianTaskSpec& spec, const LinearClassifier& clf) {
  if (clf.n_classes() != 2) throw ValidationError("population_error needs a binary rule");
  if (clf.dim() > spec.dim()) {
    throw ValidationError("population_error: classifier dim exceeds spec dim");
  }
  std::vector<double> w(clf.dim());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = clf.weights(1, i) - clf.weights(0, i);
  return linear_rule_error(spec, w, clf.bias[1] - clf.bias[0]);
}

double ncc_test_error_closed_form(const GaussianTaskSpec& spec,
                                  std::span<const double> centroid_a,
                                  std::span<const double> centroid_b,
                                  std::size_t used_dims, std::size_t test_class) {
  if (used_dims == 0 || used_dims > spec.dim() || centroid_a.size() < used_dims ||
      centroid_b.size() < used_dims) {
    throw ValidationError("ncc closed form: used_dims " + std::to_string(used_dims) +
                          " not covered by spec and centroids");
  }
  // Class b wins iff ||z - p_b||^2 < ||z - p_a||^2, i.e.
  // 2 (p_b - p_a) . z + ||p_a||^2 - ||p_b||^2 > 0.
  std::vector<double> w(used_dims);
  double c = 0.0;
  bool equal = true;
  for (std::size_t i = 0; i < used_dims; ++i) {
    w[i] = 2.0 * (centroid_b[i] - centroid_a[i]);
    c += centroid_a[i] * centroid_a[i] - centroid_b[i] * centroid_b[i];
    equal = equal && centroid_a[i] == centroid_b[i];
  }
  if (equal) return 0.5;
  return linear_rule_error(spec.class_mean(test_class), spec.stddev, w, c, test_class);
}

double ncc_test_error_closed_form(const GaussianTaskSpec& spec,
                                  std::span<const double> centroid_a,
                                  std::span<const double> centroid_b,
                                  std::size_t used_dims) {
  return 0.5 * (ncc_test_error_closed_form(spec, centroid_a, centroid_b, used_dims, 0) +
                ncc_test_error_closed_form(spec, centroid_a, centroid_b, used_dims, 1));
}

BayesOptimum bayes_optimal_error(const GaussianTaskSpec& spec, std::size_t used_dims) {
  spec.validate();
  if (used_dims == 0 || used_dims > spec.dim()) {
    throw ValidationError("bayes_optimal_error: used_dims out of range");
  }
  double snr2 = 0.0;
  for (std::size_t i = 0; i < used_dims; ++i) {
    const double h = 0.5 * (spec.mean_b[i] - spec.mean_a[i]) / spec.stddev[i];
    snr2 += h * h;
  }
  BayesOptimum out;
  out.error = 1.0 - normal_cdf(std::sqrt(snr2));
  if (used_dims == 2) {
    const double h1 = 0.5 * (spec.mean_b[0] - spec.mean_a[0]);
    const double h2 = 0.5 * (spec.mean_b[1] - spec.mean_a[1]);
    const double s1 = spec.stddev[0] * spec.stddev[0];
    const double s2 = spec.stddev[1] * spec.stddev[1];
    out.direction_ratio =
        h1 == 0.0 ? std::numeric_limits<double>::infinity() : h2 * s1 / (h1 * s2);
  }
  return out;
}

double centroid_order_prob(const GaussianTaskSpec& spec, std::size_t shot) {
  spec.validate();
  if (shot < 1) throw ValidationError("shot must be >= 1");
  const double root = std::sqrt(2.0 * static_cast<double>(shot));
  double p = 1.0;
  for (std::size_t i = 0; i < spec.dim(); ++i) {
    const double h = 0.5 * std::abs(spec.mean_b[i] - spec.mean_a[i]);
    p *= normal_cdf(root * h / spec.stddev[i]);
  }
  return p;
}

bool TheoremReport::all_conditions_hold() const {
  return !conditions_hold.empty() &&
         std::all_of(conditions_hold.begin(), conditions_hold.end(), [](bool b) { return b; });
}

TheoremReport theorem1_conditions(const GaussianTaskSpec& spec, std::size_t shot) {
  require_two_dims(spec, "theorem1_conditions");
  if (shot < 1) throw ValidationError("shot must be >= 1");
  const double n = static_cast<double>(shot);
  const double r1 = std::abs(spec.mean_a[0] - spec.mean_b[0]) / spec.stddev[0];
  const double r2 = std::abs(spec.mean_a[1] - spec.mean_b[1]) / spec.stddev[1];

  TheoremReport rep;
  rep.shot = shot;
  rep.margins = {r2 - 2.4 / std::sqrt(n), r1 - (2.0 * r2 + 5.4 / std::sqrt(n))};
  rep.conditions_hold = {rep.margins[0] > 0.0, rep.margins[1] > 0.0};
  rep.guarantee_probability = normal_cdf(std::sqrt(2.0 * n) * r1) *
                              normal_cdf(std::sqrt(2.0 * n) * r2) *
                              normal_cdf(std::sqrt(10.0 * n) / 5.0 * (r1 - 2.0 * r2));
  return rep;
}

TheoremReport theorem1_verify(const GaussianTaskSpec& spec, std::size_t shot,
                              std::size_t n_draws, std::uint64_t seed,
                              std::size_t workers) {
  TheoremReport rep = theorem1_conditions(spec, shot);
  if (n_draws < 1) throw ValidationError("n_draws must be >= 1");

  struct PerDraw {
    double a1 = 0.0, a2 = 0.0, avg1 = 0.0, avg2 = 0.0;
  };
  const auto per = parallel_map(n_draws, workers, [&](std::size_t t) {
    const Draw d = draw_centroids(spec, shot, derive_task_seed({seed, t}));
    PerDraw out;
    out.a1 = ncc_test_error_closed_form(spec, d.centroid_a, d.centroid_b, 1, 0);
    out.a2 = ncc_test_error_closed_form(spec, d.centroid_a, d.centroid_b, 2, 0);
    out.avg1 = ncc_test_error_closed_form(spec, d.centroid_a, d.centroid_b, 1);
    out.avg2 = ncc_test_error_closed_form(spec, d.centroid_a, d.centroid_b, 2);
    return out;
  });

  rep.draws = n_draws;
  std::size_t hurt = 0;
  double acc1 = 0.0, acc2 = 0.0;
  for (const auto& p : per) {
    rep.error_one_dim.push_back(p.a1);
    rep.error_two_dim.push_back(p.a2);
    if (p.a2 > p.a1) ++hurt;
    acc1 += 1.0 - p.avg1;
    acc2 += 1.0 - p.avg2;
  }
  const double draws = static_cast<double>(n_draws);
  rep.empirical_frequency = static_cast<double>(hurt) / draws;
  rep.mean_accuracy_one_dim = acc1 / draws;
  rep.mean_accuracy_two_dim = acc2 / draws;
  return rep;
}

TheoremReport theorem2_gap(const GaussianTaskSpec& spec, std::size_t shot,
                           std::size_t n_draws, std::uint64_t seed,
                           std::size_t workers) {
  require_two_dims(spec, "theorem2_gap");
  if (shot < 2) throw ValidationError("theorem2_gap needs shot >= 2");
  if (n_draws < 1) throw ValidationError("n_draws must be >= 1");
  const GaussianTaskSpec plane{{spec.mean_a[0], spec.mean_a[1]},
                               {spec.mean_b[0], spec.mean_b[1]},
                               {spec.stddev[0], spec.stddev[1]}};

  struct PerDraw {
    double e1 = 0.0, e2 = 0.0;
  };
  const auto per = parallel_map(n_draws, workers, [&](std::size_t t) {
    const Episode ep = sample_task(plane, shot, 1, derive_task_seed({seed, t}));
    const auto h1 = fit_erm01_1d(ep.train.leading_dims(1));
    const auto h2 = fit_erm01_2d(ep.train);
    return PerDraw{population_error(plane, h1.classifier),
                   population_error(plane, h2.classifier)};
  });

  TheoremReport rep;
  rep.shot = shot;
  rep.draws = n_draws;
  double acc1 = 0.0, acc2 = 0.0;
  for (const auto& p : per) {
    rep.error_one_dim.push_back(p.e1);
    rep.error_two_dim.push_back(p.e2);
    rep.gaps.push_back(p.e2 - p.e1);
    acc1 += 1.0 - p.e1;
    acc2 += 1.0 - p.e2;
  }
  rep.mean_accuracy_one_dim = acc1 / static_cast<double>(n_draws);
  rep.mean_accuracy_two_dim = acc2 / static_cast<double>(n_draws);
  rep.median_gap = median_of(rep.gaps);
  rep.mean_gap = average(rep.gaps);
  rep.bayes_gap_component = bayes_gap_component(plane);
  return rep;
}

double bayes_gap_component(const GaussianTaskSpec& spec) {
  require_two_dims(spec, "bayes_gap_component");
  const double a = std::abs(spec.mean_a[0] - spec.mean_b[0]) / (2.0 * spec.stddev[0]);
  const double b = std::abs(spec.mean_a[1] - spec.mean_b[1]) / (2.0 * spec.stddev[1]);
  return normal_cdf(a) - normal_cdf(std::sqrt(a * a + b * b));
}

}  // namespace fsel
