#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fsel/classify.hpp"
#include "fsel/core.hpp"
#include "fsel/stats.hpp"

namespace fsel {

// Binary diagonal-Gaussian task: class a (label 0) and class b (label 1) with
// per-dimension means and a shared per-dimension standard deviation.
struct GaussianTaskSpec {
  std::vector<double> mean_a;
  std::vector<double> mean_b;
  std::vector<double> stddev;

  std::size_t dim() const noexcept { return stddev.size(); }

  // Throws ValidationError unless sizes agree, dim >= 1, means are finite and
  // every stddev is positive and finite.
  void validate() const;

  // |mean_a - mean_b| / (2 stddev)
  ImportanceVector oracle_importance() const;
  std::vector<double> overall_mean() const;

  const std::vector<double>& class_mean(std::size_t label) const {
    return label == 0 ? mean_a : mean_b;
  }

  // mean_b = -mean_a = (1, 10), stddev = (0.6, 10).
  static GaussianTaskSpec bench_example();
};

Episode sample_task(const GaussianTaskSpec& spec, std::size_t shot,
                    std::size_t query_per_class, std::uint64_t seed);

inline constexpr double kDefaultViewNoiseRatio = 0.5;

struct ViewOptions {
  std::size_t views_per_sample = 5;
  double noise_ratio = kDefaultViewNoiseRatio;
  // Every view is shifted by bias * stddev in each dimension.
  double mean_bias = 0.0;
};

// Adds `views_per_sample` jittered copies of each train row, drawn from
// N(row + bias * stddev, diag((noise_ratio * stddev)^2)). Groups mark which
// base row each view came from; the query split is untouched.
Episode simulate_views(const Episode& episode, const GaussianTaskSpec& spec,
                       const ViewOptions& options, std::uint64_t seed);

// Labeled data with `n_classes` classes whose means are spaced evenly from
// mean_a to mean_b, `per_class` base rows each. With views_per_sample > 0 every
// row is followed by its views and the set carries groups.
LabeledFeatureSet sample_feature_set(const GaussianTaskSpec& spec, std::size_t n_classes,
                                     std::size_t per_class, const ViewOptions& views,
                                     std::uint64_t seed);

// Probability that a binary linear rule misclassifies a fresh point of
// `test_class`. The rule predicts class b when w.z + c > 0. Dimensions with
// stddev 0 are allowed as long as w has weight on some dimension with positive
// spread; otherwise the rule is constant and the error is 0 or 1.
double linear_rule_error(std::span<const double> mean, std::span<const double> stddev,
                         std::span<const double> w, double c, std::size_t test_class);

// Equal-prior average of linear_rule_error over both classes of `spec`. Only
// the leading w.size() dimensions of the spec are used.
double linear_rule_error(const GaussianTaskSpec& spec, std::span<const double> w,
                         double c);

// Population error of a fitted binary LinearClassifier on the spec.
double population_error(const GaussianTaskSpec& spec, const LinearClassifier& clf);

// Exact NCC misclassification probability for a fresh point of `test_class`
// given centroids, using the leading `used_dims` dimensions. Equal centroids in
// the used dimensions give 0.5.
double ncc_test_error_closed_form(const GaussianTaskSpec& spec,
                                  std::span<const double> centroid_a,
                                  std::span<const double> centroid_b,
                                  std::size_t used_dims, std::size_t test_class);

// Equal-prior average over both test classes.
double ncc_test_error_closed_form(const GaussianTaskSpec& spec,
                                  std::span<const double> centroid_a,
                                  std::span<const double> centroid_b,
                                  std::size_t used_dims);

struct BayesOptimum {
  double error = 0.0;
  // Optimal weight ratio w_2 / w_1 (two dimensions only; 0 for one dimension,
  // +inf when the first dimension carries no signal).
  double direction_ratio = 0.0;
};

// Best linear error using the leading `used_dims` dimensions:
// 1 - Phi(sqrt(sum_i (half_gap_i / stddev_i)^2)).
BayesOptimum bayes_optimal_error(const GaussianTaskSpec& spec, std::size_t used_dims);

// Probability that both centroid coordinates of an n-shot draw are ordered like
// the class means (two-dimensional specs).
double centroid_order_prob(const GaussianTaskSpec& spec, std::size_t shot);

struct TheoremReport {
  std::size_t shot = 0;
  std::vector<bool> conditions_hold;
  std::vector<double> margins;
  double guarantee_probability = 0.0;

  // Monte Carlo part (empty until a verify run fills it).
  std::size_t draws = 0;
  double empirical_frequency = 0.0;
  std::vector<double> error_one_dim;
  std::vector<double> error_two_dim;
  double mean_accuracy_one_dim = 0.0;
  double mean_accuracy_two_dim = 0.0;

  // Generalization-gap part.
  std::vector<double> gaps;
  double median_gap = 0.0;
  double mean_gap = 0.0;
  double bayes_gap_component = 0.0;

  bool all_conditions_hold() const;
};

// Sufficient conditions for redundancy of the second dimension under NCC and
// the product lower bound on the probability that it hurts.
TheoremReport theorem1_conditions(const GaussianTaskSpec& spec, std::size_t shot);

// Exact per-draw NCC errors (class a test points) with the first dimension and
// with both; frequency of draws where the second dimension hurts.
TheoremReport theorem1_verify(const GaussianTaskSpec& spec, std::size_t shot,
                              std::size_t n_draws, std::uint64_t seed,
                              std::size_t workers = 1);

// Population error gap between the exact 0-1 minimizers on both dimensions and
// on the first dimension, per draw.
TheoremReport theorem2_gap(const GaussianTaskSpec& spec, std::size_t shot,
                           std::size_t n_draws, std::uint64_t seed,
                           std::size_t workers = 1);

// Phi(d_1 / 2 sigma_1) - Phi(sqrt(d_1^2 / 4 sigma_1^2 + d_2^2 / 4 sigma_2^2)).
double bayes_gap_component(const GaussianTaskSpec& spec);

}  // namespace fsel
