#pragma once

#include <cstddef>
#include <vector>

#include "fsel/core.hpp"

namespace fsel {

enum class VariancePolicy {
  kSampleStd,  // unbiased (n-1) per-class sample standard deviation
  kFixed,      // every class std set to a constant
};

inline constexpr double kDefaultFixedStd = 1.0;

struct VarianceSpec {
  VariancePolicy policy = VariancePolicy::kSampleStd;
  double fixed_value = kDefaultFixedStd;

  static VarianceSpec sample() { return {}; }
  static VarianceSpec fixed(double value = kDefaultFixedStd) {
    return {VariancePolicy::kFixed, value};
  }
};

// Per-class means and standard deviations. `overall_mean[k]` is the unweighted
// mean of the class means of dimension k.
struct ClassStats {
  Matrix mean;  // n_classes x dim
  Matrix std;   // n_classes x dim
  std::vector<double> overall_mean;
  std::vector<std::size_t> counts;

  std::size_t n_classes() const noexcept { return mean.rows(); }
  std::size_t dim() const noexcept { return mean.cols(); }
};

// All rows (views included) contribute to the statistics.
ClassStats class_stats(const LabeledFeatureSet& data, VarianceSpec variance);

// Standard normal CDF.
double normal_cdf(double x);

enum class Provenance { kOracle, kEstimatedRaw, kEstimatedAugmented };

const char* to_string(Provenance p) noexcept;

struct ImportanceVector {
  std::vector<double> omega;
  Provenance provenance = Provenance::kOracle;
  // Set when a dimension had zero spread in both classes but different means;
  // those entries hold the cap value.
  bool capped = false;

  std::size_t dim() const noexcept { return omega.size(); }
};

inline constexpr double kImportanceCap = 1e6;

// |mu_1k - mu_2k| / (sigma_1k + sigma_2k) for the class pair (c1, c2).
ImportanceVector importance_binary(const ClassStats& stats, std::size_t c1,
                                   std::size_t c2,
                                   Provenance provenance = Provenance::kOracle,
                                   double cap = kImportanceCap);

// Unweighted mean of the binary importance over every class pair.
ImportanceVector importance_multiclass(const ClassStats& stats,
                                       Provenance provenance = Provenance::kOracle);
ImportanceVector importance_multiclass(const LabeledFeatureSet& data,
                                       VarianceSpec variance,
                                       Provenance provenance = Provenance::kOracle);

// Pair average restricted to a subset of classes of `stats`.
ImportanceVector importance_for_classes(const ClassStats& stats,
                                        const std::vector<std::uint32_t>& classes,
                                        Provenance provenance = Provenance::kOracle);

enum class EstimatePolicy {
  kAuto,        // fixed std when any class has a single row, sample std otherwise
  kFixed,
  kSampleStd,
};

// Importance estimated from an episode's training split. Views (groups) are
// pooled into their class, which marks the result as augmented.
ImportanceVector importance_estimated(const LabeledFeatureSet& train,
                                      EstimatePolicy policy = EstimatePolicy::kAuto,
                                      double fixed_std = kDefaultFixedStd);

}  // namespace fsel
