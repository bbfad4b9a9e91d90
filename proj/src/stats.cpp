#include "fsel/stats.hpp"

#include <cmath>
#include <string>

#include "fsel/error.hpp"

namespace fsel {

ClassStats class_stats(const LabeledFeatureSet& data, VarianceSpec variance) {
  const std::size_t n_classes = data.n_classes();
  const std::size_t dim = data.dim();
  if (variance.policy == VariancePolicy::kFixed &&
      !(variance.fixed_value >= 0.0 && std::isfinite(variance.fixed_value))) {
    throw ValidationError("fixed std must be finite and >= 0");
  }

  ClassStats out;
  out.mean = Matrix(n_classes, dim);
  out.std = Matrix(n_classes, dim);
  out.counts = data.class_counts();
  out.overall_mean.assign(dim, 0.0);

  for (std::size_t c = 0; c < n_classes; ++c) {
    if (out.counts[c] == 0) {
      throw ValidationError("class " + std::to_string(c) + " has no samples");
    }
    if (variance.policy == VariancePolicy::kSampleStd && out.counts[c] < 2) {
      throw ValidationError("sample std needs >= 2 samples, class " + std::to_string(c) +
                            " has 1; use the fixed-variance policy");
    }
  }

  const Matrix& x = data.features();
  const auto& y = data.labels();
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto m = out.mean.row(y[i]);
    const auto row = x.row(i);
    for (std::size_t k = 0; k < dim; ++k) m[k] += row[k];
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (double& v : out.mean.row(c)) v /= static_cast<double>(out.counts[c]);
  }

  if (variance.policy == VariancePolicy::kFixed) {
    for (double& v : out.std.data()) v = variance.fixed_value;
  } else {
    // Two-pass around the class mean.
    for (std::size_t i = 0; i < data.size(); ++i) {
      auto s = out.std.row(y[i]);
      const auto m = out.mean.row(y[i]);
      const auto row = x.row(i);
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = row[k] - m[k];
        s[k] += d * d;
      }
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double denom = static_cast<double>(out.counts[c] - 1);
      for (double& v : out.std.row(c)) v = std::sqrt(v / denom);
    }
  }

  for (std::size_t c = 0; c < n_classes; ++c) {
    const auto m = out.mean.row(c);
    for (std::size_t k = 0; k < dim; ++k) out.overall_mean[k] += m[k];
  }
  for (double& v : out.overall_mean) v /= static_cast<double>(n_classes);
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

const char* to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::kOracle: return "oracle";
    case Provenance::kEstimatedRaw: return "estimated-raw";
    case Provenance::kEstimatedAugmented: return "estimated-augmented";
  }
  return "unknown";
}

ImportanceVector importance_binary(const ClassStats& stats, std::size_t c1,
                                   std::size_t c2, Provenance provenance, double cap) {
  if (c1 >= stats.n_classes() || c2 >= stats.n_classes() || c1 == c2) {
    throw ValidationError("importance_binary needs two distinct classes of the stats");
  }
  ImportanceVector out;
  out.provenance = provenance;
  out.omega.resize(stats.dim());
  for (std::size_t k = 0; k < stats.dim(); ++k) {
    const double gap = std::abs(stats.mean(c1, k) - stats.mean(c2, k));
    const double spread = stats.std(c1, k) + stats.std(c2, k);
    if (spread > 0.0) {
      out.omega[k] = gap / spread;
    } else if (gap == 0.0) {
      out.omega[k] = 0.0;
    } else {
      out.omega[k] = cap;
      out.capped = true;
    }
  }
  return out;
}

ImportanceVector importance_for_classes(const ClassStats& stats,
                                        const std::vector<std::uint32_t>& classes,
                                        Provenance provenance) {
  if (classes.size() < 2) {
    throw ValidationError("importance needs at least two classes");
  }
  ImportanceVector out;
  out.provenance = provenance;
  out.omega.assign(stats.dim(), 0.0);
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t j = i + 1; j < classes.size(); ++j) {
      const auto pair = importance_binary(stats, classes[i], classes[j], provenance);
      for (std::size_t k = 0; k < out.omega.size(); ++k) out.omega[k] += pair.omega[k];
      out.capped = out.capped || pair.capped;
      ++pairs;
    }
  }
  for (double& w : out.omega) w /= static_cast<double>(pairs);
  return out;
}

ImportanceVector importance_multiclass(const ClassStats& stats, Provenance provenance) {
  std::vector<std::uint32_t> all(stats.n_classes());
  for (std::uint32_t c = 0; c < all.size(); ++c) all[c] = c;
  return importance_for_classes(stats, all, provenance);
}

ImportanceVector importance_multiclass(const LabeledFeatureSet& data,
                                       VarianceSpec variance, Provenance provenance) {
  if (data.n_classes() < 2) throw ValidationError("importance needs at least two classes");
  return importance_multiclass(class_stats(data, variance), provenance);
}

ImportanceVector importance_estimated(const LabeledFeatureSet& train,
                                      EstimatePolicy policy, double fixed_std) {
  const auto counts = train.class_counts();
  bool singleton = false;
  for (auto n : counts) singleton = singleton || n < 2;

  VarianceSpec variance = VarianceSpec::sample();
  switch (policy) {
    case EstimatePolicy::kAuto:
      if (singleton) variance = VarianceSpec::fixed(fixed_std);
      break;
    case EstimatePolicy::kFixed:
      variance = VarianceSpec::fixed(fixed_std);
      break;
    case EstimatePolicy::kSampleStd:
      break;
  }
  const Provenance provenance =
      train.has_groups() ? Provenance::kEstimatedAugmented : Provenance::kEstimatedRaw;
  return importance_multiclass(train, variance, provenance);
}

}  // namespace fsel
