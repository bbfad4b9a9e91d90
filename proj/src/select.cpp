#include "fsel/select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fsel/error.hpp"

namespace fsel {

std::vector<std::size_t> rank_dimensions(const ImportanceVector& importance) {
  std::vector<std::size_t> order(importance.dim());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& w = importance.omega;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
  return order;
}

LabeledFeatureSet hard_mask(const LabeledFeatureSet& data, const MaskSpec& mask) {
  const std::size_t dim = data.dim();
  if (mask.keep_count == 0 || mask.keep_count > dim) {
    throw ValidationError("keep count " + std::to_string(mask.keep_count) +
                          " outside [1, " + std::to_string(dim) + "]");
  }
  if (mask.ranking.size() != dim) {
    throw ValidationError("ranking length does not match feature dim");
  }
  std::vector<char> keep(dim, 0);
  for (std::size_t i = 0; i < mask.keep_count; ++i) {
    if (mask.ranking[i] >= dim) throw ValidationError("ranking entry out of range");
    keep[mask.ranking[i]] = 1;
  }
  Matrix x = data.features();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!keep[k]) row[k] = 0.0;
    }
  }
  return {std::move(x), data.labels(), data.n_classes(), data.groups()};
}

namespace {

double mean_squared_row_norm(const Matrix& x, const std::vector<double>* scales) {
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double v = scales ? row[k] * (*scales)[k] : row[k];
      total += v * v;
    }
  }
  return x.rows() ? total / static_cast<double>(x.rows()) : 0.0;
}

}  // namespace

ScaleVector soft_mask_scales(const ImportanceVector& importance,
                             const std::vector<double>& overall_mean,
                             const LabeledFeatureSet& train, double epsilon) {
  const std::size_t dim = importance.dim();
  if (overall_mean.size() != dim || train.dim() != dim) {
    throw ValidationError("soft mask: importance, means and train disagree on dim");
  }
  if (!(epsilon >= 0.0)) throw ValidationError("soft mask: epsilon must be >= 0");

  ScaleVector out;
  out.s.assign(dim, 1.0);
  const bool all_zero = std::all_of(importance.omega.begin(), importance.omega.end(),
                                    [](double w) { return w == 0.0; });
  if (all_zero) {
    out.identity_fallback = true;
    return out;
  }

  double largest = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double denom = std::abs(overall_mean[k]) + epsilon;
    if (denom == 0.0) {
      throw ValidationError("soft mask: dimension " + std::to_string(k) +
                            " has zero mean and epsilon is 0");
    }
    out.s[k] = importance.omega[k] / denom;
    largest = std::max(largest, out.s[k]);
  }
  const double floor = largest * kMinScaleRatio;
  for (double& s : out.s) s = std::max(s, floor);

  const double before = mean_squared_row_norm(train.features(), nullptr);
  const double after = mean_squared_row_norm(train.features(), &out.s);
  if (before > 0.0 && after > 0.0) {
    const double c = std::sqrt(before / after);
    for (double& s : out.s) s *= c;
  } else {
    // Nothing to match against; normalize the largest scale to one.
    for (double& s : out.s) s /= largest;
    out.norm_preserving = false;
  }
  return out;
}

ScaleVector soft_mask_scales(const ImportanceVector& importance, const ClassStats& stats,
                             const LabeledFeatureSet& train, double epsilon) {
  return soft_mask_scales(importance, stats.overall_mean, train, epsilon);
}

LabeledFeatureSet apply_scales(const LabeledFeatureSet& data, const ScaleVector& scales) {
  if (scales.s.size() != data.dim()) {
    throw ValidationError("apply_scales: " + std::to_string(scales.s.size()) +
                          " scales for dim " + std::to_string(data.dim()));
  }
  Matrix x = data.features();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] *= scales.s[k];
  }
  return {std::move(x), data.labels(), data.n_classes(), data.groups()};
}

}  // namespace fsel
