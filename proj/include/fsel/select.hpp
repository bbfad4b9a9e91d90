#pragma once

#include <cstddef>
#include <vector>

#include "fsel/core.hpp"
#include "fsel/stats.hpp"

namespace fsel {

/// Dimensions ordered by descending importance; ties keep the lower index first.
std::vector<std::size_t> rank_dimensions(const ImportanceVector& importance);

struct MaskSpec {
  std::size_t keep_count = 0;
  std::vector<std::size_t> ranking;
};

/// Zeroes every dimension outside the first `keep_count` entries of the
/// ranking. The output keeps the input dimensionality.
LabeledFeatureSet hard_mask(const LabeledFeatureSet& data, const MaskSpec& mask);

struct ScaleVector {
  std::vector<double> s;
  bool norm_preserving = true;
  // All importances were zero; the scales are the identity.
  bool identity_fallback = false;
};

inline constexpr double kDefaultSoftMaskEpsilon = 1e-6;
// Scales are floored at this fraction of the largest scale so that every entry
// stays strictly positive.
inline constexpr double kMinScaleRatio = 1e-12;

/// Soft mask: s_k proportional to importance_k / (|overall_mean_k| + epsilon),
/// with one global factor chosen so the mean squared row norm of `train` is
/// unchanged after scaling.
ScaleVector soft_mask_scales(const ImportanceVector& importance,
                             const ClassStats& stats, const LabeledFeatureSet& train,
                             double epsilon = kDefaultSoftMaskEpsilon);

/// Same as above but with an explicit overall mean per dimension.
ScaleVector soft_mask_scales(const ImportanceVector& importance,
                             const std::vector<double>& overall_mean,
                             const LabeledFeatureSet& train,
                             double epsilon = kDefaultSoftMaskEpsilon);

LabeledFeatureSet apply_scales(const LabeledFeatureSet& data, const ScaleVector& scales);

}  // namespace fsel
