#include <gtest/gtest.h>

#include <cmath>

#include "fsel/classify.hpp"
#include "fsel/error.hpp"
#include "fsel/rng.hpp"
#include "fsel/select.hpp"

using namespace fsel;

namespace {

ImportanceVector iv(std::vector<double> w) { return {std::move(w), Provenance::kOracle, false}; }

LabeledFeatureSet random_set(std::size_t n, std::size_t dim, std::uint64_t seed,
                             double offset = 0.0) {
  Rng rng(seed);
  Matrix x(n, dim);
  std::vector<std::uint32_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i % 2;
    for (std::size_t k = 0; k < dim; ++k) x(i, k) = rng.normal(offset + y[i], 1.0);
  }
  return {x, y, 2};
}

}  // namespace

TEST(RankDimensions, Descending) {
  EXPECT_EQ(rank_dimensions(iv({1.67, 1.0})), (std::vector<std::size_t>{0, 1}));
}

TEST(RankDimensions, TiesKeepLowerIndexFirst) {
  EXPECT_EQ(rank_dimensions(iv({1, 1, 1})), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(RankDimensions, ReversedInputReversesPermutation) {
  EXPECT_EQ(rank_dimensions(iv({1, 2, 3, 4})), (std::vector<std::size_t>{3, 2, 1, 0}));
  EXPECT_EQ(rank_dimensions(iv({4, 3, 2, 1})), (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(HardMask, KeepAllIsIdentity) {
  const auto d = random_set(10, 4, 1);
  EXPECT_EQ(hard_mask(d, {4, {3, 1, 0, 2}}), d);
}

TEST(HardMask, ZeroesLowerRankedDimension) {
  Matrix x(2, 2, {1, 2, 3, 4});
  const LabeledFeatureSet d(x, {0, 1}, 2);
  const auto masked = hard_mask(d, {1, rank_dimensions(iv({1.67, 1.0}))});
  EXPECT_EQ(masked.features().data(), (std::vector<double>{1, 0, 3, 0}));
}

TEST(HardMask, RejectsZeroAndOversizedKeep) {
  const auto d = random_set(4, 3, 2);
  EXPECT_THROW(hard_mask(d, {0, {0, 1, 2}}), ValidationError);
  EXPECT_THROW(hard_mask(d, {4, {0, 1, 2}}), ValidationError);
}

TEST(HardMask, Idempotent) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = random_set(12, 6, seed);
    const MaskSpec m{3, {5, 0, 2, 1, 3, 4}};
    const auto once = hard_mask(d, m);
    EXPECT_EQ(hard_mask(once, m), once);
  }
}

TEST(SoftMask, ProportionalToImportance) {
  const auto d = random_set(20, 2, 3, 5.0);
  const auto s = soft_mask_scales(iv({2, 1}), std::vector<double>{1, 1}, d, 0.0);
  EXPECT_NEAR(s.s[0] / s.s[1], 2.0, 1e-12);
  EXPECT_TRUE(s.norm_preserving);
}

TEST(SoftMask, UniformInputsGiveUniformScales) {
  const auto d = random_set(20, 3, 4, 2.0);
  const auto s = soft_mask_scales(iv({0.7, 0.7, 0.7}), std::vector<double>{-3, 3, 3}, d, 1e-6);
  EXPECT_NEAR(s.s[0], s.s[1], 1e-12);
  EXPECT_NEAR(s.s[1], s.s[2], 1e-12);
}

TEST(SoftMask, ZeroMeanUsesEpsilon) {
  const auto d = random_set(20, 2, 5, 1.0);
  const auto s = soft_mask_scales(iv({1, 1}), std::vector<double>{0, 1}, d, 1e-6);
  ASSERT_TRUE(std::isfinite(s.s[0]));
  // s_k = c * w_k / (|mu_k| + eps)
  EXPECT_NEAR(s.s[0] / s.s[1], (1.0 + 1e-6) / 1e-6, 1e-3);
}

TEST(SoftMask, PreservesMeanSquaredNorm) {
  const auto d = random_set(50, 4, 6, 1.5);
  const auto s = soft_mask_scales(iv({3, 1, 0.5, 0.1}), std::vector<double>{1.5, 2, 1, 0.5}, d);
  const auto scaled = apply_scales(d, s);
  auto msn = [](const LabeledFeatureSet& x) {
    double t = 0.0;
    for (double v : x.features().data()) t += v * v;
    return t / static_cast<double>(x.size());
  };
  EXPECT_NEAR(msn(scaled), msn(d), 1e-9 * msn(d));
}

TEST(SoftMask, AllZeroImportanceFallsBackToIdentity) {
  const auto d = random_set(10, 2, 7);
  const auto s = soft_mask_scales(iv({0, 0}), std::vector<double>{1, 1}, d);
  EXPECT_TRUE(s.identity_fallback);
  EXPECT_EQ(s.s, (std::vector<double>{1, 1}));
}

TEST(SoftMask, ScalesStayPositive) {
  const auto d = random_set(10, 3, 8, 1.0);
  const auto s = soft_mask_scales(iv({1, 0, 2}), std::vector<double>{1, 1, 1}, d);
  for (double v : s.s) EXPECT_GT(v, 0.0);
}

TEST(SoftMask, AdjustedMeansProportionalToImportance) {
  // With population means, |mean_k(adjusted)| / omega_k is one constant.
  const auto d = random_set(30, 4, 9, 2.0);
  const std::vector<double> mu{2.5, -1.0, 4.0, 0.3};
  const std::vector<double> w{1.2, 0.4, 2.0, 0.9};
  const auto s = soft_mask_scales(iv(w), mu, d, 0.0);
  const double ratio0 = std::abs(mu[0] * s.s[0]) / w[0];
  for (std::size_t k = 1; k < 4; ++k) {
    EXPECT_NEAR(std::abs(mu[k] * s.s[k]) / w[k] / ratio0, 1.0, 1e-9);
  }
}

TEST(ApplyScales, OnesAreIdentity) {
  const auto d = random_set(5, 3, 10);
  EXPECT_EQ(apply_scales(d, ScaleVector{{1, 1, 1}}), d);
}

TEST(ApplyScales, ReciprocalRestores) {
  const auto d = random_set(8, 3, 11);
  const ScaleVector s{{0.3, 7.0, 1e-3}};
  const ScaleVector inv{{1 / 0.3, 1 / 7.0, 1e3}};
  const auto back = apply_scales(apply_scales(d, s), inv);
  for (std::size_t i = 0; i < d.features().data().size(); ++i) {
    EXPECT_NEAR(back.features().data()[i], d.features().data()[i],
                1e-12 * std::abs(d.features().data()[i]) + 1e-300);
  }
}

TEST(ApplyScales, ZeroColumnStaysZero) {
  Matrix x(2, 2, {0, 1, 0, 2});
  const LabeledFeatureSet d(x, {0, 1}, 2);
  const auto out = apply_scales(d, ScaleVector{{123.0, 2.0}});
  EXPECT_EQ(out.features()(0, 0), 0.0);
  EXPECT_EQ(out.features()(1, 0), 0.0);
}

TEST(ApplyScales, DimMismatch) {
  EXPECT_THROW(apply_scales(random_set(4, 3, 12), ScaleVector{{1, 1}}), ValidationError);
}

TEST(NccScaleInvariance, GlobalScaleKeepsPredictions) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto train = random_set(10, 5, seed);
    const auto query = random_set(40, 5, seed + 100);
    const ScaleVector c{std::vector<double>(5, 3.7)};
    const auto clf = fit_ncc(train);
    const auto scaled = fit_ncc(apply_scales(train, c));
    const auto q2 = apply_scales(query, c);
    for (std::size_t i = 0; i < query.size(); ++i) {
      EXPECT_EQ(clf.predict(query.features().row(i)), scaled.predict(q2.features().row(i)));
    }
  }
}
