#include <gtest/gtest.h>

#include <cmath>

#include "fsel/classify.hpp"
#include "fsel/error.hpp"
#include "fsel/gaussian.hpp"
#include "fsel/rng.hpp"

using namespace fsel;

namespace {

LabeledFeatureSet gaussian_set(std::size_t n_classes, std::size_t per_class, std::size_t dim,
                               std::uint64_t seed, double spread = 1.0) {
  Rng rng(seed);
  Matrix centers(n_classes, dim);
  for (double& v : centers.data()) v = rng.normal(0.0, 2.0);
  Matrix x(n_classes * per_class, dim);
  std::vector<std::uint32_t> y;
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      for (std::size_t k = 0; k < dim; ++k) x(y.size(), k) = rng.normal(centers(c, k), spread);
      y.push_back(static_cast<std::uint32_t>(c));
    }
  }
  return {x, y, static_cast<std::uint32_t>(n_classes)};
}

}  // namespace

TEST(Ncc, CentroidsAndLinearForm) {
  Matrix x(4, 2, {0, 0, 2, 0, 10, 10, 12, 10});
  const auto clf = fit_ncc(LabeledFeatureSet(x, {0, 0, 1, 1}, 2));
  ASSERT_TRUE(clf.centroids);
  EXPECT_EQ(clf.centroids->data(), (std::vector<double>{1, 0, 11, 10}));
  EXPECT_EQ(clf.weights.data(), (std::vector<double>{2, 0, 22, 20}));
  EXPECT_EQ(clf.bias, (std::vector<double>{-1, -221}));
}

TEST(Ncc, PredictsNearestCentroid) {
  Matrix x(2, 1, {-1, 1});
  const auto clf = fit_ncc(LabeledFeatureSet(x, {0, 1}, 2));
  const double a[] = {-0.2};
  const double b[] = {0.3};
  EXPECT_EQ(clf.predict(a), 0u);
  EXPECT_EQ(clf.predict(b), 1u);
}

TEST(Ncc, TieGoesToLowestClass) {
  Matrix x(2, 1, {-1, 1});
  const auto clf = fit_ncc(LabeledFeatureSet(x, {0, 1}, 2));
  const double mid[] = {0.0};
  EXPECT_EQ(clf.predict(mid), 0u);
}

TEST(Ncc, LinearFormMatchesDistanceArgmin) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t classes = 2 + seed % 4;
    const auto train = gaussian_set(classes, 1 + seed % 5, 1 + seed % 7, seed);
    const auto query = gaussian_set(classes, 20, train.dim(), seed + 1000, 3.0);
    const auto clf = fit_ncc(train);
    for (std::size_t i = 0; i < query.size(); ++i) {
      ASSERT_EQ(clf.predict(query.features().row(i)),
                nearest_centroid(*clf.centroids, query.features().row(i)))
          << "seed " << seed << " row " << i;
    }
  }
}

TEST(Logreg, SeparableDataIsFitPerfectly) {
  Matrix x(6, 1, {-3, -2, -1, 1, 2, 3});
  const LabeledFeatureSet d(x, {0, 0, 0, 1, 1, 1}, 2);
  const auto clf = fit_logreg(d);
  EXPECT_TRUE(clf.converged);
  EXPECT_EQ(count_errors(clf, d), 0u);
}

TEST(Logreg, SymmetricDataGivesSymmetricRule) {
  Matrix x(4, 1, {-2, -1, 1, 2});
  const auto clf = fit_logreg(LabeledFeatureSet(x, {0, 0, 1, 1}, 2));
  EXPECT_NEAR(clf.bias[1] - clf.bias[0], 0.0, 1e-6);
  EXPECT_GT(clf.weights(1, 0) - clf.weights(0, 0), 0.0);
}

TEST(Logreg, GradientVanishesAtSolution) {
  // Check stationarity of the documented objective by central differences.
  const auto d = gaussian_set(3, 6, 2, 4);
  FitConfig cfg;
  cfg.l2_lambda = 0.1;
  const auto clf = fit_logreg(d, cfg);
  auto objective = [&](const LinearClassifier& c) {
    double loss = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto z = c.logits(d.features().row(i));
      double m = z[0];
      for (double v : z) m = std::max(m, v);
      double s = 0.0;
      for (double v : z) s += std::exp(v - m);
      loss += m + std::log(s) - z[d.labels()[i]];
    }
    double reg = 0.0;
    for (double w : c.weights.data()) reg += w * w;
    return loss / static_cast<double>(d.size()) + 0.5 * 0.1 * reg;
  };
  const double h = 1e-5;
  for (std::size_t j = 0; j < clf.weights.data().size(); ++j) {
    auto up = clf, down = clf;
    up.weights.data()[j] += h;
    down.weights.data()[j] -= h;
    EXPECT_NEAR((objective(up) - objective(down)) / (2 * h), 0.0, 1e-6);
  }
  for (std::size_t j = 0; j < clf.bias.size(); ++j) {
    auto up = clf, down = clf;
    up.bias[j] += h;
    down.bias[j] -= h;
    EXPECT_NEAR((objective(up) - objective(down)) / (2 * h), 0.0, 1e-6);
  }
}

TEST(Logreg, Deterministic) {
  const auto d = gaussian_set(4, 5, 6, 9);
  const auto a = fit_logreg(d);
  const auto b = fit_logreg(d);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(Logreg, OneShotAgreesWithNcc) {
  // With one sample per class and a ridge penalty the binary logistic rule is
  // the perpendicular bisector of the two points.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto train = gaussian_set(2, 1, 3, seed);
    const auto query = gaussian_set(2, 50, 3, seed + 500, 4.0);
    const auto ncc = fit_ncc(train);
    const auto lr = fit_logreg(train);
    for (std::size_t i = 0; i < query.size(); ++i) {
      EXPECT_EQ(ncc.predict(query.features().row(i)), lr.predict(query.features().row(i)));
    }
  }
}

TEST(Evaluate, CountsErrors) {
  Matrix x(2, 1, {-1, 1});
  const auto clf = fit_ncc(LabeledFeatureSet(x, {0, 1}, 2));
  Matrix q(4, 1, {-2, -0.5, 0.5, 3});
  EXPECT_DOUBLE_EQ(evaluate(clf, LabeledFeatureSet(q, {0, 1, 1, 0}, 2)), 0.5);
  EXPECT_DOUBLE_EQ(evaluate(clf, LabeledFeatureSet(q, {0, 0, 1, 1}, 2)), 0.0);
}

TEST(Evaluate, RejectsDimMismatch) {
  Matrix x(2, 1, {-1, 1});
  const auto clf = fit_ncc(LabeledFeatureSet(x, {0, 1}, 2));
  EXPECT_THROW(evaluate(clf, LabeledFeatureSet(Matrix(2, 2), {0, 1}, 2)), ValidationError);
}

TEST(Erm01, NeverWorseThanOtherRulesOnTrainingData) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto train = gaussian_set(2, 3 + seed % 8, 2, seed, 2.5);
    const auto erm = fit_erm01_2d(train);
    EXPECT_LE(erm.errors, count_errors(fit_ncc(train), train));
    EXPECT_LE(erm.errors, count_errors(fit_logreg(train), train));
    EXPECT_EQ(erm.errors, count_errors(erm.classifier, train));
  }
}

TEST(Erm01, OneDimNeverWorseThanNcc) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto train = gaussian_set(2, 2 + seed % 9, 1, seed, 2.5);
    const auto erm = fit_erm01_1d(train);
    EXPECT_LE(erm.errors, count_errors(fit_ncc(train), train));
    EXPECT_EQ(erm.errors, count_errors(erm.classifier, train));
  }
}
