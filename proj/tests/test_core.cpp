#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "fsel/core.hpp"
#include "fsel/error.hpp"
#include "fsel/rng.hpp"

using namespace fsel;

namespace {

// n_classes classes, per_class rows each; row i of class c has features (c, i).
LabeledFeatureSet grid_data(std::uint32_t n_classes, std::size_t per_class) {
  Matrix x(n_classes * per_class, 2);
  std::vector<std::uint32_t> y;
  for (std::uint32_t c = 0; c < n_classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      x(y.size(), 0) = c;
      x(y.size(), 1) = static_cast<double>(i);
      y.push_back(c);
    }
  }
  return {std::move(x), std::move(y), n_classes};
}

}  // namespace

TEST(Seed, Deterministic) {
  EXPECT_EQ(derive_task_seed({7, 0}), derive_task_seed({7, 0}));
}

TEST(Seed, TaskIndexChangesSeed) {
  EXPECT_NE(derive_task_seed({7, 0}), derive_task_seed({7, 1}));
}

TEST(Seed, BaseSeedChangesSeed) {
  EXPECT_NE(derive_task_seed({7, 0}), derive_task_seed({8, 0}));
}

TEST(Seed, NoCollisionsOverManyTasks) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 100000; ++i) seen.insert(derive_task_seed({42, i}));
  EXPECT_EQ(seen.size(), 100000u);
}

TEST(Rng, UniformInUnitInterval) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, BelowStaysInRange) {
  Rng rng(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[rng.below(7)];
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, NormalMoments) {
  Rng rng(11);
  const int n = 200000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    ss += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(ss / n, 1.0, 0.02);
}

TEST(LabeledFeatureSet, RejectsLabelOutOfRange) {
  EXPECT_THROW(LabeledFeatureSet(Matrix(2, 1), {0, 2}, 2), ValidationError);
}

TEST(LabeledFeatureSet, RejectsEmptyClass) {
  EXPECT_THROW(LabeledFeatureSet(Matrix(2, 1), {0, 0}, 2), ValidationError);
}

TEST(LabeledFeatureSet, RejectsNonFinite) {
  Matrix x(2, 1);
  x(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(LabeledFeatureSet(x, {0, 1}, 2), ValidationError);
}

TEST(LabeledFeatureSet, RejectsGroupMixingLabels) {
  EXPECT_THROW(LabeledFeatureSet(Matrix(2, 1), {0, 1}, 2, std::vector<std::uint32_t>{5, 5}),
               ValidationError);
}

TEST(LabeledFeatureSet, BaseRowsAreFirstOfEachGroup) {
  Matrix x(5, 1, {1, 2, 3, 4, 5});
  LabeledFeatureSet d(x, {0, 0, 1, 1, 1}, 2, std::vector<std::uint32_t>{0, 0, 1, 2, 2});
  EXPECT_EQ(d.base_row_indices(), (std::vector<std::size_t>{0, 2, 3}));
  const auto base = d.base_rows();
  EXPECT_FALSE(base.has_groups());
  EXPECT_EQ(base.features().data(), (std::vector<double>{1, 3, 4}));
}

TEST(SampleEpisode, SameSeedBitIdentical) {
  const auto data = grid_data(5, 20);
  const Episode a = sample_episode(data, 3, 2, 4, 99);
  const Episode b = sample_episode(data, 3, 2, 4, 99);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.query, b.query);
  EXPECT_EQ(a.classes, b.classes);
}

TEST(SampleEpisode, FullDrawPartitionsEveryClass) {
  const auto data = grid_data(3, 6);
  const Episode ep = sample_episode(data, 3, 2, 4, 1);
  std::multiset<std::pair<double, double>> seen, all;
  for (const auto* part : {&ep.train, &ep.query}) {
    for (std::size_t i = 0; i < part->size(); ++i) {
      seen.insert({part->features()(i, 0), part->features()(i, 1)});
    }
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    all.insert({data.features()(i, 0), data.features()(i, 1)});
  }
  EXPECT_EQ(seen, all);
}

TEST(SampleEpisode, InsufficientSamplesNamesClass) {
  const auto data = grid_data(2, 3);
  try {
    sample_episode(data, 2, 3, 1, 0);
    FAIL() << "expected a precondition error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient samples in class"), std::string::npos);
  }
}

TEST(SampleEpisode, InsufficientClasses) {
  EXPECT_THROW(sample_episode(grid_data(2, 5), 3, 1, 1, 0), ValidationError);
}

TEST(SampleEpisode, LabelsRemappedInDrawOrder) {
  const auto data = grid_data(6, 10);
  const Episode ep = sample_episode(data, 4, 3, 2, 17);
  ASSERT_EQ(ep.classes.size(), 4u);
  for (std::size_t i = 0; i < ep.train.size(); ++i) {
    // Feature 0 holds the source class.
    EXPECT_EQ(ep.train.features()(i, 0), ep.classes[ep.train.labels()[i]]);
  }
  for (std::size_t i = 0; i < ep.query.size(); ++i) {
    EXPECT_EQ(ep.query.features()(i, 0), ep.classes[ep.query.labels()[i]]);
  }
  const auto counts = ep.train.class_counts();
  for (auto c : counts) EXPECT_EQ(c, 3u);
}

TEST(SampleEpisode, TrainAndQueryDisjoint) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = grid_data(4, 12);
    const Episode ep = sample_episode(data, 3, 4, 5, seed);
    std::set<std::pair<double, double>> train;
    for (std::size_t i = 0; i < ep.train.size(); ++i) {
      train.insert({ep.train.features()(i, 0), ep.train.features()(i, 1)});
    }
    for (std::size_t i = 0; i < ep.query.size(); ++i) {
      EXPECT_FALSE(train.count({ep.query.features()(i, 0), ep.query.features()(i, 1)}));
    }
  }
}

TEST(SampleEpisode, SelectionIndependentOfRowOrder) {
  // The chosen (source label, row) multiset is a function of content, not layout,
  // once rows of each class keep their relative order.
  const auto data = grid_data(3, 8);
  Matrix x(data.size(), 2);
  std::vector<std::uint32_t> y;
  // Interleave classes.
  std::size_t r = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::uint32_t c = 0; c < 3; ++c, ++r) {
      x(r, 0) = c;
      x(r, 1) = static_cast<double>(i);
      y.push_back(c);
    }
  }
  const LabeledFeatureSet shuffled(x, y, 3);
  auto picks = [](const Episode& ep) {
    std::multiset<std::pair<double, double>> out;
    for (std::size_t i = 0; i < ep.train.size(); ++i) {
      out.insert({ep.train.features()(i, 0), ep.train.features()(i, 1)});
    }
    return out;
  };
  EXPECT_EQ(picks(sample_episode(data, 2, 3, 2, 5)), picks(sample_episode(shuffled, 2, 3, 2, 5)));
}

TEST(SampleEpisode, ViewsTravelWithTheirBase) {
  // Class c, sample s has a base row (c, s) and two views (c, s + 0.1), (c, s + 0.2).
  Matrix x(2 * 5 * 3, 2);
  std::vector<std::uint32_t> y, g;
  std::size_t r = 0;
  for (std::uint32_t c = 0; c < 2; ++c) {
    for (std::uint32_t s = 0; s < 5; ++s) {
      for (int v = 0; v < 3; ++v, ++r) {
        x(r, 0) = c;
        x(r, 1) = s + 0.1 * v;
        y.push_back(c);
        g.push_back(c * 5 + s);
      }
    }
  }
  const LabeledFeatureSet data(x, y, 2, g);
  const Episode ep = sample_episode(data, 2, 2, 3, 8);
  ASSERT_TRUE(ep.train.has_groups());
  EXPECT_EQ(ep.train.size(), 2u * 2u * 3u);
  EXPECT_EQ(ep.train.base_row_indices().size(), 4u);
  EXPECT_EQ(ep.query.size(), 6u);
  EXPECT_FALSE(ep.query.has_groups());
  for (std::size_t i = 0; i < ep.query.size(); ++i) {
    const double v = ep.query.features()(i, 1);
    EXPECT_EQ(v, std::floor(v));  // base rows only
  }
  std::map<std::uint32_t, std::set<double>> by_group;
  for (std::size_t i = 0; i < ep.train.size(); ++i) {
    by_group[(*ep.train.groups())[i]].insert(std::floor(ep.train.features()(i, 1)));
  }
  for (const auto& [group, bases] : by_group) EXPECT_EQ(bases.size(), 1u);
}
