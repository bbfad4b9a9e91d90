#include "fsel/core.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include "fsel/error.hpp"
#include "fsel/rng.hpp"

namespace fsel {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ValidationError("matrix data has " + std::to_string(data_.size()) +
                          " entries, expected " + std::to_string(rows_ * cols_));
  }
}

LabeledFeatureSet::LabeledFeatureSet(Matrix features, std::vector<std::uint32_t> labels,
                                     std::uint32_t n_classes,
                                     std::optional<std::vector<std::uint32_t>> groups)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      n_classes_(n_classes),
      groups_(std::move(groups)) {
  if (labels_.size() != features_.rows()) {
    throw ValidationError("label count " + std::to_string(labels_.size()) +
                          " does not match row count " +
                          std::to_string(features_.rows()));
  }
  if (n_classes_ == 0) throw ValidationError("n_classes must be >= 1");
  if (groups_ && groups_->size() != labels_.size()) {
    throw ValidationError("group count does not match row count");
  }
  std::vector<std::size_t> counts(n_classes_, 0);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= n_classes_) {
      throw ValidationError("row " + std::to_string(i) + ": label " +
                            std::to_string(labels_[i]) + " >= n_classes " +
                            std::to_string(n_classes_));
    }
    ++counts[labels_[i]];
  }
  for (std::uint32_t c = 0; c < n_classes_; ++c) {
    if (counts[c] == 0) {
      throw ValidationError("class " + std::to_string(c) + " has no samples");
    }
  }
  for (std::size_t i = 0; i < features_.rows(); ++i) {
    for (double v : features_.row(i)) {
      if (!std::isfinite(v)) {
        throw ValidationError("row " + std::to_string(i) + " has a non-finite feature");
      }
    }
  }
  if (groups_) {
    std::unordered_map<std::uint32_t, std::uint32_t> group_label;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      auto [it, inserted] = group_label.emplace((*groups_)[i], labels_[i]);
      if (!inserted && it->second != labels_[i]) {
        throw ValidationError("group " + std::to_string((*groups_)[i]) +
                              " mixes labels (row " + std::to_string(i) + ")");
      }
    }
  }
}

std::vector<std::size_t> LabeledFeatureSet::class_counts() const {
  std::vector<std::size_t> counts(n_classes_, 0);
  for (auto y : labels_) ++counts[y];
  return counts;
}

std::vector<std::size_t> LabeledFeatureSet::base_row_indices() const {
  std::vector<std::size_t> idx;
  idx.reserve(size());
  if (!groups_) {
    for (std::size_t i = 0; i < size(); ++i) idx.push_back(i);
    return idx;
  }
  std::unordered_map<std::uint32_t, bool> seen;
  for (std::size_t i = 0; i < size(); ++i) {
    if (seen.emplace((*groups_)[i], true).second) idx.push_back(i);
  }
  return idx;
}

LabeledFeatureSet LabeledFeatureSet::base_rows() const {
  if (!groups_) return *this;
  const auto idx = base_row_indices();
  Matrix x(idx.size(), dim());
  std::vector<std::uint32_t> y(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto src = features_.row(idx[r]);
    std::copy(src.begin(), src.end(), x.row(r).begin());
    y[r] = labels_[idx[r]];
  }
  return {std::move(x), std::move(y), n_classes_};
}

LabeledFeatureSet LabeledFeatureSet::leading_dims(std::size_t count) const {
  if (count == 0 || count > dim()) {
    throw ValidationError("leading_dims: count " + std::to_string(count) +
                          " outside [1, " + std::to_string(dim()) + "]");
  }
  Matrix x(size(), count);
  for (std::size_t r = 0; r < size(); ++r) {
    for (std::size_t c = 0; c < count; ++c) x(r, c) = features_(r, c);
  }
  return {std::move(x), labels_, n_classes_, groups_};
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Partial Fisher-Yates: the first `take` entries become a uniform draw without
// replacement from `items`.
template <typename T>
void partial_shuffle(std::vector<T>& items, std::size_t take, Rng& rng) {
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.below(items.size() - i);
    std::swap(items[i], items[j]);
  }
}

}  // namespace

std::uint64_t derive_task_seed(const SeedSpec& spec) noexcept {
  return splitmix64(splitmix64(spec.base_seed) ^ spec.task_index);
}

Episode sample_episode(const LabeledFeatureSet& data, std::size_t way,
                       std::size_t shot, std::size_t query_per_class,
                       std::uint64_t seed) {
  if (way < 2) throw ValidationError("way must be >= 2");
  if (shot < 1) throw ValidationError("shot must be >= 1");
  if (query_per_class < 1) throw ValidationError("query_per_class must be >= 1");
  if (way > data.n_classes()) {
    throw ValidationError("insufficient classes: way " + std::to_string(way) +
                          " > " + std::to_string(data.n_classes()) + " classes");
  }

  // units[c] = rows of each base sample of class c, base row first.
  std::vector<std::vector<std::vector<std::size_t>>> units(data.n_classes());
  if (data.has_groups()) {
    std::unordered_map<std::uint32_t, std::pair<std::uint32_t, std::size_t>> where;
    const auto& groups = *data.groups();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::uint32_t c = data.labels()[i];
      auto it = where.find(groups[i]);
      if (it == where.end()) {
        where.emplace(groups[i], std::make_pair(c, units[c].size()));
        units[c].push_back({i});
      } else {
        units[c][it->second.second].push_back(i);
      }
    }
  } else {
    for (std::size_t i = 0; i < data.size(); ++i) units[data.labels()[i]].push_back({i});
  }

  const std::size_t need = shot + query_per_class;
  Rng rng(seed);
  std::vector<std::uint32_t> classes(data.n_classes());
  for (std::uint32_t c = 0; c < data.n_classes(); ++c) classes[c] = c;
  partial_shuffle(classes, way, rng);
  classes.resize(way);
  for (auto c : classes) {
    if (units[c].size() < need) {
      throw ValidationError("insufficient samples in class " + std::to_string(c) +
                            ": has " + std::to_string(units[c].size()) +
                            " base samples, needs " + std::to_string(need));
    }
  }

  const std::size_t dim = data.dim();
  std::vector<double> train_x, query_x;
  std::vector<std::uint32_t> train_y, query_y, train_g;
  std::uint32_t next_group = 0;
  for (std::uint32_t e = 0; e < way; ++e) {
    std::vector<std::size_t> order(units[classes[e]].size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    partial_shuffle(order, need, rng);
    for (std::size_t j = 0; j < need; ++j) {
      const auto& rows = units[classes[e]][order[j]];
      if (j < shot) {
        for (std::size_t r : rows) {
          const auto src = data.features().row(r);
          train_x.insert(train_x.end(), src.begin(), src.end());
          train_y.push_back(e);
          train_g.push_back(next_group);
        }
        ++next_group;
      } else {
        const auto src = data.features().row(rows.front());
        query_x.insert(query_x.end(), src.begin(), src.end());
        query_y.push_back(e);
      }
    }
  }

  Episode ep;
  ep.way = way;
  ep.shot = shot;
  ep.task_id = seed;
  ep.classes = classes;
  const std::size_t n_train = train_y.size();
  std::optional<std::vector<std::uint32_t>> groups;
  if (data.has_groups()) groups = std::move(train_g);
  ep.train = LabeledFeatureSet(Matrix(n_train, dim, std::move(train_x)), std::move(train_y),
                               static_cast<std::uint32_t>(way), std::move(groups));
  const std::size_t n_query = query_y.size();
  ep.query = LabeledFeatureSet(Matrix(n_query, dim, std::move(query_x)), std::move(query_y),
                               static_cast<std::uint32_t>(way));
  return ep;
}

}  // namespace fsel
