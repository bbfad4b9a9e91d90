#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace fsel {

// Dense row-major matrix of doubles. Rows are samples, columns are feature
// dimensions.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Feature matrix with class labels and optional augmentation groups.
//
// Rows sharing a group id are views of one underlying sample; the first row of
// a group (in row order) is its base sample. Construction validates:
//   * every label < n_classes and every class has at least one row,
//   * all features finite,
//   * all rows of a group carry the same label.
class LabeledFeatureSet {
 public:
  LabeledFeatureSet() = default;
  LabeledFeatureSet(Matrix features, std::vector<std::uint32_t> labels,
                    std::uint32_t n_classes,
                    std::optional<std::vector<std::uint32_t>> groups = std::nullopt);

  std::size_t size() const noexcept { return features_.rows(); }
  std::size_t dim() const noexcept { return features_.cols(); }
  std::uint32_t n_classes() const noexcept { return n_classes_; }
  bool has_groups() const noexcept { return groups_.has_value(); }

  const Matrix& features() const noexcept { return features_; }
  const std::vector<std::uint32_t>& labels() const noexcept { return labels_; }
  const std::optional<std::vector<std::uint32_t>>& groups() const noexcept {
    return groups_;
  }

  std::vector<std::size_t> class_counts() const;

  // Indices of base rows: every row when ungrouped, else the first row of each
  // group.
  std::vector<std::size_t> base_row_indices() const;

  // Copy restricted to base rows, without groups.
  LabeledFeatureSet base_rows() const;

  // Copy keeping only the leading `count` columns.
  LabeledFeatureSet leading_dims(std::size_t count) const;

  friend bool operator==(const LabeledFeatureSet&, const LabeledFeatureSet&) = default;

 private:
  Matrix features_;
  std::vector<std::uint32_t> labels_;
  std::uint32_t n_classes_ = 0;
  std::optional<std::vector<std::uint32_t>> groups_;
};

// A C-way K-shot task. `classes[c]` is the source label of episode class c.
struct Episode {
  std::size_t way = 0;
  std::size_t shot = 0;
  LabeledFeatureSet train;
  LabeledFeatureSet query;
  std::uint64_t task_id = 0;
  std::vector<std::uint32_t> classes;
};

struct SeedSpec {
  std::uint64_t base_seed = 0;
  std::uint64_t task_index = 0;
};

// SplitMix64-based mix of (base_seed, task_index); a bijection in task_index for
// a fixed base seed.
std::uint64_t derive_task_seed(const SeedSpec& spec) noexcept;

inline constexpr std::size_t kDefaultQueryPerClass = 15;

// Draws `way` classes, then `shot + query_per_class` base samples per class
// without replacement. Views of a drawn base sample follow it into the train
// split; the query split receives base rows only.
Episode sample_episode(const LabeledFeatureSet& data, std::size_t way,
                       std::size_t shot, std::size_t query_per_class,
                       std::uint64_t seed);

}  // namespace fsel
