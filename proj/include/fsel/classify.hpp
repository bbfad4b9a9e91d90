#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fsel/core.hpp"

namespace fsel {

enum class ClassifierKind { kNcc, kLogistic, kErm01 };

const char* to_string(ClassifierKind kind) noexcept;

// logits(z) = W z + b; prediction is the argmax with ties going to the lowest
// class index. For NCC, W_c = 2 p_c and b_c = -p_c^T p_c.
struct LinearClassifier {
  Matrix weights;             // n_classes x dim
  std::vector<double> bias;   // n_classes
  ClassifierKind kind = ClassifierKind::kNcc;
  std::optional<Matrix> centroids;

  // Optimizer bookkeeping (logistic only).
  std::size_t iterations = 0;
  bool converged = true;

  std::size_t n_classes() const noexcept { return weights.rows(); }
  std::size_t dim() const noexcept { return weights.cols(); }

  std::vector<double> logits(std::span<const double> z) const;
  std::size_t predict(std::span<const double> z) const;
};

LinearClassifier fit_ncc(const LabeledFeatureSet& train);

// Squared-distance argmin over centroids, ties to the lowest class. Used to
// cross-check the linear form.
std::size_t nearest_centroid(const Matrix& centroids, std::span<const double> z);

struct FitConfig {
  // L2 penalty on W (not b). Unset means 1 / (n_samples).
  std::optional<double> l2_lambda;
  std::size_t max_iters = 2000;
  double tolerance = 1e-8;   // on the gradient infinity norm
  std::size_t history = 10;  // L-BFGS memory
};

/// Multinomial logistic regression, objective
///   (1/n) sum_i -log softmax(W z_i + b)_{y_i} + (lambda / 2) ||W||_F^2,
/// minimized by deterministic L-BFGS from a zero start.
/// Throws NumericalError if the objective becomes non-finite.
LinearClassifier fit_logreg(const LabeledFeatureSet& train, const FitConfig& cfg = {});

struct Erm01Fit {
  LinearClassifier classifier;
  std::size_t errors = 0;        // training misclassifications
  double empirical_error = 0.0;  // errors / n
  bool degenerate = false;       // only one class present
};

/// Exact empirical 0-1 minimizer over thresholds in one dimension.
Erm01Fit fit_erm01_1d(const LabeledFeatureSet& train);

/// Exact empirical 0-1 minimizer over affine lines in two dimensions.
Erm01Fit fit_erm01_2d(const LabeledFeatureSet& train);

// Fraction of misclassified rows. Throws on an empty query or a dim mismatch.
double evaluate(const LinearClassifier& clf, const LabeledFeatureSet& query);

std::size_t count_errors(const LinearClassifier& clf, const LabeledFeatureSet& data);

}  // namespace fsel
