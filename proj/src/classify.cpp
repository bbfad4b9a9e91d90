#include "fsel/classify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "fsel/error.hpp"

namespace fsel {

const char* to_string(ClassifierKind kind) noexcept {
  switch (kind) {
    case ClassifierKind::kNcc: return "ncc";
    case ClassifierKind::kLogistic: return "logreg";
    case ClassifierKind::kErm01: return "erm01";
  }
  return "unknown";
}

std::vector<double> LinearClassifier::logits(std::span<const double> z) const {
  if (z.size() != dim()) {
    throw ValidationError("classifier dim " + std::to_string(dim()) +
                          " does not match input dim " + std::to_string(z.size()));
  }
  std::vector<double> out(n_classes());
  for (std::size_t c = 0; c < n_classes(); ++c) {
    const auto w = weights.row(c);
    double acc = bias[c];
    for (std::size_t k = 0; k < z.size(); ++k) acc += w[k] * z[k];
    out[c] = acc;
  }
  return out;
}

std::size_t LinearClassifier::predict(std::span<const double> z) const {
  const auto l = logits(z);
  std::size_t best = 0;
  for (std::size_t c = 1; c < l.size(); ++c) {
    if (l[c] > l[best]) best = c;
  }
  return best;
}

LinearClassifier fit_ncc(const LabeledFeatureSet& train) {
  const std::size_t n_classes = train.n_classes();
  const std::size_t dim = train.dim();
  const auto counts = train.class_counts();
  Matrix centroids(n_classes, dim);
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto p = centroids.row(train.labels()[i]);
    const auto x = train.features().row(i);
    for (std::size_t k = 0; k < dim; ++k) p[k] += x[k];
  }
  LinearClassifier clf;
  clf.kind = ClassifierKind::kNcc;
  clf.weights = Matrix(n_classes, dim);
  clf.bias.assign(n_classes, 0.0);
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (counts[c] == 0) throw ValidationError("fit_ncc: class " + std::to_string(c) + " is empty");
    auto p = centroids.row(c);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      p[k] /= static_cast<double>(counts[c]);
      clf.weights(c, k) = 2.0 * p[k];
      norm2 += p[k] * p[k];
    }
    clf.bias[c] = -norm2;
  }
  clf.centroids = std::move(centroids);
  return clf;
}

std::size_t nearest_centroid(const Matrix& centroids, std::span<const double> z) {
  std::size_t best = 0;
  double best_d = 0.0;
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const auto p = centroids.row(c);
    double d = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
      const double diff = z[k] - p[k];
      d += diff * diff;
    }
    if (c == 0 || d < best_d) {
      best = c;
      best_d = d;
    }
  }
  return best;
}

namespace {

// Parameters are packed as [W row-major (C x d), b (C)].
class SoftmaxObjective {
 public:
  SoftmaxObjective(const LabeledFeatureSet& data, double lambda)
      : data_(data),
        classes_(data.n_classes()),
        dim_(data.dim()),
        lambda_(lambda),
        logits_(classes_) {}

  std::size_t size() const { return classes_ * dim_ + classes_; }

  double evaluate(const std::vector<double>& theta, std::vector<double>& grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    const double* w = theta.data();
    const double* b = theta.data() + classes_ * dim_;
    double* gw = grad.data();
    double* gb = grad.data() + classes_ * dim_;
    const std::size_t n = data_.size();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = data_.features().row(i);
      const std::size_t y = data_.labels()[i];
      double top = -INFINITY;
      for (std::size_t c = 0; c < classes_; ++c) {
        double acc = b[c];
        const double* wc = w + c * dim_;
        for (std::size_t k = 0; k < dim_; ++k) acc += wc[k] * x[k];
        logits_[c] = acc;
        top = std::max(top, acc);
      }
      double z = 0.0;
      for (std::size_t c = 0; c < classes_; ++c) {
        logits_[c] = std::exp(logits_[c] - top);
        z += logits_[c];
      }
      loss += std::log(z) + top - (std::log(logits_[y]) + top);
      for (std::size_t c = 0; c < classes_; ++c) {
        const double r = logits_[c] / z - (c == y ? 1.0 : 0.0);
        gb[c] += r;
        double* gwc = gw + c * dim_;
        for (std::size_t k = 0; k < dim_; ++k) gwc[k] += r * x[k];
      }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    loss *= inv_n;
    double penalty = 0.0;
    for (std::size_t j = 0; j < classes_ * dim_; ++j) {
      gw[j] = gw[j] * inv_n + lambda_ * w[j];
      penalty += w[j] * w[j];
    }
    for (std::size_t c = 0; c < classes_; ++c) gb[c] *= inv_n;
    return loss + 0.5 * lambda_ * penalty;
  }

 private:
  const LabeledFeatureSet& data_;
  std::size_t classes_;
  std::size_t dim_;
  double lambda_;
  std::vector<double> logits_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct Correction {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

}  // namespace

LinearClassifier fit_logreg(const LabeledFeatureSet& train, const FitConfig& cfg) {
  if (train.n_classes() < 2) throw ValidationError("fit_logreg needs >= 2 classes");
  if (!(cfg.tolerance > 0.0)) throw ValidationError("fit_logreg: tolerance must be > 0");
  const double lambda =
      cfg.l2_lambda.value_or(1.0 / static_cast<double>(train.size()));
  if (!(lambda >= 0.0)) throw ValidationError("fit_logreg: lambda must be >= 0");

  SoftmaxObjective objective(train, lambda);
  const std::size_t n = objective.size();
  std::vector<double> theta(n, 0.0), grad(n), next(n), next_grad(n), dir(n);
  double f = objective.evaluate(theta, grad);

  std::deque<Correction> history;
  std::vector<double> alpha(cfg.history);
  std::size_t iter = 0;
  bool converged = inf_norm(grad) <= cfg.tolerance;
  while (!converged && iter < cfg.max_iters) {
    ++iter;
    // Two-loop recursion.
    for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];
    for (std::size_t h = history.size(); h-- > 0;) {
      alpha[h] = history[h].rho * dot(history[h].s, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha[h] * history[h].y[i];
    }
    double gamma;
    if (history.empty()) {
      gamma = 1.0 / std::max(1.0, std::sqrt(dot(grad, grad)));
    } else {
      const auto& last = history.back();
      gamma = dot(last.s, last.y) / dot(last.y, last.y);
    }
    for (double& d : dir) d *= gamma;
    for (std::size_t h = 0; h < history.size(); ++h) {
      const double beta = history[h].rho * dot(history[h].y, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] += (alpha[h] - beta) * history[h].s[i];
    }
    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      history.clear();
      gamma = 1.0 / std::max(1.0, std::sqrt(dot(grad, grad)));
      for (std::size_t i = 0; i < n; ++i) dir[i] = -gamma * grad[i];
      slope = dot(grad, dir);
    }

    // Backtracking Armijo line search.
    double step = 1.0;
    double f_next = 0.0;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t i = 0; i < n; ++i) next[i] = theta[i] + step * dir[i];
      f_next = objective.evaluate(next, next_grad);
      if (!std::isfinite(f_next)) {
        throw NumericalError("fit_logreg: non-finite loss at iteration " +
                             std::to_string(iter));
      }
      if (f_next <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no further decrease representable

    Correction corr{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      corr.s[i] = next[i] - theta[i];
      corr.y[i] = next_grad[i] - grad[i];
    }
    const double sy = dot(corr.s, corr.y);
    theta.swap(next);
    grad.swap(next_grad);
    f = f_next;
    if (sy > 1e-16 * dot(corr.y, corr.y) && sy > 0.0) {
      corr.rho = 1.0 / sy;
      history.push_back(std::move(corr));
      if (history.size() > cfg.history) history.pop_front();
    }
    converged = inf_norm(grad) <= cfg.tolerance;
  }

  const std::size_t classes = train.n_classes();
  const std::size_t dim = train.dim();
  LinearClassifier clf;
  clf.kind = ClassifierKind::kLogistic;
  clf.weights = Matrix(classes, dim,
                       std::vector<double>(theta.begin(), theta.begin() + classes * dim));
  clf.bias.assign(theta.begin() + classes * dim, theta.end());
  clf.iterations = iter;
  clf.converged = converged;
  return clf;
}

std::size_t count_errors(const LinearClassifier& clf, const LabeledFeatureSet& data) {
  if (clf.dim() != data.dim()) {
    throw ValidationError("classifier dim " + std::to_string(clf.dim()) +
                          " does not match data dim " + std::to_string(data.dim()));
  }
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (clf.predict(data.features().row(i)) != data.labels()[i]) ++wrong;
  }
  return wrong;
}

double evaluate(const LinearClassifier& clf, const LabeledFeatureSet& query) {
  if (query.size() == 0) throw ValidationError("evaluate: empty query set");
  return static_cast<double>(count_errors(clf, query)) / static_cast<double>(query.size());
}

}  // namespace fsel
