// Exact empirical 0-1 risk minimization for binary linear rules in one and two
// dimensions.
//
// Every labeling a line can induce on a finite point set is also induced by a
// line through two of the points, once the points lying on that line are
// assigned by an infinitesimal rotation (prefix/suffix along the line) or an
// infinitesimal parallel shift (all to one side). The 2-D solver enumerates
// those lines with an angular sweep around every anchor point.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fsel/classify.hpp"
#include "fsel/error.hpp"

namespace fsel {
namespace {

// Binary rule "predict class 1 iff w.z + c > 0" as a two-row LinearClassifier.
LinearClassifier binary_rule(std::span<const double> w, double c) {
  LinearClassifier clf;
  clf.kind = ClassifierKind::kErm01;
  clf.weights = Matrix(2, w.size());
  for (std::size_t k = 0; k < w.size(); ++k) clf.weights(1, k) = w[k];
  clf.bias = {0.0, c};
  return clf;
}

void check_binary(const LabeledFeatureSet& train, std::size_t dim, const char* name) {
  if (train.dim() != dim) {
    throw ValidationError(std::string(name) + ": expected " + std::to_string(dim) +
                          "-dimensional features, got " + std::to_string(train.dim()));
  }
  if (train.n_classes() > 2) {
    throw ValidationError(std::string(name) + ": binary data required");
  }
  if (train.size() < 2) throw ValidationError(std::string(name) + ": needs n >= 2");
}

Erm01Fit degenerate_fit(const LabeledFeatureSet& train) {
  Erm01Fit fit;
  const std::vector<double> zero(train.dim(), 0.0);
  // A single class: always predict it (label 0 is the only label).
  fit.classifier = binary_rule(zero, -1.0);
  fit.errors = 0;
  fit.empirical_error = 0.0;
  fit.degenerate = true;
  return fit;
}

}  // namespace

Erm01Fit fit_erm01_1d(const LabeledFeatureSet& train) {
  check_binary(train, 1, "fit_erm01_1d");
  if (train.n_classes() < 2) return degenerate_fit(train);

  const std::size_t n = train.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& x = train.features().data();
  const auto& y = train.labels();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  std::size_t total1 = 0;
  for (auto label : y) total1 += label;
  const std::size_t total0 = n - total1;

  // Threshold t splits the sorted values into left (<= t) and right (> t).
  // Orientation +: right -> class 1. Orientation -: left -> class 1.
  std::size_t best_errors = std::numeric_limits<std::size_t>::max();
  double best_t = 0.0;
  bool best_plus = true;
  std::size_t left0 = 0, left1 = 0;
  auto consider = [&](double t) {
    const std::size_t plus = left1 + (total0 - left0);
    const std::size_t minus = left0 + (total1 - left1);
    if (plus < best_errors) {
      best_errors = plus;
      best_t = t;
      best_plus = true;
    }
    if (minus < best_errors) {
      best_errors = minus;
      best_t = t;
      best_plus = false;
    }
  };

  consider(x[order.front()] - 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    (y[order[i]] == 0 ? left0 : left1) += 1;
    const bool last = i + 1 == n;
    if (!last && x[order[i + 1]] == x[order[i]]) continue;
    const double t = last ? x[order[i]] + 1.0 : 0.5 * (x[order[i]] + x[order[i + 1]]);
    consider(t);
  }

  Erm01Fit fit;
  const double w = best_plus ? 1.0 : -1.0;
  fit.classifier = binary_rule(std::array<double, 1>{w}, -w * best_t);
  fit.errors = best_errors;
  fit.empirical_error = static_cast<double>(best_errors) / static_cast<double>(n);
  return fit;
}

namespace {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Points on a candidate line, with their coordinate along the line direction.
struct OnLine {
  double t;
  std::uint32_t label;
};

struct OnLineChoice {
  std::size_t errors = 0;
  double split = 0.0;       // position of the rotation point along the line
  bool all_same = true;     // parallel shift instead of rotation
  std::uint32_t all_label = 0;
  std::uint32_t suffix_label = 1;  // label of points with t > split
};

// Best assignment of on-line points: prefix -> A, suffix -> B along the line.
OnLineChoice best_on_line(std::vector<OnLine>& pts) {
  std::sort(pts.begin(), pts.end(),
            [](const OnLine& a, const OnLine& b) { return a.t < b.t; });
  std::size_t total[2] = {0, 0};
  for (const auto& p : pts) ++total[p.label];

  OnLineChoice best;
  // All on one side.
  best.errors = total[1];
  best.all_same = true;
  best.all_label = 0;
  if (total[0] < best.errors) {
    best.errors = total[0];
    best.all_label = 1;
  }
  std::size_t prefix[2] = {0, 0};
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    ++prefix[pts[i].label];
    if (pts[i + 1].t == pts[i].t) continue;
    const double split = 0.5 * (pts[i].t + pts[i + 1].t);
    // prefix -> 0, suffix -> 1
    const std::size_t e01 = prefix[1] + (total[0] - prefix[0]);
    // prefix -> 1, suffix -> 0
    const std::size_t e10 = prefix[0] + (total[1] - prefix[1]);
    if (e01 < best.errors) {
      best = {e01, split, false, 0, 1};
    }
    if (e10 < best.errors) {
      best = {e10, split, false, 0, 0};
    }
  }
  return best;
}

struct Candidate {
  std::size_t errors = std::numeric_limits<std::size_t>::max();
  bool constant = true;
  std::uint32_t constant_label = 0;
  std::size_t anchor = 0;
  Vec2 direction;
  bool left_is_one = true;
  OnLineChoice on_line;
};

}  // namespace

Erm01Fit fit_erm01_2d(const LabeledFeatureSet& train) {
  check_binary(train, 2, "fit_erm01_2d");
  if (train.n_classes() < 2) return degenerate_fit(train);

  const std::size_t n = train.size();
  const auto& y = train.labels();
  std::vector<Vec2> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = {train.features()(i, 0), train.features()(i, 1)};

  std::size_t total[2] = {0, 0};
  for (auto label : y) ++total[label];

  Candidate best;
  best.errors = total[1];
  best.constant_label = 0;
  if (total[0] < best.errors) {
    best.errors = total[0];
    best.constant_label = 1;
  }

  struct Item {
    std::size_t index;
    Vec2 u;         // direction folded into the upper half-plane
    double angle;   // atan2 of u, in [0, pi)
    bool forward;   // p_j - p_anchor points along u
  };
  std::vector<Item> items;
  std::vector<std::size_t> same;
  std::vector<OnLine> on_line;
  items.reserve(n);

  for (std::size_t anchor = 0; anchor < n; ++anchor) {
    items.clear();
    same.clear();
    std::size_t left[2] = {0, 0};
    std::size_t right[2] = {0, 0};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == anchor) continue;
      const Vec2 v{p[j].x - p[anchor].x, p[j].y - p[anchor].y};
      if (v.x == 0.0 && v.y == 0.0) {
        same.push_back(j);
        continue;
      }
      const bool forward = v.y > 0.0 || (v.y == 0.0 && v.x > 0.0);
      const Vec2 u = forward ? v : Vec2{-v.x, -v.y};
      double angle = std::atan2(u.y, u.x);
      if (angle >= M_PI) angle = 0.0;  // (-x, +0) folds onto angle 0
      items.push_back({j, u, angle, forward});
      // Just before direction angle 0, forward points lie on the left.
      (forward ? left : right)[y[j]] += 1;
    }
    std::stable_sort(items.begin(), items.end(),
                     [](const Item& a, const Item& b) { return a.angle < b.angle; });

    std::size_t g = 0;
    while (g < items.size()) {
      std::size_t end = g + 1;
      while (end < items.size() &&
             (items[end].angle == items[g].angle || cross(items[g].u, items[end].u) == 0.0)) {
        ++end;
      }
      for (std::size_t k = g; k < end; ++k) {
        (items[k].forward ? left : right)[y[items[k].index]] -= 1;
      }

      const Vec2 u = items[g].u;
      const double norm = std::hypot(u.x, u.y);
      const Vec2 unit{u.x / norm, u.y / norm};
      on_line.clear();
      on_line.push_back({0.0, y[anchor]});
      for (std::size_t j : same) on_line.push_back({0.0, y[j]});
      for (std::size_t k = g; k < end; ++k) {
        const std::size_t j = items[k].index;
        const Vec2 v{p[j].x - p[anchor].x, p[j].y - p[anchor].y};
        on_line.push_back({dot(v, unit), y[j]});
      }
      const OnLineChoice choice = best_on_line(on_line);
      const std::size_t off_one = left[0] + right[1];  // left -> 1
      const std::size_t off_zero = left[1] + right[0];  // left -> 0
      const bool left_is_one = off_one <= off_zero;
      const std::size_t errors = std::min(off_one, off_zero) + choice.errors;
      if (errors < best.errors) {
        best.errors = errors;
        best.constant = false;
        best.anchor = anchor;
        best.direction = unit;
        best.left_is_one = left_is_one;
        best.on_line = choice;
      }

      for (std::size_t k = g; k < end; ++k) {
        (items[k].forward ? right : left)[y[items[k].index]] += 1;
      }
      g = end;
    }
  }

  Erm01Fit fit;
  fit.errors = best.errors;
  fit.empirical_error = static_cast<double>(best.errors) / static_cast<double>(n);
  if (best.constant) {
    const std::array<double, 2> zero{0.0, 0.0};
    fit.classifier = binary_rule(zero, best.constant_label == 1 ? 1.0 : -1.0);
    return fit;
  }

  // Realize the candidate as a concrete rule. The unperturbed rule is
  // sign(normal . (z - anchor)) with normal pointing to the left side.
  const Vec2 dir = best.direction;
  const Vec2 a = p[best.anchor];
  Vec2 normal{-dir.y, dir.x};
  if (!best.left_is_one) normal = {-normal.x, -normal.y};

  // Off-line clearance along the normal, and along/normal ratios about q.
  const OnLineChoice& ol = best.on_line;
  const Vec2 q = ol.all_same ? a : Vec2{a.x + ol.split * dir.x, a.y + ol.split * dir.y};
  double min_gap = std::numeric_limits<double>::infinity();
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2 v{p[j].x - q.x, p[j].y - q.y};
    const double h = std::abs(dot(normal, v));
    const double along = std::abs(dot(dir, v));
    // Points on the line have h == 0 up to rounding; skip them.
    const Vec2 va{p[j].x - a.x, p[j].y - a.y};
    if (cross(dir, va) == 0.0 || h <= 1e-12 * (std::abs(v.x) + std::abs(v.y))) continue;
    min_gap = std::min(min_gap, h);
    if (along > 0.0) min_ratio = std::min(min_ratio, h / along);
  }
  if (!std::isfinite(min_gap)) min_gap = 1.0;
  if (!std::isfinite(min_ratio)) min_ratio = 1.0;

  double shrink = 0.5;
  for (int attempt = 0; attempt < 30; ++attempt, shrink *= 0.125) {
    Vec2 w = normal;
    double c;
    if (ol.all_same) {
      const double delta = shrink * min_gap * (ol.all_label == 1 ? 1.0 : -1.0);
      c = -dot(w, q) + delta;
    } else {
      const double kappa = std::min(1.0, shrink * min_ratio) * (ol.suffix_label == 1 ? 1.0 : -1.0);
      w = {w.x + kappa * dir.x, w.y + kappa * dir.y};
      c = -dot(w, q);
    }
    fit.classifier = binary_rule(std::array<double, 2>{w.x, w.y}, c);
    if (count_errors(fit.classifier, train) == best.errors) return fit;
  }
  // Rounding kept the perturbation from reproducing the labeling; report the
  // realized error of the rule we return.
  fit.errors = count_errors(fit.classifier, train);
  fit.empirical_error = static_cast<double>(fit.errors) / static_cast<double>(n);
  return fit;
}

}  // namespace fsel
