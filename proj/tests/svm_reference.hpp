#ifndef WBTK_TESTS_SVM_REFERENCE_HPP
#define WBTK_TESTS_SVM_REFERENCE_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "wbtk/model.hpp"

// Shared between the unit suite and the acceptance runner: synthetic vector
// builders plus an SGD-independent reference optimizer for the hinge
// objective.

inline wbtk::FeatureVector vec(const std::string& id, wbtk::PolarityLabel label,
                               std::vector<std::pair<std::uint32_t, std::uint32_t>> items) {
  wbtk::FeatureVector v;
  v.sentence_id = id;
  v.label = label;
  v.items = std::move(items);
  return v;
}

// Linearly separable two-word world: positives say word 0, negatives word 1.
inline std::vector<wbtk::FeatureVector> separable(std::size_t n) {
  std::vector<wbtk::FeatureVector> data;
  wbtk::Rng rng(17);
  for (std::size_t i = 0; i < n; ++i) {
    bool pos = i % 2 == 0;
    std::uint32_t count = 1 + static_cast<std::uint32_t>(rng.below(3));
    data.push_back(vec("s" + std::to_string(i),
                       pos ? wbtk::PolarityLabel::Positive : wbtk::PolarityLabel::Negative,
                       {{pos ? 0u : 1u, count}}));
  }
  return data;
}

// Random dense-ish vectors over `dim` features, labels drawn independently of
// the features so the problem is not separable.
inline std::vector<wbtk::FeatureVector> noisy(std::size_t n, std::size_t dim,
                                              std::uint64_t seed) {
  std::vector<wbtk::FeatureVector> data;
  wbtk::Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> items;
    for (std::uint32_t id = 0; id < dim; ++id) {
      std::uint32_t c = static_cast<std::uint32_t>(rng.below(3));
      if (c > 0) items.emplace_back(id, c);
    }
    bool pos = rng.below(2) == 0;
    // Tilt labels toward feature 0 so the optimum is not at the origin.
    if (!items.empty() && items.front().first == 0 && rng.below(3) > 0) pos = true;
    data.push_back(vec("n" + std::to_string(i),
                       pos ? wbtk::PolarityLabel::Positive : wbtk::PolarityLabel::Negative,
                       std::move(items)));
  }
  bool has_pos = false, has_neg = false;
  for (const auto& v : data)
    (v.label == wbtk::PolarityLabel::Positive ? has_pos : has_neg) = true;
  if (!has_pos) data.front().label = wbtk::PolarityLabel::Positive;
  if (!has_neg) data.back().label = wbtk::PolarityLabel::Negative;
  return data;
}

// Golden-section minimization of the objective along a single coordinate.
inline double line_min(std::vector<double>& w, double& bias, std::size_t coord, bool is_bias,
                       const std::vector<wbtk::FeatureVector>& data, double lambda) {
  auto eval_at = [&](double x) {
    double saved = is_bias ? bias : w[coord];
    (is_bias ? bias : w[coord]) = x;
    double f = wbtk::hinge_objective(w, bias, data, lambda);
    (is_bias ? bias : w[coord]) = saved;
    return f;
  };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = -25.0, hi = 25.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = eval_at(x1), f2 = eval_at(x2);
  for (int it = 0; it < 300; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = eval_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = eval_at(x2);
    }
  }
  double best = 0.5 * (lo + hi);
  if (eval_at(best) <= eval_at(is_bias ? bias : w[coord])) {
    (is_bias ? bias : w[coord]) = best;
  }
  return wbtk::hinge_objective(w, bias, data, lambda);
}

// Cyclic coordinate descent from a given start, run to convergence.
inline double coordinate_descent(std::vector<double> w, double bias,
                                 const std::vector<wbtk::FeatureVector>& data, double lambda) {
  double prev = wbtk::hinge_objective(w, bias, data, lambda);
  for (int sweep = 0; sweep < 400; ++sweep) {
    for (std::size_t c = 0; c < w.size(); ++c) line_min(w, bias, c, false, data, lambda);
    double cur = line_min(w, bias, 0, true, data, lambda);
    if (prev - cur < 1e-13) break;
    prev = cur;
  }
  return prev;
}

// Best objective reachable by coordinate descent from a spread of starts,
// including the candidate solution itself.
inline double reference_objective(const std::vector<wbtk::FeatureVector>& data, double lambda,
                                  std::size_t dim, const std::vector<double>& candidate_w,
                                  double candidate_b) {
  double ref = coordinate_descent(std::vector<double>(dim, 0.0), 0.0, data, lambda);
  ref = std::min(ref, coordinate_descent(candidate_w, candidate_b, data, lambda));
  wbtk::Rng rng(31);
  for (int start = 0; start < 3; ++start) {
    std::vector<double> w0(dim);
    for (auto& x : w0) x = (rng.unit() - 0.5) * 4.0;
    double b0 = (rng.unit() - 0.5) * 4.0;
    ref = std::min(ref, coordinate_descent(w0, b0, data, lambda));
  }
  return ref;
}

#endif  // WBTK_TESTS_SVM_REFERENCE_HPP
