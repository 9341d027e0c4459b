#ifndef WBTK_MODEL_HPP
#define WBTK_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "wbtk/features.hpp"
#include "wbtk/util.hpp"

namespace wbtk {

constexpr std::uint32_t kModelVersion = 1;

struct TrainConfig {
  double lambda = 1e-4;
  std::size_t epochs = 20;
  std::uint64_t seed = 1;
};

// Linear max-margin classifier: sign(w.x + b), zero margin reads Positive.
struct LinearModel {
  std::uint32_t version = kModelVersion;
  std::string scheme;
  std::string feature_space_hash;
  double lambda = 1e-4;
  std::size_t epochs = 20;
  std::uint64_t seed = 1;
  std::vector<double> weights;
  double bias = 0.0;

  double margin(const FeatureVector& v) const {
    double m = bias;
    for (const auto& [id, n] : v.items) {
      if (id >= weights.size())
        throw ConfigError("predict: feature id " + std::to_string(id) +
                          " outside model dimension " + std::to_string(weights.size()));
      m += weights[id] * static_cast<double>(n);
    }
    return m;
  }

  PolarityLabel predict(const FeatureVector& v) const {
    return margin(v) >= 0.0 ? PolarityLabel::Positive : PolarityLabel::Negative;
  }
};

namespace detail {

inline int label_sign(PolarityLabel l) {
  if (l == PolarityLabel::Positive) return 1;
  if (l == PolarityLabel::Negative) return -1;
  throw ConfigError("train: neutral examples are excluded upstream");
}

}  // namespace detail

// Regularized hinge objective: lambda/2 * ||w||^2 + mean hinge loss. The bias
// is unregularized.
inline double hinge_objective(const std::vector<double>& w, double bias,
                              const std::vector<FeatureVector>& data, double lambda) {
  if (data.empty()) throw ConfigError("objective: no examples");
  double reg = 0.0;
  for (double x : w) reg += x * x;
  reg *= 0.5 * lambda;
  double loss = 0.0;
  for (const auto& v : data) {
    double m = bias;
    for (const auto& [id, n] : v.items) m += w.at(id) * static_cast<double>(n);
    double h = 1.0 - detail::label_sign(v.label) * m;
    if (h > 0.0) loss += h;
  }
  return reg + loss / static_cast<double>(data.size());
}

// Full-batch subgradient of the objective; the zero branch is taken at the
// hinge kink. Exposed so tests can check it against finite differences.
inline std::pair<std::vector<double>, double> hinge_subgradient(
    const std::vector<double>& w, double bias, const std::vector<FeatureVector>& data,
    double lambda) {
  if (data.empty()) throw ConfigError("subgradient: no examples");
  std::vector<double> gw(w.size(), 0.0);
  double gb = 0.0;
  double inv_n = 1.0 / static_cast<double>(data.size());
  for (const auto& v : data) {
    int y = detail::label_sign(v.label);
    double m = bias;
    for (const auto& [id, n] : v.items) m += w.at(id) * static_cast<double>(n);
    if (y * m < 1.0) {
      for (const auto& [id, n] : v.items) gw[id] -= y * static_cast<double>(n) * inv_n;
      gb -= y * inv_n;
    }
  }
  for (std::size_t i = 0; i < w.size(); ++i) gw[i] += lambda * w[i];
  return {std::move(gw), gb};
}

// Stochastic subgradient descent with the 1/(lambda*t) schedule and a
// deterministic per-epoch shuffle. Single-threaded on purpose: results must
// be bit-identical for a given (data, config) pair.
inline LinearModel train(const std::vector<FeatureVector>& data, std::size_t dim,
                         const TrainConfig& config, const std::string& scheme = "",
                         const std::string& feature_space_hash = "") {
  if (config.lambda <= 0.0) throw ConfigError("train: lambda must be positive");
  if (config.epochs == 0) throw ConfigError("train: epochs must be at least 1");
  bool has_pos = false, has_neg = false;
  for (const auto& v : data) {
    int y = detail::label_sign(v.label);
    (y > 0 ? has_pos : has_neg) = true;
    for (const auto& [id, n] : v.items)
      if (id >= dim)
        throw ConfigError("train: feature id " + std::to_string(id) +
                          " outside dimension " + std::to_string(dim));
  }
  if (!has_pos || !has_neg) throw ConfigError("train: need at least one example per class");

  LinearModel model;
  model.scheme = scheme;
  model.feature_space_hash = feature_space_hash;
  model.lambda = config.lambda;
  model.epochs = config.epochs;
  model.seed = config.seed;
  model.weights.assign(dim, 0.0);
  model.bias = 0.0;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const FeatureVector& v = data[idx];
      int y = detail::label_sign(v.label);
      ++t;
      double eta = 1.0 / (config.lambda * static_cast<double>(t));
      double m = model.bias;
      for (const auto& [id, n] : v.items) m += model.weights[id] * static_cast<double>(n);
      double decay = 1.0 - eta * config.lambda;
      for (double& w : model.weights) w *= decay;
      if (y * m < 1.0) {
        for (const auto& [id, n] : v.items)
          model.weights[id] += eta * y * static_cast<double>(n);
        model.bias += eta * y;
      }
    }
  }
  for (double w : model.weights)
    if (!std::isfinite(w)) throw DataError("train: non-finite weight produced");
  if (!std::isfinite(model.bias)) throw DataError("train: non-finite bias produced");
  return model;
}

inline void save_model(const LinearModel& model, const std::string& path) {
  nlohmann::json j{{"format", "wbtk-model"},
                   {"version", model.version},
                   {"scheme", model.scheme},
                   {"feature_space_hash", model.feature_space_hash},
                   {"lambda", model.lambda},
                   {"epochs", model.epochs},
                   {"seed", model.seed},
                   {"bias", model.bias},
                   {"weights", model.weights}};
  write_file(path, j.dump(2) + "\n");
}

inline LinearModel load_model(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad model file " + path + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "wbtk-model")
      throw DataError("bad model file " + path + ": unexpected format tag");
    LinearModel model;
    model.version = j.at("version").get<std::uint32_t>();
    if (model.version != kModelVersion)
      throw DataError("model version " + std::to_string(model.version) + " unsupported (want " +
                      std::to_string(kModelVersion) + "): " + path);
    model.scheme = j.at("scheme").get<std::string>();
    model.feature_space_hash = j.at("feature_space_hash").get<std::string>();
    model.lambda = j.at("lambda").get<double>();
    model.epochs = j.at("epochs").get<std::size_t>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.bias = j.at("bias").get<double>();
    model.weights = j.at("weights").get<std::vector<double>>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad model file " + path + ": " + e.what());
  }
}

}  // namespace wbtk

#endif  // WBTK_MODEL_HPP
