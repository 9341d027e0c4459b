#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "svm_reference.hpp"
#include "wbtk/eval.hpp"
#include "wbtk/model.hpp"

using namespace wbtk;

namespace {

std::string temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "wbtk_test_model";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_CASE("training separates a separable corpus perfectly") {
  auto data = separable(500);
  TrainConfig cfg;
  cfg.lambda = 1e-3;
  cfg.epochs = 30;
  auto model = train(data, 2, cfg);
  std::vector<PolarityLabel> gold, pred;
  for (const auto& v : data) {
    gold.push_back(v.label);
    pred.push_back(model.predict(v));
  }
  auto result = evaluate(gold, pred);
  CHECK(result.weighted.f1 == 1.0);
  CHECK(result.accuracy == 1.0);
}

TEST_CASE("stochastic training reaches the coordinate-descent optimum") {
  auto data = noisy(20, 4, 99);
  const double lambda = 0.2;
  TrainConfig cfg;
  cfg.lambda = lambda;
  cfg.epochs = 3000;
  cfg.seed = 5;
  auto model = train(data, 4, cfg);
  double sgd_obj = hinge_objective(model.weights, model.bias, data, lambda);

  // Reference: exhaustive coordinate descent from several starts, keeping
  // the lowest objective reached.
  double ref = reference_objective(data, lambda, 4, model.weights, model.bias);

  INFO("sgd objective " << sgd_obj << ", reference " << ref);
  CHECK(sgd_obj <= ref * 1.01);
  CHECK(sgd_obj >= ref - 1e-9);  // nothing beats the reference minimum
}

TEST_CASE("analytic subgradient matches finite differences away from kinks") {
  const double lambda = 0.05;
  const double eps = 1e-6;
  Rng rng(1234);
  int accepted = 0;
  int attempts = 0;
  while (accepted < 50) {
    REQUIRE(++attempts < 4000);
    auto data = noisy(8, 3, rng.next());
    std::vector<double> w(3);
    for (auto& x : w) x = (rng.unit() - 0.5) * 2.0;
    double bias = (rng.unit() - 0.5) * 2.0;

    // Stay clear of the hinge kink so the objective is differentiable here.
    bool near_kink = false;
    for (const auto& v : data) {
      double m = bias;
      for (const auto& [id, n] : v.items) m += w[id] * n;
      int y = v.label == PolarityLabel::Positive ? 1 : -1;
      if (std::abs(y * m - 1.0) < 1e-3) near_kink = true;
    }
    if (near_kink) continue;

    auto [gw, gb] = hinge_subgradient(w, bias, data, lambda);
    for (std::size_t c = 0; c < w.size(); ++c) {
      std::vector<double> wp = w, wm = w;
      wp[c] += eps;
      wm[c] -= eps;
      double fd = (hinge_objective(wp, bias, data, lambda) -
                   hinge_objective(wm, bias, data, lambda)) /
                  (2 * eps);
      double scale = std::max({1.0, std::abs(fd), std::abs(gw[c])});
      CAPTURE(accepted, c);
      CHECK(std::abs(gw[c] - fd) / scale < 1e-4);
    }
    double fdb = (hinge_objective(w, bias + eps, data, lambda) -
                  hinge_objective(w, bias - eps, data, lambda)) /
                 (2 * eps);
    double scale = std::max({1.0, std::abs(fdb), std::abs(gb)});
    CHECK(std::abs(gb - fdb) / scale < 1e-4);
    ++accepted;
  }
}

TEST_CASE("scaling counts and lambda together preserves predictions") {
  auto data = separable(60);
  TrainConfig cfg;
  cfg.lambda = 0.01;
  cfg.epochs = 40;
  auto base = train(data, 2, cfg);

  // Counts scaled by c pair with lambda scaled by c^2: w -> w/c preserves the
  // objective, so the decision function is unchanged.
  const std::uint32_t c = 3;
  auto scaled = data;
  for (auto& v : scaled)
    for (auto& [id, n] : v.items) n *= c;
  TrainConfig cfg2 = cfg;
  cfg2.lambda = cfg.lambda * (c * c);
  auto rescaled = train(scaled, 2, cfg2);

  for (std::size_t i = 0; i < data.size(); ++i) {
    CAPTURE(i);
    CHECK(base.predict(data[i]) == rescaled.predict(scaled[i]));
  }
}

TEST_CASE("training is bit-for-bit deterministic in its seed") {
  auto data = noisy(30, 5, 7);
  TrainConfig cfg;
  cfg.lambda = 0.01;
  cfg.epochs = 10;
  cfg.seed = 42;
  auto a = train(data, 5, cfg);
  auto b = train(data, 5, cfg);
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);

  cfg.seed = 43;
  auto other = train(data, 5, cfg);
  CHECK(a.weights != other.weights);
}

TEST_CASE("margins are plain dot products plus bias") {
  LinearModel model;
  model.weights = {0.5, -0.25};
  model.bias = 0.1;
  auto v = vec("x", PolarityLabel::Positive, {{0, 2}, {1, 4}});
  CHECK_THAT(model.margin(v), Catch::Matchers::WithinAbs(0.1, 1e-12));
  CHECK(model.predict(v) == PolarityLabel::Positive);

  auto out_of_range = vec("y", PolarityLabel::Positive, {{7, 1}});
  CHECK_THROWS_AS(model.margin(out_of_range), ConfigError);
}

TEST_CASE("empty vectors ride on the bias alone") {
  LinearModel model;
  model.weights = {1.0, 1.0};
  auto empty = vec("e", PolarityLabel::Positive, {});

  model.bias = 0.5;
  CHECK(model.predict(empty) == PolarityLabel::Positive);
  model.bias = -0.5;
  CHECK(model.predict(empty) == PolarityLabel::Negative);
  model.bias = 0.0;
  CHECK(model.predict(empty) == PolarityLabel::Positive);  // zero margin reads positive
}

TEST_CASE("objective never ends above the zero model") {
  auto data = noisy(40, 4, 3);
  TrainConfig cfg;
  cfg.lambda = 0.05;
  cfg.epochs = 20;
  auto model = train(data, 4, cfg);
  double zero_obj = hinge_objective(std::vector<double>(4, 0.0), 0.0, data, cfg.lambda);
  double trained_obj = hinge_objective(model.weights, model.bias, data, cfg.lambda);
  CHECK(trained_obj <= zero_obj + 1e-9);

  TrainConfig one = cfg;
  one.epochs = 1;
  auto brief = train(data, 4, one);
  double brief_obj = hinge_objective(brief.weights, brief.bias, data, cfg.lambda);
  CHECK(trained_obj <= brief_obj + 1e-6);
}

TEST_CASE("models round-trip through their file format") {
  auto data = separable(40);
  TrainConfig cfg;
  cfg.lambda = 0.02;
  cfg.epochs = 15;
  cfg.seed = 9;
  auto model = train(data, 2, cfg, "Unigram", "fnv1a64:deadbeef00000000");
  std::string path = temp_path("model.json");
  save_model(model, path);
  auto loaded = load_model(path);
  CHECK(loaded.version == model.version);
  CHECK(loaded.scheme == "Unigram");
  CHECK(loaded.feature_space_hash == model.feature_space_hash);
  CHECK(loaded.lambda == model.lambda);
  CHECK(loaded.epochs == model.epochs);
  CHECK(loaded.seed == model.seed);
  CHECK(loaded.weights == model.weights);  // exact doubles via the JSON round-trip
  CHECK(loaded.bias == model.bias);
}

TEST_CASE("model loading rejects foreign or damaged files") {
  std::string path = temp_path("bad.json");

  SECTION("wrong format tag") {
    write_file(path, R"({"format":"other","version":1})");
    CHECK_THROWS_WITH(load_model(path), Catch::Matchers::ContainsSubstring("format"));
  }
  SECTION("unsupported version") {
    write_file(path,
               R"({"format":"wbtk-model","version":2,"scheme":"","feature_space_hash":"",)"
               R"("lambda":0.1,"epochs":1,"seed":1,"bias":0,"weights":[]})");
    CHECK_THROWS_WITH(load_model(path), Catch::Matchers::ContainsSubstring("version"));
  }
  SECTION("truncated file") {
    write_file(path, R"({"format":"wbtk-model","ver)");
    CHECK_THROWS_AS(load_model(path), DataError);
  }
  SECTION("missing weights") {
    write_file(path,
               R"({"format":"wbtk-model","version":1,"scheme":"","feature_space_hash":"",)"
               R"("lambda":0.1,"epochs":1,"seed":1,"bias":0})");
    CHECK_THROWS_AS(load_model(path), DataError);
  }
}

TEST_CASE("training validates its configuration and data") {
  auto data = separable(10);
  TrainConfig cfg;

  cfg.lambda = 0.0;
  CHECK_THROWS_WITH(train(data, 2, cfg), Catch::Matchers::ContainsSubstring("lambda"));

  cfg.lambda = 0.1;
  cfg.epochs = 0;
  CHECK_THROWS_WITH(train(data, 2, cfg), Catch::Matchers::ContainsSubstring("epochs"));

  cfg.epochs = 5;
  std::vector<FeatureVector> one_class = {vec("a", PolarityLabel::Positive, {{0, 1}})};
  CHECK_THROWS_WITH(train(one_class, 2, cfg),
                    Catch::Matchers::ContainsSubstring("per class"));

  std::vector<FeatureVector> neutral = {vec("a", PolarityLabel::Neutral, {{0, 1}})};
  CHECK_THROWS_AS(train(neutral, 2, cfg), ConfigError);

  CHECK_THROWS_WITH(train(data, 1, cfg), Catch::Matchers::ContainsSubstring("dimension"));

  CHECK_THROWS_AS(hinge_objective({}, 0.0, {}, 0.1), ConfigError);
  CHECK_THROWS_AS(hinge_subgradient({}, 0.0, {}, 0.1), ConfigError);
}
