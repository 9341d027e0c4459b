#include <catch2/catch_amalgamated.hpp>

#include "wbtk/eval.hpp"

using namespace wbtk;

namespace {

std::vector<PolarityLabel> labels(const std::string& code) {
  std::vector<PolarityLabel> out;
  for (char c : code)
    out.push_back(c == '+' ? PolarityLabel::Positive
                  : c == '-' ? PolarityLabel::Negative
                             : PolarityLabel::Neutral);
  return out;
}

}  // namespace

TEST_CASE("weighted mean reproduces the reference report figure") {
  // Per-class precisions 0.75 and 0.66 with supports 810 and 515 average to
  // 0.715, printed as 0.72 at two decimals.
  double w = weighted_mean({0.75, 0.66}, {810, 515});
  CHECK_THAT(w, Catch::Matchers::WithinAbs((0.75 * 810 + 0.66 * 515) / 1325.0, 1e-12));
  CHECK_THAT(w, Catch::Matchers::WithinAbs(0.715, 0.0005));
  CHECK(format_fixed(w, 2) == "0.72");
}

TEST_CASE("weighted mean validates and degrades to zero on no support") {
  CHECK_THROWS_AS(weighted_mean({0.5}, {1, 2}), ConfigError);
  CHECK(weighted_mean({0.9, 0.1}, {0, 0}) == 0.0);
  CHECK(weighted_mean({}, {}) == 0.0);
  CHECK(weighted_mean({0.3}, {7}) == 0.3);
}

TEST_CASE("precision, recall and F1 come straight from the confusion counts") {
  // gold:      + + + + + -
  // predicted: + + + - - +
  auto r = evaluate(labels("+++++-"), labels("+++--+"));
  CHECK(r.confusion.pos_as_pos == 3);
  CHECK(r.confusion.pos_as_neg == 2);
  CHECK(r.confusion.neg_as_pos == 1);
  CHECK(r.confusion.neg_as_neg == 0);
  CHECK_THAT(r.positive.precision, Catch::Matchers::WithinAbs(0.75, 1e-12));
  CHECK_THAT(r.positive.recall, Catch::Matchers::WithinAbs(0.6, 1e-12));
  CHECK_THAT(r.positive.f1, Catch::Matchers::WithinAbs(2 * 0.75 * 0.6 / 1.35, 1e-12));
  CHECK(r.positive.support == 5);
  CHECK(r.negative.support == 1);
  CHECK(r.weighted.support == 6);
  CHECK_THAT(r.accuracy, Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("perfect predictions score one across the board") {
  auto gold = labels("++--+-");
  auto r = evaluate(gold, gold);
  CHECK(r.positive.precision == 1.0);
  CHECK(r.positive.recall == 1.0);
  CHECK(r.positive.f1 == 1.0);
  CHECK(r.negative.f1 == 1.0);
  CHECK(r.weighted.f1 == 1.0);
  CHECK(r.accuracy == 1.0);
}

TEST_CASE("zero-over-zero metrics stay zero instead of NaN") {
  // Everything predicted negative: positive precision is 0/0.
  auto r = evaluate(labels("++--"), labels("----"));
  CHECK(r.positive.precision == 0.0);
  CHECK(r.positive.recall == 0.0);
  CHECK(r.positive.f1 == 0.0);
  CHECK(r.negative.recall == 1.0);

  CHECK(safe_div(0.0, 0.0) == 0.0);
  CHECK(f1_score(0.0, 0.0) == 0.0);
}

TEST_CASE("evaluation rejects neutral labels and length mismatches") {
  CHECK_THROWS_WITH(evaluate(labels("+0"), labels("++")),
                    Catch::Matchers::ContainsSubstring("neutral"));
  CHECK_THROWS_WITH(evaluate(labels("++"), labels("+0")),
                    Catch::Matchers::ContainsSubstring("neutral"));
  CHECK_THROWS_WITH(evaluate(labels("++"), labels("+")),
                    Catch::Matchers::ContainsSubstring("length"));
}

TEST_CASE("confusion counts sum to the evaluation-set size") {
  auto gold = labels("++-+--+-");
  auto pred = labels("+--+-+++");
  auto c = confusion_of(gold, pred);
  CHECK(c.total() == gold.size());
  CHECK(c.pos_support() == 4);
  CHECK(c.neg_support() == 4);
}

TEST_CASE("weighted metrics sit between the per-class extremes") {
  auto r = evaluate(labels("+++++---"), labels("++++-+--"));
  for (auto pick : {&ClassMetrics::precision, &ClassMetrics::recall, &ClassMetrics::f1}) {
    double lo = std::min(r.positive.*pick, r.negative.*pick);
    double hi = std::max(r.positive.*pick, r.negative.*pick);
    CHECK(r.weighted.*pick >= lo - 1e-12);
    CHECK(r.weighted.*pick <= hi + 1e-12);
  }
}

TEST_CASE("report formatting prints two-decimal metrics with supports") {
  auto r = evaluate(labels("+++++-"), labels("+++--+"));
  auto text = format_eval(r, "test split");
  CHECK(text.rfind("test split\n", 0) == 0);
  CHECK(text.find("P=0.75") != std::string::npos);
  CHECK(text.find("R=0.60") != std::string::npos);
  CHECK(text.find("support=5") != std::string::npos);
  CHECK(text.find("confusion  [pos->pos 3, pos->neg 2, neg->pos 1, neg->neg 0]") !=
        std::string::npos);
}
