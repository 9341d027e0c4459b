#ifndef WBTK_EVAL_HPP
#define WBTK_EVAL_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "wbtk/corpus.hpp"
#include "wbtk/util.hpp"

namespace wbtk {

// 2x2 confusion counts for the Positive/Negative task. "Positive" is the
// target class of the first row/column by convention.
struct Confusion {
  std::size_t pos_as_pos = 0;
  std::size_t pos_as_neg = 0;
  std::size_t neg_as_pos = 0;
  std::size_t neg_as_neg = 0;

  std::size_t pos_support() const { return pos_as_pos + pos_as_neg; }
  std::size_t neg_support() const { return neg_as_pos + neg_as_neg; }
  std::size_t total() const { return pos_support() + neg_support(); }
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalResult {
  Confusion confusion;
  ClassMetrics positive;
  ClassMetrics negative;
  ClassMetrics weighted;  // support-weighted average; support = total
  double accuracy = 0.0;
};

// 0/0 ratios are defined as 0 so empty predictions or empty classes do not
// produce NaNs.
inline double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline double f1_score(double precision, double recall) {
  return safe_div(2.0 * precision * recall, precision + recall);
}

// Support-weighted mean; values and supports must be parallel.
inline double weighted_mean(const std::vector<double>& values,
                            const std::vector<std::size_t>& supports) {
  if (values.size() != supports.size())
    throw ConfigError("weighted_mean: values and supports differ in length");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num += values[i] * static_cast<double>(supports[i]);
    den += static_cast<double>(supports[i]);
  }
  return safe_div(num, den);
}

inline Confusion confusion_of(const std::vector<PolarityLabel>& gold,
                              const std::vector<PolarityLabel>& predicted) {
  if (gold.size() != predicted.size())
    throw ConfigError("evaluate: gold and predicted differ in length");
  Confusion c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == PolarityLabel::Neutral || predicted[i] == PolarityLabel::Neutral)
      throw ConfigError("evaluate: neutral labels are excluded from evaluation");
    bool g = gold[i] == PolarityLabel::Positive;
    bool p = predicted[i] == PolarityLabel::Positive;
    if (g && p) ++c.pos_as_pos;
    else if (g && !p) ++c.pos_as_neg;
    else if (!g && p) ++c.neg_as_pos;
    else ++c.neg_as_neg;
  }
  return c;
}

inline EvalResult evaluate(const Confusion& c) {
  EvalResult r;
  r.confusion = c;
  r.positive.support = c.pos_support();
  r.negative.support = c.neg_support();
  r.positive.precision = safe_div(static_cast<double>(c.pos_as_pos),
                                  static_cast<double>(c.pos_as_pos + c.neg_as_pos));
  r.positive.recall = safe_div(static_cast<double>(c.pos_as_pos),
                               static_cast<double>(c.pos_support()));
  r.positive.f1 = f1_score(r.positive.precision, r.positive.recall);
  r.negative.precision = safe_div(static_cast<double>(c.neg_as_neg),
                                  static_cast<double>(c.neg_as_neg + c.pos_as_neg));
  r.negative.recall = safe_div(static_cast<double>(c.neg_as_neg),
                               static_cast<double>(c.neg_support()));
  r.negative.f1 = f1_score(r.negative.precision, r.negative.recall);
  std::vector<std::size_t> supports = {r.positive.support, r.negative.support};
  r.weighted.support = c.total();
  r.weighted.precision = weighted_mean({r.positive.precision, r.negative.precision}, supports);
  r.weighted.recall = weighted_mean({r.positive.recall, r.negative.recall}, supports);
  r.weighted.f1 = weighted_mean({r.positive.f1, r.negative.f1}, supports);
  r.accuracy = safe_div(static_cast<double>(c.pos_as_pos + c.neg_as_neg),
                        static_cast<double>(c.total()));
  return r;
}

inline EvalResult evaluate(const std::vector<PolarityLabel>& gold,
                           const std::vector<PolarityLabel>& predicted) {
  return evaluate(confusion_of(gold, predicted));
}

// Fixed-width report block, metrics rendered to two decimals.
inline std::string format_eval(const EvalResult& r, const std::string& title) {
  std::ostringstream out;
  auto row = [&](const std::string& name, const ClassMetrics& m) {
    out << "  " << name;
    for (std::size_t i = name.size(); i < 10; ++i) out << ' ';
    out << " P=" << format_fixed(m.precision, 2) << " R=" << format_fixed(m.recall, 2)
        << " F1=" << format_fixed(m.f1, 2) << " support=" << m.support << "\n";
  };
  out << title << "\n";
  row("positive", r.positive);
  row("negative", r.negative);
  row("weighted", r.weighted);
  out << "  accuracy   " << format_fixed(r.accuracy, 2) << "\n";
  out << "  confusion  [pos->pos " << r.confusion.pos_as_pos << ", pos->neg "
      << r.confusion.pos_as_neg << ", neg->pos " << r.confusion.neg_as_pos << ", neg->neg "
      << r.confusion.neg_as_neg << "]\n";
  return out.str();
}

}  // namespace wbtk

#endif  // WBTK_EVAL_HPP
