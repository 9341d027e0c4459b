#ifndef WBTK_FEATURES_HPP
#define WBTK_FEATURES_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "wbtk/lexicons.hpp"
#include "wbtk/patterns.hpp"
#include "wbtk/text.hpp"
#include "wbtk/util.hpp"

namespace wbtk {

enum class Scheme { Unigram, CategoryLex, FrameAll, FrameSubset, Pattern };

// A named feature scheme; FrameSubset carries the category filter.
struct SchemeSpec {
  Scheme kind = Scheme::Unigram;
  std::string name;
  std::set<std::string> categories;  // FrameSubset only
};

// Experiment row order is fixed; reports always list schemes this way.
inline const std::vector<SchemeSpec>& experiment_schemes() {
  static const std::vector<SchemeSpec> schemes = {
      {Scheme::Unigram, "Unigram", {}},
      {Scheme::CategoryLex, "CategoryLex", {}},
      {Scheme::FrameAll, "FrameAll", {}},
      {Scheme::FrameSubset, "Goals", {"Goal"}},
      {Scheme::FrameSubset, "Eudaimonic", {"Autonomy", "Competence", "Connection"}},
      {Scheme::FrameSubset, "Savouring", {"Savouring"}},
      {Scheme::FrameSubset, "Autonomy", {"Autonomy"}},
      {Scheme::FrameSubset, "Competence", {"Competence"}},
      {Scheme::FrameSubset, "Connection", {"Connection"}},
      {Scheme::Pattern, "Pattern", {}},
  };
  return schemes;
}

inline SchemeSpec scheme_by_name(const std::string& name) {
  for (const auto& s : experiment_schemes())
    if (s.name == name) return s;
  throw ConfigError("unknown scheme: " + name +
                    " (expected Unigram, CategoryLex, FrameAll, Goals, Eudaimonic, Savouring, "
                    "Autonomy, Competence, Connection or Pattern)");
}

// Resources a scheme may need; extraction checks for the ones it uses.
struct FeatureContext {
  const FrameLexicon* frames = nullptr;
  const Dictionary* dict = nullptr;
  const Gazetteer* food = nullptr;
  const SelectedPatterns* patterns = nullptr;
};

// Raw named counts for one sentence under one scheme.
inline std::map<std::string, std::uint32_t> feature_counts(const ParsedSentence& s,
                                                           const SchemeSpec& scheme,
                                                           const FeatureContext& ctx) {
  std::map<std::string, std::uint32_t> counts;
  switch (scheme.kind) {
    case Scheme::Unigram: {
      for (const auto& t : s.tokens)
        if (t.pos != Pos::Punct) ++counts[t.norm];
      break;
    }
    case Scheme::CategoryLex: {
      if (!ctx.dict) throw ConfigError("scheme " + scheme.name + " needs a dictionary (--dict)");
      for (const auto& t : s.tokens) {
        if (t.pos == Pos::Punct) continue;
        for (const auto& c : ctx.dict->categories_of(t.norm)) ++counts[c];
      }
      break;
    }
    case Scheme::FrameAll:
    case Scheme::FrameSubset: {
      if (!ctx.frames)
        throw ConfigError("scheme " + scheme.name + " needs a frame lexicon (--frames)");
      for (const auto& m : ctx.frames->match(s.tokens)) {
        if (scheme.kind == Scheme::FrameSubset && !scheme.categories.count(m.category)) continue;
        ++counts[m.frame];
      }
      break;
    }
    case Scheme::Pattern: {
      if (!ctx.patterns)
        throw ConfigError("scheme " + scheme.name + " needs selected patterns (run sweep first)");
      const ParsedSentence* src = &s;
      ParsedSentence collapsed;
      if (ctx.food) {
        collapsed = ctx.food->collapse(s);
        src = &collapsed;
      }
      for (const auto& inst : instantiate(*src)) {
        if (ctx.patterns->positive.count(inst.key) || ctx.patterns->negative.count(inst.key)) {
          std::string name = "t" + std::to_string(inst.key.template_id) + ":" + inst.key.slot +
                             ":" + pattern_display(inst.key);
          ++counts[name];
        }
      }
      break;
    }
  }
  return counts;
}

// Feature name <-> dense id map, frozen after fitting on the train split.
class FeatureSpace {
 public:
  static FeatureSpace fit(const std::vector<std::map<std::string, std::uint32_t>>& all_counts,
                          const std::string& scheme_name) {
    std::set<std::string> names;
    for (const auto& counts : all_counts)
      for (const auto& [name, n] : counts) names.insert(name);
    FeatureSpace space;
    space.scheme_name_ = scheme_name;
    space.names_.assign(names.begin(), names.end());  // sorted: set iteration order
    for (std::uint32_t i = 0; i < space.names_.size(); ++i) space.ids_[space.names_[i]] = i;
    return space;
  }

  std::optional<std::uint32_t> id_of(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  const std::string& name_of(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  const std::string& scheme_name() const { return scheme_name_; }
  const std::vector<std::string>& names() const { return names_; }

  // Content fingerprint recorded in model files; detects space mismatches.
  std::string hash() const { return fnv1a64_hex(scheme_name_ + "\n" + join(names_, "\n")); }

  nlohmann::json to_json() const {
    return nlohmann::json{{"scheme", scheme_name_}, {"names", names_}};
  }
  static FeatureSpace from_json(const nlohmann::json& j) {
    FeatureSpace space;
    space.scheme_name_ = j.at("scheme").get<std::string>();
    space.names_ = j.at("names").get<std::vector<std::string>>();
    for (std::uint32_t i = 0; i < space.names_.size(); ++i) space.ids_[space.names_[i]] = i;
    return space;
  }
  void save(const std::string& path) const { write_file(path, to_json().dump(2) + "\n"); }
  static FeatureSpace load(const std::string& path) {
    try {
      return from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("bad feature space file " + path + ": " + e.what());
    }
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::string scheme_name_;
};

// Sparse counts for one sentence; ids strictly increasing, counts >= 1.
struct FeatureVector {
  std::string sentence_id;
  PolarityLabel label = PolarityLabel::Neutral;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> items;

  std::uint64_t total() const {
    std::uint64_t sum = 0;
    for (const auto& [id, n] : items) sum += n;
    return sum;
  }
};

// Unseen names are dropped: the space is frozen after fitting on train.
inline FeatureVector vectorize(const std::map<std::string, std::uint32_t>& counts,
                               const FeatureSpace& space, const std::string& sentence_id,
                               PolarityLabel label) {
  FeatureVector v;
  v.sentence_id = sentence_id;
  v.label = label;
  for (const auto& [name, n] : counts) {
    if (auto id = space.id_of(name)) v.items.emplace_back(*id, n);
  }
  std::sort(v.items.begin(), v.items.end());
  return v;
}

inline std::vector<FeatureVector> extract(const std::vector<ParsedSentence>& sentences,
                                          const SchemeSpec& scheme, const FeatureContext& ctx,
                                          const FeatureSpace& space) {
  std::vector<FeatureVector> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences)
    out.push_back(vectorize(feature_counts(s, scheme, ctx), space, s.id, s.label));
  return out;
}

inline FeatureSpace fit_space(const std::vector<ParsedSentence>& sentences,
                              const SchemeSpec& scheme, const FeatureContext& ctx) {
  std::vector<std::map<std::string, std::uint32_t>> all;
  all.reserve(sentences.size());
  for (const auto& s : sentences) all.push_back(feature_counts(s, scheme, ctx));
  return FeatureSpace::fit(all, scheme.name);
}

// --- density ---------------------------------------------------------------------

// Mean total feature count per sentence.
inline double density(const std::vector<FeatureVector>& vectors) {
  if (vectors.empty()) throw ConfigError("density: empty vector set");
  double sum = 0.0;
  for (const auto& v : vectors) sum += static_cast<double>(v.total());
  return sum / static_cast<double>(vectors.size());
}

// --- information gain --------------------------------------------------------------

// Entropy (base 2) of a two-way split; 0·log(0) = 0.
inline double entropy2(std::size_t a, std::size_t b) {
  std::size_t n = a + b;
  if (n == 0) return 0.0;
  double h = 0.0;
  for (std::size_t k : {a, b}) {
    if (k == 0) continue;
    double p = static_cast<double>(k) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

// IG of a binary feature: H(C) - P(f)H(C|f) - P(!f)H(C|!f).
inline double information_gain(std::size_t pos_with, std::size_t neg_with, std::size_t pos_total,
                               std::size_t neg_total) {
  if (pos_with > pos_total || neg_with > neg_total)
    throw ConfigError("information_gain: presence counts exceed totals");
  std::size_t n = pos_total + neg_total;
  if (pos_total == 0 || neg_total == 0)
    throw ConfigError("information_gain: needs at least one sentence per class");
  std::size_t with = pos_with + neg_with;
  std::size_t without = n - with;
  double h = entropy2(pos_total, neg_total);
  double p_with = static_cast<double>(with) / static_cast<double>(n);
  double p_without = static_cast<double>(without) / static_cast<double>(n);
  double h_with = entropy2(pos_with, neg_with);
  double h_without = entropy2(pos_total - pos_with, neg_total - neg_with);
  return h - p_with * h_with - p_without * h_without;
}

struct FeatureGain {
  std::string name;
  double gain = 0.0;
};

// Gains for every feature in the space, sorted descending, ties by name.
inline std::vector<FeatureGain> rank_features(const std::vector<FeatureVector>& train,
                                              const FeatureSpace& space,
                                              std::size_t k = static_cast<std::size_t>(-1)) {
  std::size_t pos_total = 0, neg_total = 0;
  std::vector<std::size_t> pos_with(space.size(), 0), neg_with(space.size(), 0);
  for (const auto& v : train) {
    if (v.label == PolarityLabel::Neutral)
      throw ConfigError("rank: neutral sentences are excluded upstream");
    bool pos = v.label == PolarityLabel::Positive;
    (pos ? pos_total : neg_total) += 1;
    for (const auto& [id, n] : v.items) (pos ? pos_with : neg_with)[id] += 1;
  }
  if (pos_total == 0 || neg_total == 0)
    throw ConfigError("rank: needs at least one sentence per class");
  std::vector<FeatureGain> out;
  out.reserve(space.size());
  for (std::uint32_t id = 0; id < space.size(); ++id)
    out.push_back({space.name_of(id),
                   information_gain(pos_with[id], neg_with[id], pos_total, neg_total)});
  std::sort(out.begin(), out.end(), [](const FeatureGain& a, const FeatureGain& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    return a.name < b.name;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

inline std::string format_ranking(const std::vector<FeatureGain>& ranking) {
  std::ostringstream out;
  out << "rank\tfeature\tgain\n";
  for (std::size_t i = 0; i < ranking.size(); ++i)
    out << (i + 1) << '\t' << ranking[i].name << '\t' << format_fixed(ranking[i].gain, 6) << '\n';
  return out.str();
}

// --- sparse vector file I/O -----------------------------------------------------

inline std::string format_vectors(const std::vector<FeatureVector>& vectors) {
  std::ostringstream out;
  for (const auto& v : vectors) {
    out << v.sentence_id << '\t' << to_string(v.label) << '\t';
    for (std::size_t i = 0; i < v.items.size(); ++i) {
      if (i) out << ' ';
      out << v.items[i].first << ':' << v.items[i].second;
    }
    out << '\n';
  }
  return out.str();
}

inline void save_vectors(const std::string& path, const std::vector<FeatureVector>& vectors) {
  write_file(path, format_vectors(vectors));
}

inline std::vector<FeatureVector> load_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vector file: " + path);
  std::vector<FeatureVector> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected sentence_id<TAB>label<TAB>features");
    FeatureVector v;
    v.sentence_id = cols[0];
    v.label = polarity_from_string(cols[1]);
    std::uint32_t prev_id = 0;
    bool first = true;
    for (const auto& pair : split_ws(cols[2])) {
      auto colon = pair.find(':');
      if (colon == std::string::npos)
        throw DataError(path + ":" + std::to_string(line_no) + ": malformed pair " + pair);
      std::uint32_t id, n;
      try {
        id = static_cast<std::uint32_t>(std::stoul(pair.substr(0, colon)));
        n = static_cast<std::uint32_t>(std::stoul(pair.substr(colon + 1)));
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(line_no) + ": malformed pair " + pair);
      }
      if (n == 0)
        throw DataError(path + ":" + std::to_string(line_no) + ": zero count for id " +
                        std::to_string(id));
      if (!first && id <= prev_id)
        throw DataError(path + ":" + std::to_string(line_no) + ": ids not strictly increasing");
      v.items.emplace_back(id, n);
      prev_id = id;
      first = false;
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace wbtk

#endif  // WBTK_FEATURES_HPP
