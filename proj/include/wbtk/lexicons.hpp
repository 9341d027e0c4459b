#ifndef WBTK_LEXICONS_HPP
#define WBTK_LEXICONS_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "wbtk/text.hpp"
#include "wbtk/util.hpp"

namespace wbtk {

inline const std::vector<std::string>& wellbeing_categories() {
  static const std::vector<std::string> cats = {"Autonomy", "Competence", "Connection", "Goal",
                                                "Savouring"};
  return cats;
}

// Token placeholder substituted for gazetteer hits. Uppercase on purpose:
// token norms are lowercased, so a collapsed token can never match again.
inline const std::string kFoodSymbol = "FOOD";

struct FrameMatch {
  std::string frame;
  std::string category;
  std::size_t begin = 0;  // token range [begin, end)
  std::size_t end = 0;
};

// Frame lexicon: named frames grouped under the five well-being categories,
// each carrying one or more lexical units (normalized token sequences).
class FrameLexicon {
 public:
  struct Unit {
    std::vector<std::string> tokens;
    std::string frame;
    std::string category;
  };

  static FrameLexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open frame lexicon: " + path);
    FrameLexicon lex;
    std::string line;
    int line_no = 0;
    std::set<std::pair<std::string, std::string>> seen;
    while (std::getline(in, line)) {
      ++line_no;
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      auto cols = split(line, '\t');
      if (cols.size() != 3)
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": expected category<TAB>frame<TAB>unit");
      std::string category = trim(cols[0]);
      std::string frame = trim(cols[1]);
      std::string unit = to_lower(trim(cols[2]));
      const auto& cats = wellbeing_categories();
      if (std::find(cats.begin(), cats.end(), category) == cats.end())
        throw DataError(path + ":" + std::to_string(line_no) + ": unknown category " + category);
      if (frame.empty() || unit.empty())
        throw DataError(path + ":" + std::to_string(line_no) + ": empty frame or unit");
      auto it = lex.frame_category_.find(frame);
      if (it == lex.frame_category_.end()) {
        lex.frame_category_[frame] = category;
      } else if (it->second != category) {
        throw DataError(path + ":" + std::to_string(line_no) + ": frame " + frame +
                        " assigned to both " + it->second + " and " + category);
      }
      if (!seen.insert({frame, unit}).second)
        throw DataError(path + ":" + std::to_string(line_no) + ": duplicate unit " + unit +
                        " in frame " + frame);
      Unit u;
      u.tokens = split_ws(unit);
      u.frame = frame;
      u.category = category;
      lex.index_[u.tokens.front()].push_back(lex.units_.size());
      lex.units_.push_back(std::move(u));
    }
    if (lex.units_.empty()) throw DataError("frame lexicon is empty: " + path);
    // longest unit first; ties broken by category then frame name
    for (auto& [word, ids] : lex.index_) {
      std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
        const Unit& ua = lex.units_[a];
        const Unit& ub = lex.units_[b];
        if (ua.tokens.size() != ub.tokens.size()) return ua.tokens.size() > ub.tokens.size();
        if (ua.category != ub.category) return ua.category < ub.category;
        return ua.frame < ub.frame;
      });
    }
    return lex;
  }

  // Greedy left-to-right longest match over token norms; matches do not
  // overlap and matching restarts after each hit.
  std::vector<FrameMatch> match(const std::vector<Token>& tokens) const {
    std::vector<FrameMatch> out;
    std::size_t i = 0;
    while (i < tokens.size()) {
      auto it = index_.find(tokens[i].norm);
      bool matched = false;
      if (it != index_.end()) {
        for (std::size_t uid : it->second) {
          const Unit& u = units_[uid];
          if (i + u.tokens.size() > tokens.size()) continue;
          bool ok = true;
          for (std::size_t k = 1; k < u.tokens.size(); ++k)
            if (tokens[i + k].norm != u.tokens[k]) { ok = false; break; }
          if (ok) {
            out.push_back({u.frame, u.category, i, i + u.tokens.size()});
            i += u.tokens.size();
            matched = true;
            break;
          }
        }
      }
      if (!matched) ++i;
    }
    return out;
  }

  const std::vector<Unit>& units() const { return units_; }
  const std::map<std::string, std::string>& frame_categories() const { return frame_category_; }

  std::size_t frame_count() const { return frame_category_.size(); }
  std::size_t unit_count() const { return units_.size(); }

 private:
  std::vector<Unit> units_;
  std::unordered_map<std::string, std::vector<std::size_t>> index_;
  std::map<std::string, std::string> frame_category_;
};

// Word-category dictionary in the style of closed-vocabulary word-count
// tools: exact entries plus prefix entries written as "stem*".
class Dictionary {
 public:
  static Dictionary load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dictionary: " + path);
    Dictionary d;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      auto cols = split(line, '\t');
      if (cols.size() != 2)
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": expected pattern<TAB>categories");
      std::string pattern = to_lower(trim(cols[0]));
      std::vector<std::string> cats;
      for (auto& c : split(cols[1], ',')) {
        std::string cc = trim(c);
        if (!cc.empty()) cats.push_back(cc);
      }
      if (pattern.empty() || cats.empty())
        throw DataError(path + ":" + std::to_string(line_no) + ": empty pattern or categories");
      std::sort(cats.begin(), cats.end());
      cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
      for (const auto& c : cats) d.categories_.insert(c);
      if (pattern.back() == '*') {
        std::string stem = pattern.substr(0, pattern.size() - 1);
        if (stem.empty())
          throw DataError(path + ":" + std::to_string(line_no) + ": bare wildcard");
        if (!d.prefixes_.emplace(stem, cats).second)
          throw DataError(path + ":" + std::to_string(line_no) + ": duplicate pattern " + pattern);
      } else {
        if (!d.exact_.emplace(pattern, cats).second)
          throw DataError(path + ":" + std::to_string(line_no) + ": duplicate pattern " + pattern);
      }
    }
    if (d.exact_.empty() && d.prefixes_.empty())
      throw DataError("dictionary is empty: " + path);
    return d;
  }

  // Union of categories from the exact entry and every matching prefix
  // entry, sorted and deduplicated.
  std::vector<std::string> categories_of(const std::string& norm) const {
    std::vector<std::string> out;
    auto it = exact_.find(norm);
    if (it != exact_.end()) out = it->second;
    for (const auto& [stem, cats] : prefixes_) {
      if (norm.size() >= stem.size() && norm.compare(0, stem.size(), stem) == 0)
        out.insert(out.end(), cats.begin(), cats.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  const std::set<std::string>& categories() const { return categories_; }
  std::size_t entry_count() const { return exact_.size() + prefixes_.size(); }

 private:
  std::unordered_map<std::string, std::vector<std::string>> exact_;
  std::map<std::string, std::vector<std::string>> prefixes_;
  std::set<std::string> categories_;
};

// Food-term gazetteer. Matching terms collapse to the FOOD placeholder so
// pattern anchors generalize across particular dishes.
class Gazetteer {
 public:
  static Gazetteer load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open gazetteer: " + path);
    Gazetteer g;
    std::string line;
    while (std::getline(in, line)) {
      std::string t = to_lower(trim(line));
      if (t.empty() || t[0] == '#') continue;
      auto toks = split_ws(t);
      g.index_[toks.front()].push_back(g.terms_.size());
      g.terms_.push_back(std::move(toks));
    }
    if (g.terms_.empty()) throw DataError("gazetteer is empty: " + path);
    for (auto& [word, ids] : g.index_) {
      std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
        if (g.terms_[a].size() != g.terms_[b].size())
          return g.terms_[a].size() > g.terms_[b].size();
        return g.terms_[a] < g.terms_[b];
      });
    }
    return g;
  }

  // Longest gazetteer term starting at token i, or 0 if none.
  std::size_t match_length(const std::vector<Token>& tokens, std::size_t i) const {
    auto it = index_.find(tokens[i].norm);
    if (it == index_.end()) return 0;
    for (std::size_t tid : it->second) {
      const auto& term = terms_[tid];
      if (i + term.size() > tokens.size()) continue;
      bool ok = true;
      for (std::size_t k = 1; k < term.size(); ++k)
        if (tokens[i + k].norm != term[k]) { ok = false; break; }
      if (ok) return term.size();
    }
    return 0;
  }

  std::vector<Token> collapse_tokens(const std::vector<Token>& tokens) const {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < tokens.size()) {
      std::size_t len = match_length(tokens, i);
      if (len > 0) {
        Token t;
        t.surface = kFoodSymbol;
        t.norm = kFoodSymbol;
        t.pos = Pos::Noun;
        out.push_back(std::move(t));
        i += len;
      } else {
        out.push_back(tokens[i]);
        ++i;
      }
    }
    return out;
  }

  // Collapsing twice is a no-op: the placeholder's norm is uppercase and
  // gazetteer terms are lowercase.
  ParsedSentence collapse(const ParsedSentence& s) const {
    ParsedSentence out;
    out.id = s.id;
    out.label = s.label;
    out.tokens = collapse_tokens(s.tokens);
    out.chunks = chunk(out.tokens);
    return out;
  }

  std::size_t term_count() const { return terms_.size(); }

 private:
  std::vector<std::vector<std::string>> terms_;
  std::unordered_map<std::string, std::vector<std::size_t>> index_;
};

}  // namespace wbtk

#endif  // WBTK_LEXICONS_HPP
