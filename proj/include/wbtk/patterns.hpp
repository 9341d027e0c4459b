#ifndef WBTK_PATTERNS_HPP
#define WBTK_PATTERNS_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "wbtk/eval.hpp"
#include "wbtk/text.hpp"
#include "wbtk/util.hpp"

namespace wbtk {

// Extraction patterns: a syntactic template (1..16) plus the lexical anchors
// that instantiate it. The slot names which argument would be extracted.
struct PatternKey {
  int template_id = 0;
  std::vector<std::string> anchors;
  std::string slot;

  bool operator==(const PatternKey& o) const {
    return template_id == o.template_id && slot == o.slot && anchors == o.anchors;
  }
  bool operator<(const PatternKey& o) const {
    return std::tie(template_id, slot, anchors) < std::tie(o.template_id, o.slot, o.anchors);
  }
};

inline const char* template_name(int id) {
  switch (id) {
    case 1: return "<subj> PassVP";
    case 2: return "<subj> ActVP";
    case 3: return "<subj> ActVP Dobj";
    case 4: return "<subj> ActInfVP";
    case 5: return "<subj> PassInfVP";
    case 6: return "<subj> AuxVP Dobj";
    case 7: return "<subj> AuxVP Adj";
    case 8: return "ActVP <dobj>";
    case 9: return "InfVP <dobj>";
    case 10: return "ActInfVP <dobj>";
    case 11: return "Subj AuxVP <dobj>";
    case 12: return "NP Prep <np>";
    case 13: return "ActVP Prep <np>";
    case 14: return "PassVP Prep <np>";
    case 15: return "InfVP Prep <np>";
    case 16: return "<possessive> NP";
    default: return "?";
  }
}

// Display form: anchors underscore-joined and uppercased (NOT_TALK_TO).
inline std::string pattern_display(const PatternKey& key) {
  std::string joined = join(key.anchors, "_");
  for (auto& c : joined) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return joined;
}

struct PatternInstance {
  PatternKey key;
  std::string sentence_id;
  std::string filler;  // head norm of the extracted argument; empty for implicit subjects
  PolarityLabel label = PolarityLabel::Neutral;
};

namespace detail {

// Negative-contraction auxiliaries anchor under their base form.
inline std::string vp_anchor(const std::vector<Token>& tokens, const Chunk& vp) {
  std::string base = tokens[vp.head_index].norm;
  auto it = tagset::negative_aux_base().find(base);
  if (it != tagset::negative_aux_base().end()) base = it->second;
  if (vp.negated) return "not_" + base;
  return base;
}

struct SubjInfo {
  bool found = false;
  bool implicit = false;
  std::size_t head = npos_index;  // token index when explicit
};

}  // namespace detail

// Applies all sixteen templates to one parsed sentence.
inline std::vector<PatternInstance> instantiate(const ParsedSentence& s) {
  std::vector<PatternInstance> out;
  const auto& tokens = s.tokens;
  const auto& chunks = s.chunks;

  auto np_at = [&](std::size_t pos) -> const Chunk* {
    for (const auto& c : chunks)
      if (c.kind == ChunkKind::NP && c.begin == pos) return &c;
    return nullptr;
  };
  auto vp_at = [&](std::size_t pos) -> const Chunk* {
    for (const auto& c : chunks)
      if (c.kind == ChunkKind::VP && c.begin == pos) return &c;
    return nullptr;
  };

  // Subject = previous non-PP chunk when it is an NP. A clause-initial VP
  // (only conjunctions, punctuation or adverbs before it) has an implicit
  // subject: diary writers drop "I".
  auto subj_of = [&](const Chunk& vp) -> detail::SubjInfo {
    detail::SubjInfo info;
    const Chunk* prev = nullptr;
    for (const auto& c : chunks) {
      if (c.begin >= vp.begin) break;
      if (c.kind == ChunkKind::PP) continue;
      if (c.end <= vp.begin) prev = &c;
    }
    if (prev && prev->kind == ChunkKind::NP) {
      info.found = true;
      info.head = prev->head_index;
      return info;
    }
    std::size_t i = vp.begin;
    while (i > 0) {
      const Token& t = tokens[i - 1];
      if (t.pos == Pos::Adv) { --i; continue; }
      if (t.pos == Pos::Conj || t.pos == Pos::Punct) { info.found = info.implicit = true; }
      return info;
    }
    info.found = info.implicit = true;  // sentence-initial
    return info;
  };

  // First preposition reachable from `pos`, skipping adverbs, at most one
  // NP (a direct object), and particle prepositions that head no NP.
  auto prep_np_after = [&](std::size_t pos, bool allow_np_skip)
      -> std::optional<std::pair<std::size_t, const Chunk*>> {
    bool skipped = false;
    while (pos < tokens.size()) {
      if (const Chunk* np = np_at(pos); np && allow_np_skip && !skipped) {
        pos = np->end;
        skipped = true;
        continue;
      }
      if (tokens[pos].pos == Pos::Adv) { ++pos; continue; }
      if (tokens[pos].pos == Pos::Prep) {
        if (const Chunk* np = np_at(pos + 1)) return std::make_pair(pos, np);
        ++pos;  // particle
        continue;
      }
      break;
    }
    return std::nullopt;
  };

  auto emit = [&](int id, std::vector<std::string> anchors, const char* slot,
                  const std::string& filler) {
    PatternInstance inst;
    inst.key.template_id = id;
    inst.key.anchors = std::move(anchors);
    inst.key.slot = slot;
    inst.sentence_id = s.id;
    inst.filler = filler;
    inst.label = s.label;
    out.push_back(std::move(inst));
  };

  for (const auto& vp : chunks) {
    if (vp.kind != ChunkKind::VP) continue;
    std::string head = detail::vp_anchor(tokens, vp);
    std::vector<std::string> head_prt = {head};
    if (vp.particle != npos_index) head_prt.push_back(tokens[vp.particle].norm);
    detail::SubjInfo subj = subj_of(vp);
    std::string subj_filler = subj.implicit ? "" : (subj.found ? tokens[subj.head].norm : "");
    const Chunk* dobj = np_at(vp.end);
    const Chunk* inf = vp_at(vp.end);
    if (inf && inf->voice != Voice::Infinitive) inf = nullptr;

    switch (vp.voice) {
      case Voice::Active: {
        if (subj.found) {
          emit(2, {head}, "subj", subj_filler);
          if (dobj) emit(3, {head, tokens[dobj->head_index].norm}, "subj", subj_filler);
          if (inf) emit(4, {head, detail::vp_anchor(tokens, *inf)}, "subj", subj_filler);
        }
        if (dobj) emit(8, head_prt, "dobj", tokens[dobj->head_index].norm);
        if (inf) {
          if (const Chunk* inf_dobj = np_at(inf->end))
            emit(10, {head, detail::vp_anchor(tokens, *inf)}, "dobj",
                 tokens[inf_dobj->head_index].norm);
        }
        if (auto pn = prep_np_after(vp.end, true))
          emit(13, {head, tokens[pn->first].norm}, "np", tokens[pn->second->head_index].norm);
        break;
      }
      case Voice::Passive: {
        if (subj.found) {
          emit(1, {head}, "subj", subj_filler);
          if (inf) emit(5, {head, detail::vp_anchor(tokens, *inf)}, "subj", subj_filler);
        }
        if (auto pn = prep_np_after(vp.end, true))
          emit(14, {head, tokens[pn->first].norm}, "np", tokens[pn->second->head_index].norm);
        break;
      }
      case Voice::Infinitive: {
        if (dobj) emit(9, head_prt, "dobj", tokens[dobj->head_index].norm);
        if (auto pn = prep_np_after(vp.end, true))
          emit(15, {head, tokens[pn->first].norm}, "np", tokens[pn->second->head_index].norm);
        break;
      }
      case Voice::None: {  // auxiliary as main verb
        if (subj.found && dobj) {
          emit(6, {head, tokens[dobj->head_index].norm}, "subj", subj_filler);
          if (!subj.implicit)
            emit(11, {tokens[subj.head].norm, head}, "dobj", tokens[dobj->head_index].norm);
        }
        if (subj.found) {
          std::size_t p = vp.end;
          while (p < tokens.size() && tokens[p].pos == Pos::Adv) ++p;
          if (p < tokens.size() && tokens[p].pos == Pos::Adj)
            emit(7, {head, tokens[p].norm}, "subj", subj_filler);
        }
        break;
      }
    }
  }

  for (const auto& np : chunks) {
    if (np.kind != ChunkKind::NP) continue;
    if (auto pn = prep_np_after(np.end, false))
      emit(12, {tokens[np.head_index].norm, tokens[pn->first].norm}, "np",
           tokens[pn->second->head_index].norm);
    if (np.possessive_first) {
      std::vector<std::string> anchors;
      for (std::size_t i = np.begin + 1; i <= np.head_index; ++i) {
        Pos p = tokens[i].pos;
        if (p == Pos::Adj || p == Pos::Noun || p == Pos::Num) anchors.push_back(tokens[i].norm);
      }
      if (!anchors.empty()) emit(16, anchors, "possessive", tokens[np.begin].norm);
    }
  }

  return out;
}

// Per-pattern class statistics accumulated over a labeled corpus.
struct PatternStats {
  PatternKey key;
  std::size_t freq = 0;       // pos_count + neg_count, always
  std::size_t pos_count = 0;
  std::size_t neg_count = 0;
  std::string example_id;     // lexicographically smallest sentence id
  std::set<std::string> pos_sentences;
  std::set<std::string> neg_sentences;

  double p_pos() const {
    return freq == 0 ? 0.0 : static_cast<double>(pos_count) / static_cast<double>(freq);
  }
  double p_neg() const {
    return freq == 0 ? 0.0 : static_cast<double>(neg_count) / static_cast<double>(freq);
  }
};

class PatternTable {
 public:
  void add(const ParsedSentence& s) {
    if (s.label == PolarityLabel::Neutral) return;
    for (auto& inst : instantiate(s)) add_instance(inst);
  }

  void add_instance(const PatternInstance& inst) {
    if (inst.label == PolarityLabel::Neutral) return;
    PatternStats& st = stats_[inst.key];
    st.key = inst.key;
    ++st.freq;
    if (inst.label == PolarityLabel::Positive) {
      ++st.pos_count;
      if (!inst.sentence_id.empty()) st.pos_sentences.insert(inst.sentence_id);
    } else {
      ++st.neg_count;
      if (!inst.sentence_id.empty()) st.neg_sentences.insert(inst.sentence_id);
    }
    if (!inst.sentence_id.empty() &&
        (st.example_id.empty() || inst.sentence_id < st.example_id))
      st.example_id = inst.sentence_id;
  }

  std::size_t size() const { return stats_.size(); }

  // Key-ordered view (deterministic regardless of insertion order).
  std::vector<PatternStats> all() const {
    std::vector<PatternStats> out;
    out.reserve(stats_.size());
    for (const auto& [k, st] : stats_) out.push_back(st);
    return out;
  }

  // Report order: most class-pure first, then most frequent.
  std::vector<PatternStats> ranked() const {
    std::vector<PatternStats> out = all();
    std::sort(out.begin(), out.end(), [](const PatternStats& a, const PatternStats& b) {
      double pa = std::max(a.p_pos(), a.p_neg());
      double pb = std::max(b.p_pos(), b.p_neg());
      if (pa != pb) return pa > pb;
      if (a.freq != b.freq) return a.freq > b.freq;
      return a.key < b.key;
    });
    return out;
  }

 private:
  std::map<PatternKey, PatternStats> stats_;
};

// --- selection and threshold sweep ---------------------------------------------

struct SelectedPatterns {
  std::size_t theta_f = 0;
  double theta_p = 0.0;
  std::set<PatternKey> positive;
  std::set<PatternKey> negative;
};

// A pattern is selected for a class when freq >= theta_f and the class
// conditional probability >= theta_p. The same thresholds apply to both
// classes.
inline SelectedPatterns select_patterns(const std::vector<PatternStats>& stats,
                                        std::size_t theta_f, double theta_p) {
  SelectedPatterns sel;
  sel.theta_f = theta_f;
  sel.theta_p = theta_p;
  for (const auto& st : stats) {
    if (st.freq < theta_f) continue;
    if (st.p_pos() >= theta_p) sel.positive.insert(st.key);
    if (st.p_neg() >= theta_p) sel.negative.insert(st.key);
  }
  return sel;
}

// Majority vote over selected-pattern hits; ties (including no hits) fall
// back to the majority training class.
inline PolarityLabel classify_by_patterns(const std::vector<PatternKey>& instance_keys,
                                          const SelectedPatterns& sel,
                                          PolarityLabel majority) {
  std::size_t pos_hits = 0, neg_hits = 0;
  for (const auto& k : instance_keys) {
    if (sel.positive.count(k)) ++pos_hits;
    if (sel.negative.count(k)) ++neg_hits;
  }
  if (pos_hits > neg_hits) return PolarityLabel::Positive;
  if (neg_hits > pos_hits) return PolarityLabel::Negative;
  return majority;
}

struct SweepCell {
  std::size_t theta_f = 0;
  double theta_p = 0.0;
  double weighted_f1 = 0.0;
  std::size_t selected_pos = 0;
  std::size_t selected_neg = 0;
};

struct SweepOutcome {
  SweepCell best;
  std::vector<SweepCell> cells;  // row-major: theta_f ascending, theta_p ascending
};

inline std::vector<std::size_t> default_freq_grid() {
  std::vector<std::size_t> g;
  for (std::size_t f = 2; f <= 20; ++f) g.push_back(f);
  return g;
}

inline std::vector<double> default_prob_grid() {
  return {0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
}

// Evaluation sentences are pre-instantiated once; each grid cell selects,
// classifies and scores. Ties on F1 keep the earlier cell (lower theta_f,
// then lower theta_p).
inline SweepOutcome sweep_thresholds(const std::vector<PatternStats>& stats,
                                     const std::vector<std::vector<PatternKey>>& instance_keys,
                                     const std::vector<PolarityLabel>& gold,
                                     const std::vector<std::size_t>& freq_grid,
                                     const std::vector<double>& prob_grid,
                                     PolarityLabel majority) {
  if (instance_keys.size() != gold.size())
    throw ConfigError("sweep: instances and labels differ in length");
  SweepOutcome outcome;
  bool first = true;
  for (std::size_t f : freq_grid) {
    for (double p : prob_grid) {
      SelectedPatterns sel = select_patterns(stats, f, p);
      std::vector<PolarityLabel> predicted;
      predicted.reserve(gold.size());
      for (const auto& keys : instance_keys)
        predicted.push_back(classify_by_patterns(keys, sel, majority));
      EvalResult r = evaluate(gold, predicted);
      SweepCell cell{f, p, r.weighted.f1, sel.positive.size(), sel.negative.size()};
      outcome.cells.push_back(cell);
      if (first || cell.weighted_f1 > outcome.best.weighted_f1) {
        outcome.best = cell;
        first = false;
      }
    }
  }
  if (first) throw ConfigError("sweep: empty threshold grid");
  return outcome;
}

// --- reports --------------------------------------------------------------------

inline std::string format_pattern_report(const std::vector<PatternStats>& stats) {
  std::ostringstream out;
  out << "template_id\tpattern\tslot\tfreq\tpos_count\tneg_count\tp_pos\texample\n";
  for (const auto& st : stats) {
    out << st.key.template_id << '\t' << pattern_display(st.key) << '\t' << st.key.slot << '\t'
        << st.freq << '\t' << st.pos_count << '\t' << st.neg_count << '\t'
        << format_fixed(st.p_pos(), 4) << '\t' << st.example_id << '\n';
  }
  return out.str();
}

// Family query: case-insensitive substring over the display form, with
// optional ^ / $ anchoring ("^NEW_", "_WITH$").
struct FamilyReport {
  std::string query;
  std::size_t pos_types = 0;
  std::size_t neg_types = 0;
  std::size_t pos_occurrences = 0;
  std::size_t neg_occurrences = 0;
  std::size_t pos_sentences = 0;
  std::size_t neg_sentences = 0;
};

inline bool family_query_matches(const std::string& query, const std::string& display) {
  std::string q = query;
  bool anchor_begin = !q.empty() && q.front() == '^';
  if (anchor_begin) q.erase(q.begin());
  bool anchor_end = !q.empty() && q.back() == '$';
  if (anchor_end) q.pop_back();
  for (auto& c : q) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (q.empty()) return false;
  if (anchor_begin && anchor_end) return display == q;
  if (anchor_begin) return display.rfind(q, 0) == 0;
  if (anchor_end)
    return display.size() >= q.size() && display.compare(display.size() - q.size(), q.size(), q) == 0;
  return display.find(q) != std::string::npos;
}

inline FamilyReport report_family(const std::vector<PatternStats>& stats,
                                  const std::string& query) {
  FamilyReport rep;
  rep.query = query;
  std::set<std::string> pos_ids, neg_ids;
  for (const auto& st : stats) {
    if (!family_query_matches(query, pattern_display(st.key))) continue;
    if (st.pos_count > 0) {
      ++rep.pos_types;
      rep.pos_occurrences += st.pos_count;
      pos_ids.insert(st.pos_sentences.begin(), st.pos_sentences.end());
    }
    if (st.neg_count > 0) {
      ++rep.neg_types;
      rep.neg_occurrences += st.neg_count;
      neg_ids.insert(st.neg_sentences.begin(), st.neg_sentences.end());
    }
  }
  rep.pos_sentences = pos_ids.size();
  rep.neg_sentences = neg_ids.size();
  return rep;
}

inline std::string format_family_report(const std::vector<FamilyReport>& reports) {
  std::ostringstream out;
  out << "query\tpos_types\tneg_types\tpos_occurrences\tneg_occurrences\tpos_sentences\tneg_sentences\n";
  for (const auto& r : reports) {
    out << r.query << '\t' << r.pos_types << '\t' << r.neg_types << '\t' << r.pos_occurrences
        << '\t' << r.neg_occurrences << '\t' << r.pos_sentences << '\t' << r.neg_sentences
        << '\n';
  }
  return out.str();
}

}  // namespace wbtk

#endif  // WBTK_PATTERNS_HPP
