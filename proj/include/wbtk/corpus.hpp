#ifndef WBTK_CORPUS_HPP
#define WBTK_CORPUS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "wbtk/util.hpp"

namespace wbtk {

enum class PostKind { Recording, Reflection };

enum class PolarityLabel { Positive, Negative, Neutral };

inline std::string to_string(PolarityLabel l) {
  switch (l) {
    case PolarityLabel::Positive: return "positive";
    case PolarityLabel::Negative: return "negative";
    default: return "neutral";
  }
}

inline PolarityLabel polarity_from_string(const std::string& s) {
  if (s == "positive") return PolarityLabel::Positive;
  if (s == "negative") return PolarityLabel::Negative;
  if (s == "neutral") return PolarityLabel::Neutral;
  throw DataError("unknown polarity label: " + s);
}

// A scored micro-blog entry. Scores run 1..9; a Reflection re-assesses the
// Recording named by parent_id.
struct RawPost {
  std::string id;
  std::string author_id;
  PostKind kind = PostKind::Recording;
  int score = 0;
  std::string text;
  std::optional<std::string> parent_id;
  std::optional<std::int64_t> timestamp;
};

struct LabeledPost {
  RawPost post;
  PolarityLabel label = PolarityLabel::Neutral;
};

struct LabeledSentence {
  std::string post_id;
  int sentence_index = 0;
  std::string text;
  PolarityLabel label = PolarityLabel::Neutral;
};

// Train/test/held-out post ids. The three sets are pairwise disjoint and
// cover the non-neutral corpus.
struct CorpusSplit {
  std::set<std::string> train;
  std::set<std::string> test;
  std::set<std::string> held_out;
  std::uint64_t seed = 0;
};

// Polarity binning: 1..4 negative, 6..9 positive. A 5 is resolved by the
// earliest reflection (ordered by timestamp, ties and missing timestamps by
// id): reflection score < 5 makes it negative, > 5 positive; otherwise the
// post stays neutral and is dropped downstream.
inline PolarityLabel bin_post(const RawPost& post, const std::vector<RawPost>& reflections) {
  if (post.score <= 4) return PolarityLabel::Negative;
  if (post.score >= 6) return PolarityLabel::Positive;
  if (reflections.empty()) return PolarityLabel::Neutral;
  const RawPost& first = reflections.front();
  if (first.score < 5) return PolarityLabel::Negative;
  if (first.score > 5) return PolarityLabel::Positive;
  return PolarityLabel::Neutral;
}

// Orders reflections for bin_post: by timestamp, missing timestamps last,
// ties by id.
inline std::vector<RawPost> reflections_of(const std::vector<RawPost>& posts, const std::string& parent_id) {
  std::vector<RawPost> out;
  for (const auto& p : posts) {
    if (p.kind == PostKind::Reflection && p.parent_id && *p.parent_id == parent_id) out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const RawPost& a, const RawPost& b) {
    bool ha = a.timestamp.has_value(), hb = b.timestamp.has_value();
    if (ha != hb) return ha;
    if (ha && *a.timestamp != *b.timestamp) return *a.timestamp < *b.timestamp;
    return a.id < b.id;
  });
  return out;
}

// Labels every post in the corpus. Reflections inherit their own score's
// band (a reflection is itself a scored post); 5-scored reflections with no
// reflections of their own come out neutral.
inline std::vector<LabeledPost> label_corpus(const std::vector<RawPost>& posts) {
  std::unordered_map<std::string, std::vector<RawPost>> by_parent;
  for (const auto& p : posts) {
    if (p.kind == PostKind::Reflection && p.parent_id) by_parent[*p.parent_id].push_back(p);
  }
  for (auto& [k, v] : by_parent) {
    (void)k;
    std::sort(v.begin(), v.end(), [](const RawPost& a, const RawPost& b) {
      bool ha = a.timestamp.has_value(), hb = b.timestamp.has_value();
      if (ha != hb) return ha;
      if (ha && *a.timestamp != *b.timestamp) return *a.timestamp < *b.timestamp;
      return a.id < b.id;
    });
  }
  std::vector<LabeledPost> out;
  out.reserve(posts.size());
  static const std::vector<RawPost> none;
  for (const auto& p : posts) {
    auto it = by_parent.find(p.id);
    out.push_back({p, bin_post(p, it == by_parent.end() ? none : it->second)});
  }
  return out;
}

// Deterministic split of the non-neutral posts: a seeded Fisher-Yates
// shuffle over ids sorted first, then the first train_n go to train, the
// next test_n to test, the rest to held_out.
inline CorpusSplit split_corpus(const std::vector<LabeledPost>& posts, std::size_t train_n,
                                std::size_t test_n, std::uint64_t seed) {
  std::vector<std::string> ids;
  for (const auto& lp : posts) {
    if (lp.label != PolarityLabel::Neutral) ids.push_back(lp.post.id);
  }
  std::sort(ids.begin(), ids.end());
  if (train_n + test_n > ids.size()) {
    throw ConfigError("split sizes exceed available posts: train_n + test_n = " +
                      std::to_string(train_n + test_n) + " > " + std::to_string(ids.size()));
  }
  Rng rng(seed);
  rng.shuffle(ids);
  CorpusSplit split;
  split.seed = seed;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i < train_n) split.train.insert(ids[i]);
    else if (i < train_n + test_n) split.test.insert(ids[i]);
    else split.held_out.insert(ids[i]);
  }
  return split;
}

namespace detail {

inline const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> abbr = {
      "mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "etc", "vs",
      "e.g", "i.e", "a.m", "p.m", "u.s", "approx", "dept", "est", "min", "hr",
  };
  return abbr;
}

// Word immediately preceding position `i` (exclusive), lowercased, with any
// leading dots kept so "e.g." checks work.
inline std::string word_before(const std::string& text, std::size_t i) {
  std::size_t e = i;
  while (e > 0 && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  std::size_t b = e;
  while (b > 0) {
    char c = text[b - 1];
    if (std::isspace(static_cast<unsigned char>(c))) break;
    --b;
  }
  std::string w = to_lower(std::string(text.substr(b, e - b)));
  while (!w.empty() && (w.back() == '.' || w.back() == '!' || w.back() == '?')) w.pop_back();
  return w;
}

}  // namespace detail

// Rule-based sentence splitting: a run of . ! ? ends a sentence when
// followed by whitespace and a capital letter or digit, or by end of text.
// Periods after known abbreviations never split. Concatenation of the
// returned texts equals the input modulo boundary whitespace.
inline std::vector<LabeledSentence> sentence_split(const RawPost& post, PolarityLabel label) {
  std::vector<LabeledSentence> out;
  const std::string& text = post.text;
  if (trim(text).empty()) return out;

  std::vector<std::string> pieces;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      std::size_t run_end = i;
      while (run_end + 1 < text.size() &&
             (text[run_end + 1] == '.' || text[run_end + 1] == '!' || text[run_end + 1] == '?'))
        ++run_end;
      bool boundary = false;
      if (run_end + 1 >= text.size()) {
        boundary = true;
      } else {
        std::size_t j = run_end + 1;
        if (std::isspace(static_cast<unsigned char>(text[j]))) {
          while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
          if (j < text.size() &&
              (std::isupper(static_cast<unsigned char>(text[j])) ||
               std::isdigit(static_cast<unsigned char>(text[j]))))
            boundary = true;
        }
      }
      if (boundary && c == '.' && run_end == i) {
        std::string prev = detail::word_before(text, i);
        if (detail::abbreviations().count(prev)) boundary = false;
      }
      if (boundary) {
        pieces.push_back(text.substr(start, run_end + 1 - start));
        start = run_end + 1;
      }
      i = run_end + 1;
    } else {
      ++i;
    }
  }
  if (start < text.size()) {
    std::string rest = text.substr(start);
    if (!trim(rest).empty()) pieces.push_back(rest);
  }

  int idx = 0;
  for (auto& p : pieces) {
    std::string t = trim(p);
    if (t.empty()) continue;
    out.push_back({post.id, idx++, t, label});
  }
  return out;
}

// --- JSONL corpus I/O -------------------------------------------------------
//
// One JSON object per line: id, author_id, kind ("recording"|"reflection"),
// score, text, parent_id (nullable), timestamp (nullable).

inline RawPost post_from_json(const nlohmann::json& j) {
  RawPost p;
  p.id = j.at("id").get<std::string>();
  p.author_id = j.at("author_id").get<std::string>();
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "recording") p.kind = PostKind::Recording;
  else if (kind == "reflection") p.kind = PostKind::Reflection;
  else throw DataError("unknown kind: " + kind);
  p.score = j.at("score").get<int>();
  if (p.score < 1 || p.score > 9) throw DataError("score out of range [1,9]: " + std::to_string(p.score));
  p.text = j.at("text").get<std::string>();
  if (j.contains("parent_id") && !j["parent_id"].is_null()) p.parent_id = j["parent_id"].get<std::string>();
  if (j.contains("timestamp") && !j["timestamp"].is_null()) p.timestamp = j["timestamp"].get<std::int64_t>();
  if (p.kind == PostKind::Reflection && !p.parent_id)
    throw DataError("reflection without parent_id: " + p.id);
  return p;
}

inline nlohmann::json post_to_json(const RawPost& p) {
  nlohmann::json j;
  j["id"] = p.id;
  j["author_id"] = p.author_id;
  j["kind"] = p.kind == PostKind::Recording ? "recording" : "reflection";
  j["score"] = p.score;
  j["text"] = p.text;
  j["parent_id"] = p.parent_id ? nlohmann::json(*p.parent_id) : nlohmann::json(nullptr);
  j["timestamp"] = p.timestamp ? nlohmann::json(*p.timestamp) : nlohmann::json(nullptr);
  return j;
}

inline std::vector<RawPost> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus: " + path);
  std::vector<RawPost> posts;
  std::unordered_set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      RawPost p = post_from_json(j);
      if (!seen.insert(p.id).second)
        throw DataError("duplicate post id: " + p.id);
      posts.push_back(std::move(p));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  // Referential check: reflections must point at an existing recording.
  std::unordered_set<std::string> recording_ids;
  for (const auto& p : posts)
    if (p.kind == PostKind::Recording) recording_ids.insert(p.id);
  for (const auto& p : posts) {
    if (p.kind == PostKind::Reflection && !recording_ids.count(*p.parent_id))
      throw DataError(path + ": reflection " + p.id + " has unknown parent " + *p.parent_id);
  }
  return posts;
}

inline void save_corpus(const std::string& path, const std::vector<RawPost>& posts) {
  std::ostringstream out;
  for (const auto& p : posts) out << post_to_json(p).dump() << "\n";
  write_file(path, out.str());
}

// --- Corpus statistics ------------------------------------------------------

struct ClassCounts {
  std::size_t posts = 0;
  std::size_t sentences = 0;
};

struct SplitStats {
  std::map<std::string, std::map<std::string, ClassCounts>> by_split;  // split -> class -> counts

  ClassCounts& at(const std::string& split, PolarityLabel label) {
    return by_split[split][to_string(label)];
  }
};

// Posts and sentences per class per split. Posts not in any split set
// (neutral posts, or when no split is given) are counted under "all" only.
inline SplitStats corpus_stats(const std::vector<LabeledPost>& posts, const CorpusSplit* split = nullptr) {
  SplitStats stats;
  for (const auto& lp : posts) {
    std::size_t n_sent = sentence_split(lp.post, lp.label).size();
    auto add = [&](const std::string& name) {
      auto& c = stats.at(name, lp.label);
      c.posts += 1;
      c.sentences += n_sent;
    };
    add("all");
    if (split) {
      if (split->train.count(lp.post.id)) add("train");
      else if (split->test.count(lp.post.id)) add("test");
      else if (split->held_out.count(lp.post.id)) add("held_out");
    }
  }
  return stats;
}

}  // namespace wbtk

#endif  // WBTK_CORPUS_HPP
