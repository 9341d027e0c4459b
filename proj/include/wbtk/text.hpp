#ifndef WBTK_TEXT_HPP
#define WBTK_TEXT_HPP

#include <array>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wbtk/corpus.hpp"
#include "wbtk/util.hpp"

namespace wbtk {

// Coarse tag set: the pattern templates only need verb/noun/adjective/
// preposition/auxiliary distinctions, so no Penn-style granularity.
enum class Pos { Noun, Verb, Aux, Adj, Adv, Pron, Det, Prep, Conj, Num, Part, Punct, Other };

inline const char* pos_name(Pos p) {
  switch (p) {
    case Pos::Noun: return "NOUN";
    case Pos::Verb: return "VERB";
    case Pos::Aux: return "AUX";
    case Pos::Adj: return "ADJ";
    case Pos::Adv: return "ADV";
    case Pos::Pron: return "PRON";
    case Pos::Det: return "DET";
    case Pos::Prep: return "PREP";
    case Pos::Conj: return "CONJ";
    case Pos::Num: return "NUM";
    case Pos::Part: return "PART";
    case Pos::Punct: return "PUNCT";
    default: return "OTHER";
  }
}

inline Pos pos_from_name(const std::string& s) {
  static const std::unordered_map<std::string, Pos> names = {
      {"NOUN", Pos::Noun}, {"VERB", Pos::Verb}, {"AUX", Pos::Aux},   {"ADJ", Pos::Adj},
      {"ADV", Pos::Adv},   {"PRON", Pos::Pron}, {"DET", Pos::Det},   {"PREP", Pos::Prep},
      {"CONJ", Pos::Conj}, {"NUM", Pos::Num},   {"PART", Pos::Part}, {"PUNCT", Pos::Punct},
      {"OTHER", Pos::Other}};
  auto it = names.find(s);
  if (it == names.end()) throw DataError("unknown POS tag: " + s);
  return it->second;
}

struct Token {
  std::string surface;
  std::string norm;  // lowercased, apostrophes stripped ("can't" -> "cant")
  Pos pos = Pos::Other;
  bool is_negator = false;
};

enum class ChunkKind { NP, VP, PP };
enum class Voice { Active, Passive, Infinitive, None };

constexpr std::size_t npos_index = static_cast<std::size_t>(-1);

struct Chunk {
  ChunkKind kind = ChunkKind::NP;
  std::size_t begin = 0;  // token index range [begin, end)
  std::size_t end = 0;
  std::size_t head_index = 0;
  Voice voice = Voice::None;  // VP only
  bool negated = false;
  bool has_aux = false;
  std::size_t particle = npos_index;   // VP: phrasal-verb particle token, if any
  bool possessive_first = false;       // NP: starts with a possessive determiner
};

struct ParsedSentence {
  std::string id;  // post_id:sentence_index when known
  std::vector<Token> tokens;
  std::vector<Chunk> chunks;
  PolarityLabel label = PolarityLabel::Neutral;
};

// --- lexical tables ----------------------------------------------------------

namespace tagset {

inline const std::unordered_set<std::string>& negators() {
  static const std::unordered_set<std::string> s = {
      "not", "no", "never", "cant", "cannot", "dont", "didnt", "wont", "havent", "hasnt",
      "hadnt", "isnt", "arent", "wasnt", "werent", "doesnt", "couldnt", "shouldnt", "wouldnt"};
  return s;
}

// Contracted negative auxiliaries, mapped to the base auxiliary for anchor
// display (NOT_have rather than NOT_havent).
inline const std::unordered_map<std::string, std::string>& negative_aux_base() {
  static const std::unordered_map<std::string, std::string> m = {
      {"cant", "can"},     {"cannot", "can"},   {"dont", "do"},      {"didnt", "did"},
      {"wont", "will"},    {"havent", "have"},  {"hasnt", "has"},    {"hadnt", "had"},
      {"isnt", "is"},      {"arent", "are"},    {"wasnt", "was"},    {"werent", "were"},
      {"doesnt", "does"},  {"couldnt", "could"}, {"shouldnt", "should"}, {"wouldnt", "would"}};
  return m;
}

inline const std::unordered_set<std::string>& aux_verbs() {
  static const std::unordered_set<std::string> s = {
      "am", "is", "are", "was", "were", "be", "been", "being", "have", "has", "had", "having",
      "do", "does", "did", "will", "would", "can", "could", "shall", "should", "may", "might",
      "must", "cant", "cannot", "dont", "didnt", "wont", "havent", "hasnt", "hadnt", "isnt",
      "arent", "wasnt", "werent", "doesnt", "couldnt", "shouldnt", "wouldnt"};
  return s;
}

inline const std::unordered_set<std::string>& be_forms() {
  static const std::unordered_set<std::string> s = {"am", "is",   "are",  "was", "were",
                                                    "be", "been", "being", "isnt", "arent",
                                                    "wasnt", "werent"};
  return s;
}

inline const std::unordered_set<std::string>& pronouns() {
  static const std::unordered_set<std::string> s = {
      "i", "you", "he", "she", "it", "we", "they", "me", "him", "us", "them", "myself",
      "yourself", "himself", "herself", "ourselves", "themselves", "who", "someone", "somebody",
      "something", "anyone", "anything", "nothing", "everyone", "everything", "there",
      "im", "ive", "id", "youre", "weve", "theyre", "hes", "shes"};
  return s;
}

inline const std::unordered_set<std::string>& possessive_dets() {
  static const std::unordered_set<std::string> s = {"my", "your", "his", "our", "their", "its"};
  return s;
}

inline const std::unordered_set<std::string>& determiners() {
  static const std::unordered_set<std::string> s = {"a",   "an",  "the",  "some", "any",
                                                    "each", "every", "all", "both", "another"};
  return s;
}

inline const std::unordered_set<std::string>& prepositions() {
  static const std::unordered_set<std::string> s = {
      "with", "to", "on", "in", "at", "for", "of", "about", "after", "before", "off", "up",
      "out", "over", "under", "from", "by", "into", "onto", "during", "without", "within",
      "around", "through", "until", "till", "near", "behind", "between", "against", "along",
      "across", "toward", "towards", "inside", "outside", "down", "past"};
  return s;
}

inline const std::unordered_set<std::string>& conjunctions() {
  static const std::unordered_set<std::string> s = {
      "and", "or", "but", "nor", "because", "while", "when", "if", "though", "although",
      "since", "whether", "unless", "cause", "cuz"};
  return s;
}

inline const std::unordered_set<std::string>& adverbs() {
  static const std::unordered_set<std::string> s = {
      "so",     "very",   "really",  "just",    "now",     "then",    "still",    "too",
      "also",   "finally", "truly",  "simply",  "randomly", "terribly", "lately", "anymore",
      "much",   "more",   "most",    "almost",  "rather",  "quite",   "again",    "away",
      "even",   "already", "soon",   "here",    "ever",    "maybe",   "perhaps",  "always",
      "often",  "usually", "sometimes", "together", "instead", "early", "late",   "once",
      "twice",  "well",   "back",    "far",     "forever", "yet",     "else"};
  return s;
}

// Open-class verb list: base forms, common irregular pasts/participles, and
// frequent diary verbs. Regular -ed/-ing/-s forms fall to the suffix rules.
inline const std::unordered_set<std::string>& verbs() {
  static const std::unordered_set<std::string> s = {
      "want",  "need",  "go",    "goes",  "went",  "gone",  "get",   "got",   "gotten",
      "take",  "takes", "took",  "taken", "make",  "made",  "eat",   "ate",   "eaten",
      "feel",  "felt",  "find",  "found", "keep",  "kept",  "sleep", "slept", "spend",
      "spent", "buy",   "bought", "tell", "told",  "think", "thought", "know", "knew",
      "known", "see",   "saw",   "seen",  "hear",  "heard", "come",  "came",  "leave",
      "left",  "meet",  "met",   "run",   "ran",   "write", "wrote", "written", "read",
      "drive", "drove", "driven", "give", "gave",  "given", "hang",  "hung",  "sit",
      "sat",   "stand", "stood", "catch", "caught", "teach", "taught", "bring", "brought",
      "wake",  "woke",  "woken", "speak", "spoke", "spoken", "break", "broke", "broken",
      "wear",  "wore",  "worn",  "win",   "won",   "lose",  "lost",  "put",   "hit",
      "hurt",  "cut",   "let",   "set",   "quit",  "pay",   "paid",  "send",  "sent",
      "fall",  "fell",  "fallen", "grow", "grew",  "grown", "throw", "threw", "thrown",
      "show",  "shown", "begin", "began", "begun", "done",  "said",  "say",   "talk",
      "walk",  "work",  "play",  "love",  "hate",  "like",  "miss",  "hope",  "wish",
      "enjoy", "try",   "stop",  "start", "finish", "help", "stay",  "listen", "clean",
      "avoid", "use",   "realize", "suppose", "text", "chat", "study", "cook",  "watch",
      "turn",  "call",  "ask",   "visit", "wait",  "waste", "mess",  "screw", "ruin",
      "punish", "complain", "grumble", "relax", "plan",  "apply", "learn", "worry",
      "stress", "smoke", "swim",  "swam",  "shop",  "dance", "cry",   "cries", "cried",
      "yell",  "laugh", "smile", "forget", "forgot", "forgotten", "remember", "decide",
      "happen", "seem", "understand", "understood", "move", "live",  "die",   "open",
      "close", "end",   "save",  "cram",  "behave", "honk", "whoop", "annoy", "irritate",
      "disappoint", "embarrass", "wipe",  "bump",  "pack",  "drink", "drank", "drunk",
      "cancel", "fail", "pass",  "attend", "travel", "rest", "taste", "wonder", "hike",
      "paint"};
  return s;
}

inline const std::unordered_set<std::string>& adjectives() {
  static const std::unordered_set<std::string> s = {
      "good",  "bad",    "great",  "nice",   "happy",  "glad",   "sad",    "busy",
      "scary", "vibrant", "special", "important", "hard", "difficult", "easy", "tough",
      "long",  "short",  "big",    "small",  "little", "lovely", "ready",  "sick",
      "nervous", "wonderful", "horrible", "weird", "yummy", "delicious", "tasty", "sweet",
      "new",   "old",    "best",   "better", "worst",  "worse",  "fun",    "hilarious",
      "unpleasant", "awesome", "mad", "angry", "upset", "free",  "full",   "empty",
      "next",  "last",   "first",  "fine",   "okay",   "ok",     "cool",   "warm",
      "hot",   "cold",   "favorite", "favourite", "crazy", "enjoyable", "comforting",
      "entertaining", "tiring", "nicer", "disturbing", "tedious", "traumatic", "hungry",
      "sleepy", "horny", "high",  "low",    "right",  "wrong",  "whole",  "few",
      "several", "many", "other", "same",   "own",    "packed", "tired",  "exhausted"};
  return s;
}

// Irregular past participles for the be+participle passive test; regular
// participles are caught by the -ed/-en suffix check.
inline const std::unordered_set<std::string>& participles() {
  static const std::unordered_set<std::string> s = {
      "done", "gone", "made", "seen", "taken", "eaten", "gotten", "forgotten", "kept",
      "slept", "spent", "bought", "told", "thought", "known", "heard", "left", "met",
      "written", "driven", "given", "hung", "caught", "taught", "brought", "woken",
      "spoken", "broken", "worn", "won", "lost", "put", "hit", "hurt", "cut", "let",
      "set", "paid", "sent", "fallen", "grown", "thrown", "shown", "drunk", "been",
      "said", "found", "felt"};
  return s;
}

// Verb + particle pairs treated as one phrasal verb so the following NP is a
// direct object instead of starting a prepositional phrase.
inline const std::unordered_set<std::string>& phrasal_verbs() {
  static const std::unordered_set<std::string> s = {
      "turn in", "turned in", "turn off", "turned off", "turn on", "turned on",
      "pick up", "picked up", "give up", "gave up", "wake up", "woke up",
      "get up", "put off", "put on"};
  return s;
}

}  // namespace tagset

// --- tokenizer ----------------------------------------------------------------

namespace detail {

inline bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

// Collapses U+2019 to ASCII apostrophe so contraction handling is uniform.
inline std::string normalize_quotes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        static_cast<unsigned char>(text[i + 2]) == 0x99) {
      out.push_back('\'');
      i += 2;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

inline std::string norm_of(std::string_view surface, bool is_punct) {
  if (is_punct) return std::string(surface);
  std::string out;
  out.reserve(surface.size());
  for (char c : surface) {
    if (c == '\'') continue;
    unsigned char u = static_cast<unsigned char>(c);
    out.push_back(u < 0x80 ? static_cast<char>(std::tolower(u)) : c);
  }
  return out;
}

}  // namespace detail

// Whitespace and punctuation-boundary tokenization. Word-internal
// apostrophes stay inside the token ("can't" is one token); every other
// non-word character becomes a single-character PUNCT token.
inline std::vector<Token> tokenize(std::string_view text) {
  std::string s = detail::normalize_quotes(text);
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (detail::is_word_byte(c)) {
      std::size_t j = i + 1;
      while (j < s.size()) {
        unsigned char d = static_cast<unsigned char>(s[j]);
        if (detail::is_word_byte(d)) {
          ++j;
        } else if (d == '\'' && j + 1 < s.size() &&
                   detail::is_word_byte(static_cast<unsigned char>(s[j + 1]))) {
          j += 2;
        } else {
          break;
        }
      }
      Token t;
      t.surface = s.substr(i, j - i);
      t.norm = detail::norm_of(t.surface, false);
      t.is_negator = tagset::negators().count(t.norm) > 0;
      out.push_back(std::move(t));
      i = j;
    } else {
      Token t;
      t.surface = s.substr(i, 1);
      t.norm = t.surface;
      t.pos = Pos::Punct;
      out.push_back(std::move(t));
      ++i;
    }
  }
  return out;
}

// --- tagger -------------------------------------------------------------------

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

inline bool has_suffix(std::string_view s, std::string_view suf) {
  return s.size() > suf.size() && s.substr(s.size() - suf.size()) == suf;
}

}  // namespace detail

// Rule-based tagger: closed-class lookup, open-class verb/adjective lists,
// suffix heuristics, default NOUN, then a context pass that resolves "to",
// possessive "her", demonstratives, post-determiner verb demotion and
// gerund-as-noun positions.
inline void pos_tag(std::vector<Token>& tokens) {
  using namespace tagset;
  // pass 1: context-free assignment
  for (auto& t : tokens) {
    if (t.pos == Pos::Punct) continue;
    const std::string& w = t.norm;
    if (detail::all_digits(w)) { t.pos = Pos::Num; continue; }
    if (w == "to") { t.pos = Pos::Prep; continue; }  // resolved in pass 2
    if (w == "her" || w == "that" || w == "this" || w == "these" || w == "those") {
      t.pos = Pos::Det;  // resolved in pass 2
      continue;
    }
    if (aux_verbs().count(w)) { t.pos = Pos::Aux; continue; }
    if (w == "not" || w == "never") { t.pos = Pos::Adv; continue; }
    if (w == "no") { t.pos = Pos::Det; continue; }
    if (pronouns().count(w)) { t.pos = Pos::Pron; continue; }
    if (possessive_dets().count(w)) { t.pos = Pos::Det; continue; }
    if (determiners().count(w)) { t.pos = Pos::Det; continue; }
    if (prepositions().count(w)) { t.pos = Pos::Prep; continue; }
    if (conjunctions().count(w)) { t.pos = Pos::Conj; continue; }
    if (adverbs().count(w)) { t.pos = Pos::Adv; continue; }
    if (verbs().count(w)) { t.pos = Pos::Verb; continue; }
    if (adjectives().count(w)) { t.pos = Pos::Adj; continue; }
    if (detail::has_suffix(w, "ly") && w.size() >= 4) { t.pos = Pos::Adv; continue; }
    if ((detail::has_suffix(w, "ful") || detail::has_suffix(w, "ous") ||
         detail::has_suffix(w, "ible") || detail::has_suffix(w, "able")) && w.size() >= 5) {
      t.pos = Pos::Adj;
      continue;
    }
    if (detail::has_suffix(w, "ed") && w.size() >= 4) { t.pos = Pos::Verb; continue; }
    if (detail::has_suffix(w, "ing") && w.size() >= 5) { t.pos = Pos::Verb; continue; }
    if (detail::has_suffix(w, "s") && w.size() >= 3 && verbs().count(w.substr(0, w.size() - 1))) {
      t.pos = Pos::Verb;
      continue;
    }
    t.pos = Pos::Noun;
  }

  auto next_non_adv = [&](std::size_t i) -> std::size_t {
    for (std::size_t j = i + 1; j < tokens.size(); ++j)
      if (tokens[j].pos != Pos::Adv) return j;
    return npos_index;
  };

  // pass 2a: "to" is PART before a verb or auxiliary (split infinitives
  // allowed), PREP otherwise.
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].norm != "to" || tokens[i].pos == Pos::Punct) continue;
    std::size_t j = next_non_adv(i);
    if (j != npos_index && (tokens[j].pos == Pos::Verb || tokens[j].pos == Pos::Aux))
      tokens[i].pos = Pos::Part;
  }

  // pass 2b: possessive "her" and demonstratives
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& w = tokens[i].norm;
    if (tokens[i].pos != Pos::Det) continue;
    if (w != "her" && w != "that" && w != "this" && w != "these" && w != "those") continue;
    bool nominal_next = i + 1 < tokens.size() &&
                        (tokens[i + 1].pos == Pos::Noun || tokens[i + 1].pos == Pos::Adj ||
                         tokens[i + 1].pos == Pos::Num);
    if (nominal_next) continue;  // keep DET
    if (w == "her") tokens[i].pos = Pos::Pron;
    else if (w == "that" && i + 1 < tokens.size() &&
             (tokens[i + 1].pos == Pos::Pron || tokens[i + 1].pos == Pos::Det))
      tokens[i].pos = Pos::Conj;
    else
      tokens[i].pos = Pos::Pron;
  }

  // pass 2c: verbs demoted to nouns after a determiner, adjective or real
  // preposition ("a walk", "after work")
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (tokens[i].pos != Pos::Verb) continue;
    Pos prev = tokens[i - 1].pos;
    if (prev == Pos::Det || prev == Pos::Adj || prev == Pos::Prep) tokens[i].pos = Pos::Noun;
  }

  // pass 2d: gerunds act as nouns sentence-initially ("Driving in the rain")
  // and directly after a lexical verb ("stop smoking")
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].pos != Pos::Verb || !detail::has_suffix(tokens[i].norm, "ing")) continue;
    if (i == 0) { tokens[i].pos = Pos::Noun; continue; }
    if (tokens[i - 1].pos == Pos::Verb) tokens[i].pos = Pos::Noun;
  }
}

// --- chunker ------------------------------------------------------------------

namespace detail {

inline bool is_participle_form(const std::string& norm) {
  return tagset::participles().count(norm) ||
         (has_suffix(norm, "ed") && norm.size() >= 4) ||
         (has_suffix(norm, "en") && norm.size() >= 4);
}

inline bool is_phrasal(const std::string& verb, const std::string& prt) {
  return tagset::phrasal_verbs().count(verb + " " + prt) > 0;
}

}  // namespace detail

// NP = optional determiner + modifier run + noun/pronoun head;
// VP = optional "to" + auxiliaries/negators/adverbs + verb head (+ particle);
// an auxiliary chain with no verb head is an AuxVP (head = last auxiliary).
// PP = preposition + following NP.
inline std::vector<Chunk> chunk(const std::vector<Token>& tokens) {
  std::vector<Chunk> chunks;
  const std::size_t n = tokens.size();

  auto try_np = [&](std::size_t i, Chunk& out) -> bool {
    std::size_t j = i;
    bool det_start = false;
    if (tokens[j].pos == Pos::Det) {
      det_start = true;
      ++j;
      if (j >= n) return false;
    }
    // modifier run: adjectives, nouns, numbers; adverbs allowed when they
    // modify a following adjective ("a really nice talk")
    std::size_t last_noun = npos_index, last_num = npos_index;
    std::size_t k = j;
    while (k < n) {
      Pos p = tokens[k].pos;
      if (p == Pos::Noun) { last_noun = k; ++k; }
      else if (p == Pos::Adj) { ++k; }
      else if (p == Pos::Num) { last_num = k; ++k; }
      else if (p == Pos::Adv && k + 1 < n && tokens[k + 1].pos == Pos::Adj) { ++k; }
      else break;
    }
    std::size_t head;
    if (last_noun != npos_index) head = last_noun;
    else if (last_num != npos_index) head = last_num;
    else if (tokens[j].pos == Pos::Pron) head = j;
    else return false;
    out.kind = ChunkKind::NP;
    out.begin = i;
    out.end = head + 1;
    out.head_index = head;
    out.possessive_first = det_start && tagset::possessive_dets().count(tokens[i].norm) > 0;
    // contextual possessive "her"
    if (det_start && tokens[i].norm == "her") out.possessive_first = true;
    return true;
  };

  auto try_vp = [&](std::size_t i, Chunk& out) -> bool {
    std::size_t j = i;
    bool has_to = false;
    if (tokens[j].pos == Pos::Part && tokens[j].norm == "to") {
      has_to = true;
      ++j;
    }
    bool negated = false, be_seen = false;
    std::size_t aux_count = 0, last_aux = npos_index;
    while (j < n) {
      const Token& t = tokens[j];
      if (t.pos == Pos::Aux) {
        ++aux_count;
        last_aux = j;
        if (tagset::be_forms().count(t.norm)) be_seen = true;
        if (t.is_negator) negated = true;
        ++j;
      } else if (t.pos == Pos::Adv) {
        if (t.is_negator) negated = true;
        ++j;
      } else {
        break;
      }
    }
    if (j < n && tokens[j].pos == Pos::Verb) {
      std::size_t head = j;
      std::size_t end = j + 1;
      std::size_t particle = npos_index;
      if (end < n && tokens[end].pos == Pos::Prep &&
          detail::is_phrasal(tokens[head].norm, tokens[end].norm)) {
        // only attach the particle when an NP follows it
        Chunk probe;
        if (end + 1 < n && try_np(end + 1, probe)) {
          particle = end;
          ++end;
        }
      }
      if (i > 0 && tokens[i - 1].is_negator) negated = true;
      out.kind = ChunkKind::VP;
      out.begin = i;
      out.end = end;
      out.head_index = head;
      out.particle = particle;
      out.negated = negated;
      out.has_aux = aux_count > 0;
      if (has_to) out.voice = Voice::Infinitive;
      else if (be_seen && detail::is_participle_form(tokens[head].norm)) out.voice = Voice::Passive;
      else out.voice = Voice::Active;
      return true;
    }
    if (aux_count > 0 && !has_to) {
      // auxiliary as main verb: "had a glass", "THERE IS a party"
      if (i > 0 && tokens[i - 1].is_negator) negated = true;
      out.kind = ChunkKind::VP;
      out.begin = i;
      out.end = last_aux + 1;
      out.head_index = last_aux;
      out.particle = npos_index;
      out.negated = negated;
      out.has_aux = true;
      out.voice = Voice::None;
      return true;
    }
    return false;
  };

  std::size_t i = 0;
  while (i < n) {
    Pos p = tokens[i].pos;
    Chunk c;
    bool vp_start = p == Pos::Verb || p == Pos::Aux || p == Pos::Adv ||
                    (p == Pos::Part && tokens[i].norm == "to");
    if (vp_start && try_vp(i, c)) {
      chunks.push_back(c);
      i = c.end;
      continue;
    }
    bool np_start = p == Pos::Det || p == Pos::Adj || p == Pos::Noun || p == Pos::Pron || p == Pos::Num;
    if (np_start && try_np(i, c)) {
      chunks.push_back(c);
      i = c.end;
      continue;
    }
    ++i;
  }

  // PP sweep: free prepositions followed by an NP chunk
  std::vector<Chunk> pps;
  for (const auto& np : chunks) {
    if (np.kind != ChunkKind::NP || np.begin == 0) continue;
    std::size_t p = np.begin - 1;
    bool inside_vp = false;
    for (const auto& vc : chunks)
      if (vc.kind == ChunkKind::VP && p >= vc.begin && p < vc.end) { inside_vp = true; break; }
    if (inside_vp) continue;
    if (tokens[p].pos == Pos::Prep) {
      Chunk pp;
      pp.kind = ChunkKind::PP;
      pp.begin = p;
      pp.end = np.end;
      pp.head_index = p;
      pps.push_back(pp);
    }
  }
  chunks.insert(chunks.end(), pps.begin(), pps.end());
  std::sort(chunks.begin(), chunks.end(), [](const Chunk& a, const Chunk& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  return chunks;
}

inline ParsedSentence parse_sentence(const std::string& text, PolarityLabel label,
                                     const std::string& id = "") {
  ParsedSentence s;
  s.id = id;
  s.label = label;
  s.tokens = tokenize(text);
  pos_tag(s.tokens);
  s.chunks = chunk(s.tokens);
  return s;
}

inline std::vector<ParsedSentence> parse_labeled(const std::vector<LabeledSentence>& sentences) {
  std::vector<ParsedSentence> out;
  out.reserve(sentences.size());
  for (const auto& ls : sentences) {
    out.push_back(parse_sentence(ls.text, ls.label,
                                 ls.post_id + ":" + std::to_string(ls.sentence_index)));
  }
  return out;
}

// --- pre-tagged interchange format ---------------------------------------------
//
// One token per line "surface<TAB>POS", blank line between sentences,
// "#label=positive|negative" before a sentence sets its label, "#id=..."
// optionally names it. Chunking is still applied on load.

inline std::vector<ParsedSentence> parse_pretagged(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pre-tagged file: " + path);
  std::vector<ParsedSentence> out;
  ParsedSentence cur;
  PolarityLabel pending_label = PolarityLabel::Neutral;
  std::string pending_id;
  std::string line;
  int line_no = 0;
  auto flush = [&]() {
    if (cur.tokens.empty()) return;
    cur.label = pending_label;
    cur.id = pending_id;
    cur.chunks = chunk(cur.tokens);
    out.push_back(std::move(cur));
    cur = ParsedSentence{};
    pending_label = PolarityLabel::Neutral;
    pending_id.clear();
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) { flush(); continue; }
    if (t.rfind("#label=", 0) == 0) {
      pending_label = polarity_from_string(t.substr(7));
      continue;
    }
    if (t.rfind("#id=", 0) == 0) {
      pending_id = t.substr(4);
      continue;
    }
    if (t[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected surface<TAB>POS");
    Token tok;
    tok.surface = line.substr(0, tab);
    tok.norm = detail::norm_of(tok.surface, false);
    try {
      tok.pos = pos_from_name(trim(line.substr(tab + 1)));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (tok.pos == Pos::Punct) tok.norm = tok.surface;
    tok.is_negator = tagset::negators().count(tok.norm) > 0;
    cur.tokens.push_back(std::move(tok));
  }
  flush();
  return out;
}

inline std::string format_pretagged(const std::vector<ParsedSentence>& sentences) {
  std::ostringstream out;
  for (const auto& s : sentences) {
    if (!s.id.empty()) out << "#id=" << s.id << "\n";
    out << "#label=" << to_string(s.label) << "\n";
    for (const auto& t : s.tokens) out << t.surface << "\t" << pos_name(t.pos) << "\n";
    out << "\n";
  }
  return out.str();
}

inline void export_pretagged(const std::string& path, const std::vector<ParsedSentence>& sentences) {
  write_file(path, format_pretagged(sentences));
}

}  // namespace wbtk

#endif  // WBTK_TEXT_HPP
