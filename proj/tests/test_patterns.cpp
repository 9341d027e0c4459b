#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "pattern_fixtures.hpp"
#include "wbtk/lexicons.hpp"
#include "wbtk/patterns.hpp"
#include "wbtk/synth.hpp"

using namespace wbtk;

namespace {

const std::string kDataDir = WBTK_DATA_DIR;

std::vector<PatternKey> keys_of(const ParsedSentence& s) {
  std::vector<PatternKey> out;
  for (const auto& inst : instantiate(s)) out.push_back(inst.key);
  return out;
}

bool has_pattern(const std::vector<PatternKey>& keys, int template_id,
                 const std::string& display) {
  for (const auto& k : keys)
    if (k.template_id == template_id && pattern_display(k) == display) return true;
  return false;
}

std::string describe(const std::vector<PatternKey>& keys) {
  std::vector<std::string> parts;
  for (const auto& k : keys)
    parts.push_back("t" + std::to_string(k.template_id) + ":" + pattern_display(k));
  return join(parts, " | ");
}

// Parsed, labeled sentences of a synthetic corpus, neutral posts dropped.
std::vector<ParsedSentence> synth_sentences(std::uint64_t seed, double reflection_rate = 0.0) {
  SyntheticSpec spec;
  spec.n_pos = 40;
  spec.n_neg = 40;
  spec.seed = seed;
  spec.reflection_rate = reflection_rate;
  auto result = synthesize(spec);
  const auto& posts = result.first;
  std::vector<ParsedSentence> out;
  for (const auto& lp : label_corpus(posts)) {
    if (lp.label == PolarityLabel::Neutral || lp.post.kind != PostKind::Recording) continue;
    for (const auto& ls : sentence_split(lp.post, lp.label)) {
      out.push_back(parse_sentence(ls.text, ls.label,
                                   ls.post_id + ":" + std::to_string(ls.sentence_index)));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("each syntactic template fires on its reference sentence") {
  for (const auto& c : fixtures::template_cases()) {
    auto s = parse_sentence(c.text, PolarityLabel::Positive, "fix");
    auto keys = keys_of(s);
    INFO("template " << c.template_id << " expected " << c.display << " in: " << c.text);
    INFO("got: " << describe(keys));
    CHECK(has_pattern(keys, c.template_id, c.display));
  }
}

TEST_CASE("named patterns emerge from their source sentences") {
  auto food = Gazetteer::load(kDataDir + "/food.txt");
  for (const auto& c : fixtures::named_pattern_cases()) {
    auto s = food.collapse(parse_sentence(c.text, c.label, "fix"));
    auto keys = keys_of(s);
    INFO("expected t" << c.template_id << " " << c.display << " in: " << c.text);
    INFO("got: " << describe(keys));
    CHECK(has_pattern(keys, c.template_id, c.display));
  }
}

TEST_CASE("pattern statistics equal a flat recount over the corpus") {
  for (std::uint64_t seed : {11u, 22u, 33u, 44u, 55u}) {
    auto sentences = synth_sentences(seed);
    REQUIRE(sentences.size() <= 200);

    PatternTable table;
    for (const auto& s : sentences) table.add(s);

    // Naive recount: walk every sentence again and tally per key from scratch.
    std::map<PatternKey, std::size_t> pos, neg;
    std::map<PatternKey, std::set<std::string>> pos_ids, neg_ids;
    std::map<PatternKey, std::string> first_id;
    for (const auto& s : sentences) {
      for (const auto& inst : instantiate(s)) {
        if (s.label == PolarityLabel::Positive) {
          ++pos[inst.key];
          pos_ids[inst.key].insert(s.id);
        } else {
          ++neg[inst.key];
          neg_ids[inst.key].insert(s.id);
        }
        auto it = first_id.find(inst.key);
        if (it == first_id.end() || s.id < it->second) first_id[inst.key] = s.id;
      }
    }

    std::set<PatternKey> all_keys;
    for (const auto& [k, v] : pos) all_keys.insert(k);
    for (const auto& [k, v] : neg) all_keys.insert(k);
    auto stats = table.all();
    REQUIRE(stats.size() == all_keys.size());

    for (const auto& st : stats) {
      CAPTURE(seed, pattern_display(st.key));
      CHECK(st.pos_count == (pos.count(st.key) ? pos[st.key] : 0));
      CHECK(st.neg_count == (neg.count(st.key) ? neg[st.key] : 0));
      CHECK(st.freq == st.pos_count + st.neg_count);
      CHECK(st.pos_sentences == pos_ids[st.key]);
      CHECK(st.neg_sentences == neg_ids[st.key]);
      CHECK(st.example_id == first_id[st.key]);
      CHECK(st.p_pos() + st.p_neg() == 1.0);
    }
  }
}

TEST_CASE("neutral sentences never reach the pattern table") {
  auto s = parse_sentence("I had to clean the bathroom.", PolarityLabel::Neutral, "n:0");
  PatternTable table;
  table.add(s);
  CHECK(table.size() == 0);
}

TEST_CASE("selection applies both thresholds to each class") {
  std::vector<PatternStats> stats(3);
  stats[0].key = {2, {"feel"}, "subj"};
  stats[0].pos_count = 9;
  stats[0].neg_count = 1;
  stats[0].freq = 10;
  stats[1].key = {2, {"cry"}, "subj"};
  stats[1].pos_count = 0;
  stats[1].neg_count = 2;
  stats[1].freq = 2;
  stats[2].key = {2, {"sit"}, "subj"};
  stats[2].pos_count = 3;
  stats[2].neg_count = 3;
  stats[2].freq = 6;

  auto sel = select_patterns(stats, 2, 0.75);
  CHECK(sel.positive == std::set<PatternKey>{stats[0].key});
  CHECK(sel.negative == std::set<PatternKey>{stats[1].key});

  auto strict = select_patterns(stats, 3, 0.75);
  CHECK(strict.negative.empty());  // freq 2 falls under theta_f 3
  CHECK(strict.positive == std::set<PatternKey>{stats[0].key});

  auto loose = select_patterns(stats, 2, 0.5);
  CHECK(loose.positive.count(stats[2].key) == 1);  // 0.5 >= 0.5 on both sides
  CHECK(loose.negative.count(stats[2].key) == 1);
}

TEST_CASE("selected sets shrink as thresholds tighten") {
  Rng rng(424242);
  for (int table = 0; table < 50; ++table) {
    std::vector<PatternStats> stats(20 + rng.below(60));
    for (std::size_t i = 0; i < stats.size(); ++i) {
      stats[i].key = {2, {"w" + std::to_string(i)}, "subj"};
      stats[i].pos_count = rng.below(12);
      stats[i].neg_count = rng.below(12);
      stats[i].freq = stats[i].pos_count + stats[i].neg_count;
    }
    for (int trial = 0; trial < 20; ++trial) {
      std::size_t f1 = 1 + rng.below(10);
      std::size_t f2 = f1 + rng.below(10);
      double p1 = 0.5 + 0.05 * rng.below(10);
      double p2 = std::min(1.0, p1 + 0.05 * rng.below(10));
      auto loose = select_patterns(stats, f1, p1);
      auto tight = select_patterns(stats, f2, p2);
      CAPTURE(table, f1, f2, p1, p2);
      CHECK(tight.positive.size() <= loose.positive.size());
      CHECK(tight.negative.size() <= loose.negative.size());
      for (const auto& k : tight.positive) CHECK(loose.positive.count(k) == 1);
      for (const auto& k : tight.negative) CHECK(loose.negative.count(k) == 1);
    }
  }
}

TEST_CASE("majority vote classification breaks ties toward the majority class") {
  SelectedPatterns sel;
  PatternKey kp{2, {"smile"}, "subj"};
  PatternKey kn{2, {"cry"}, "subj"};
  sel.positive = {kp};
  sel.negative = {kn};
  CHECK(classify_by_patterns({kp}, sel, PolarityLabel::Negative) == PolarityLabel::Positive);
  CHECK(classify_by_patterns({kn}, sel, PolarityLabel::Positive) == PolarityLabel::Negative);
  CHECK(classify_by_patterns({kp, kn}, sel, PolarityLabel::Negative) == PolarityLabel::Negative);
  CHECK(classify_by_patterns({}, sel, PolarityLabel::Positive) == PolarityLabel::Positive);
}

TEST_CASE("threshold sweep matches an exhaustive per-cell re-evaluation") {
  auto sentences = synth_sentences(7);
  PatternTable table;
  std::vector<std::vector<PatternKey>> keys;
  std::vector<PolarityLabel> gold;
  std::size_t n_pos = 0;
  for (const auto& s : sentences) {
    table.add(s);
    keys.push_back(keys_of(s));
    gold.push_back(s.label);
    if (s.label == PolarityLabel::Positive) ++n_pos;
  }
  PolarityLabel majority =
      n_pos * 2 >= gold.size() ? PolarityLabel::Positive : PolarityLabel::Negative;

  std::vector<std::size_t> freq_grid = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> prob_grid = default_prob_grid();
  auto stats = table.all();
  auto outcome = sweep_thresholds(stats, keys, gold, freq_grid, prob_grid, majority);
  REQUIRE(outcome.cells.size() == freq_grid.size() * prob_grid.size());

  // Independent re-evaluation: recompute each cell with hand-rolled
  // confusion arithmetic rather than the shared scorer.
  std::size_t cell_idx = 0;
  SweepCell best{};
  bool first = true;
  for (std::size_t f : freq_grid) {
    for (double p : prob_grid) {
      auto sel = select_patterns(stats, f, p);
      double tp = 0, fp = 0, fn = 0, tn = 0;
      for (std::size_t i = 0; i < gold.size(); ++i) {
        std::size_t ph = 0, nh = 0;
        for (const auto& k : keys[i]) {
          if (sel.positive.count(k)) ++ph;
          if (sel.negative.count(k)) ++nh;
        }
        PolarityLabel pred = ph > nh ? PolarityLabel::Positive
                             : nh > ph ? PolarityLabel::Negative
                                       : majority;
        bool gold_pos = gold[i] == PolarityLabel::Positive;
        bool pred_pos = pred == PolarityLabel::Positive;
        if (gold_pos && pred_pos) ++tp;
        else if (!gold_pos && pred_pos) ++fp;
        else if (gold_pos && !pred_pos) ++fn;
        else ++tn;
      }
      auto f1_of = [](double tp_, double fp_, double fn_) {
        double prec = tp_ + fp_ > 0 ? tp_ / (tp_ + fp_) : 0.0;
        double rec = tp_ + fn_ > 0 ? tp_ / (tp_ + fn_) : 0.0;
        return prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
      };
      double f1_pos = f1_of(tp, fp, fn);
      double f1_neg = f1_of(tn, fn, fp);
      double support_pos = tp + fn, support_neg = tn + fp;
      double wf1 = (f1_pos * support_pos + f1_neg * support_neg) / (support_pos + support_neg);

      const SweepCell& cell = outcome.cells[cell_idx++];
      CAPTURE(f, p);
      CHECK(cell.theta_f == f);
      CHECK(cell.theta_p == p);
      CHECK(cell.selected_pos == sel.positive.size());
      CHECK(cell.selected_neg == sel.negative.size());
      CHECK_THAT(cell.weighted_f1, Catch::Matchers::WithinAbs(wf1, 1e-12));

      SweepCell mine{f, p, wf1, sel.positive.size(), sel.negative.size()};
      if (first || mine.weighted_f1 > best.weighted_f1) {
        best = mine;
        first = false;
      }
    }
  }
  CHECK(outcome.best.theta_f == best.theta_f);
  CHECK(outcome.best.theta_p == best.theta_p);
  CHECK_THAT(outcome.best.weighted_f1, Catch::Matchers::WithinAbs(best.weighted_f1, 1e-12));
}

TEST_CASE("sweep rejects mismatched inputs and empty grids") {
  std::vector<PatternStats> stats;
  std::vector<std::vector<PatternKey>> keys(2);
  std::vector<PolarityLabel> gold(3, PolarityLabel::Positive);
  CHECK_THROWS_AS(sweep_thresholds(stats, keys, gold, {2}, {0.6}, PolarityLabel::Positive),
                  ConfigError);
  gold.resize(2);
  CHECK_THROWS_AS(sweep_thresholds(stats, keys, gold, {}, {}, PolarityLabel::Positive),
                  ConfigError);
}

TEST_CASE("family queries anchor and count occurrences versus sentences") {
  PatternTable table;
  auto add = [&](const std::string& text, PolarityLabel label, const std::string& id) {
    table.add(parse_sentence(text, label, id));
  };
  add("I can't sleep.", PolarityLabel::Negative, "a:0");
  add("I can't sleep.", PolarityLabel::Negative, "a:0");  // same sentence seen twice
  add("I can't focus.", PolarityLabel::Negative, "b:0");
  add("I slept well.", PolarityLabel::Positive, "c:0");

  auto stats = table.all();
  auto rep = report_family(stats, "^NOT_");
  CHECK(rep.neg_types == 2);
  CHECK(rep.pos_types == 0);
  CHECK(rep.neg_occurrences == 3);
  CHECK(rep.neg_sentences == 2);  // the duplicate collapses in the sentence count

  CHECK(family_query_matches("^NOT_", "NOT_SLEEP"));
  CHECK_FALSE(family_query_matches("^NOT_", "DID_NOT_SLEEP"));
  CHECK(family_query_matches("_WITH$", "SPEND_WITH"));
  CHECK_FALSE(family_query_matches("_WITH$", "WITH_FRIENDS"));
  CHECK(family_query_matches("not_", "GOT_NOT_X"));  // case-insensitive, unanchored
  CHECK(family_query_matches("^EAT$", "EAT"));
  CHECK_FALSE(family_query_matches("^EAT$", "EATING"));
  CHECK_FALSE(family_query_matches("", "EAT"));
}

TEST_CASE("pattern report lines carry counts and class probability") {
  PatternTable table;
  table.add(parse_sentence("I finished my paper.", PolarityLabel::Positive, "p:0"));
  auto text = format_pattern_report(table.ranked());
  CHECK(text.rfind("template_id\tpattern\tslot\tfreq", 0) == 0);
  CHECK(text.find("FINISHED") != std::string::npos);
  CHECK(text.find("1.0000") != std::string::npos);
  CHECK(text.find("p:0") != std::string::npos);
}

TEST_CASE("ranked order is purity first, then frequency, then key") {
  PatternTable table;
  table.add(parse_sentence("I finished my paper.", PolarityLabel::Positive, "a:0"));
  table.add(parse_sentence("I finished my paper.", PolarityLabel::Positive, "b:0"));
  table.add(parse_sentence("I missed the bus.", PolarityLabel::Negative, "c:0"));
  table.add(parse_sentence("I missed the bus.", PolarityLabel::Positive, "d:0"));
  auto ranked = table.ranked();
  REQUIRE(ranked.size() >= 2);
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    double prev = std::max(ranked[i - 1].p_pos(), ranked[i - 1].p_neg());
    double cur = std::max(ranked[i].p_pos(), ranked[i].p_neg());
    CHECK(prev >= cur);
    if (prev == cur) CHECK(ranked[i - 1].freq >= ranked[i].freq);
  }
}
