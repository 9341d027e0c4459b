#ifndef WBTK_PIPELINE_HPP
#define WBTK_PIPELINE_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wbtk/corpus.hpp"
#include "wbtk/eval.hpp"
#include "wbtk/features.hpp"
#include "wbtk/lexicons.hpp"
#include "wbtk/model.hpp"
#include "wbtk/patterns.hpp"
#include "wbtk/synth.hpp"
#include "wbtk/text.hpp"
#include "wbtk/util.hpp"

namespace wbtk {

// --- Config file --------------------------------------------------------
//
// Flat key = value lines, # comments, optional double quotes around the
// value. Keys use the flag spelling without the leading dashes; dashes and
// underscores are interchangeable.

class Config {
 public:
  static Config from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    Config cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string s = strip_comment(line);
      s = trim(s);
      if (s.empty()) continue;
      auto eq = s.find('=');
      if (eq == std::string::npos)
        throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
      std::string key = trim(s.substr(0, eq));
      std::string value = trim(s.substr(eq + 1));
      if (key.empty())
        throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
        value = value.substr(1, value.size() - 2);
      cfg.set(key, value);
    }
    return cfg;
  }

  void set(const std::string& key, const std::string& value) { values_[normalize(key)] = value; }
  bool has(const std::string& key) const { return values_.count(normalize(key)) > 0; }

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(normalize(key));
    return it == values_.end() ? fallback : it->second;
  }

  std::string require(const std::string& key, const std::string& stage) const {
    auto it = values_.find(normalize(key));
    if (it == values_.end() || it->second.empty())
      throw ConfigError(stage + ": missing required option --" + normalize(key));
    return it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(normalize(key));
    if (it == values_.end()) return fallback;
    try {
      std::size_t used = 0;
      double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("option --" + normalize(key) + ": not a number: " + it->second);
    }
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(normalize(key));
    if (it == values_.end()) return fallback;
    try {
      std::size_t used = 0;
      long long v = std::stoll(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("option --" + normalize(key) + ": not an integer: " + it->second);
    }
  }

  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const {
    std::int64_t v = get_int(key, static_cast<std::int64_t>(fallback));
    if (v < 0) throw ConfigError("option --" + normalize(key) + ": must be non-negative");
    return static_cast<std::uint64_t>(v);
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  static std::string normalize(const std::string& key) {
    std::string out = key;
    for (auto& c : out)
      if (c == '-') c = '_';
    return out;
  }

  static std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      else if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
  }

  std::map<std::string, std::string> values_;
};

// --- Manifests ------------------------------------------------------------
//
// Every stage records what it read and wrote, keyed by content hash, plus
// its parameters and seed. No clocks: reruns are byte-identical.

inline std::string dir_of(const std::string& path) {
  auto slash = path.find_last_of('/');
  if (slash == std::string::npos) return ".";
  if (slash == 0) return "/";
  return path.substr(0, slash);
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir + ": " + ec.message());
}

inline nlohmann::json hash_entries(const std::vector<std::string>& paths) {
  nlohmann::json obj = nlohmann::json::object();
  for (const auto& p : paths) obj[p] = "fnv1a64:" + fnv1a64_hex(read_file(p));
  return obj;
}

inline std::string write_manifest(const std::string& stage, const std::string& out_dir,
                                  const nlohmann::json& params,
                                  const std::vector<std::string>& inputs,
                                  const std::vector<std::string>& outputs, std::uint64_t seed) {
  nlohmann::json m;
  m["stage"] = stage;
  m["version"] = 1;
  m["seed"] = seed;
  m["params"] = params;
  m["inputs"] = hash_entries(inputs);
  m["outputs"] = hash_entries(outputs);
  std::string path = out_dir + "/" + stage + ".manifest.json";
  write_file(path, m.dump(2) + "\n");
  return path;
}

// --- Labeled corpus I/O -----------------------------------------------------
//
// Same JSONL shape as the raw corpus with one extra "label" key.

inline void save_labeled(const std::string& path, const std::vector<LabeledPost>& posts) {
  std::ostringstream out;
  for (const auto& lp : posts) {
    nlohmann::json j = post_to_json(lp.post);
    j["label"] = to_string(lp.label);
    out << j.dump() << "\n";
  }
  write_file(path, out.str());
}

inline std::vector<LabeledPost> load_labeled(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open labeled corpus: " + path);
  std::vector<LabeledPost> posts;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      LabeledPost lp;
      lp.post = post_from_json(j);
      lp.label = polarity_from_string(j.at("label").get<std::string>());
      posts.push_back(std::move(lp));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return posts;
}

inline std::string format_stats(const SplitStats& stats) {
  std::ostringstream out;
  out << "split      class     posts  sentences\n";
  for (const auto& [split, classes] : stats.by_split) {
    for (const auto& [cls, counts] : classes) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%-10s %-9s %5zu  %9zu\n", split.c_str(), cls.c_str(),
                    counts.posts, counts.sentences);
      out << buf;
    }
  }
  return out.str();
}

// --- Stage runners ----------------------------------------------------------

struct StageResult {
  std::string summary;
  std::vector<std::string> outputs;
  std::string manifest;
};

struct SynthArgs {
  SyntheticSpec spec;
  std::string out;  // corpus JSONL; the log lands next to it
};

inline StageResult run_synth(const SynthArgs& args) {
  if (args.out.empty()) throw ConfigError("synth: missing required option --out");
  args.spec.validate();
  auto [posts, log] = synthesize(args.spec);
  ensure_dir(dir_of(args.out));
  save_corpus(args.out, posts);
  std::string log_path = dir_of(args.out) + "/synth_log.json";
  write_file(log_path, log.to_json().dump(2) + "\n");
  nlohmann::json params{{"n_pos", args.spec.n_pos},
                        {"n_neg", args.spec.n_neg},
                        {"obligation_rate", args.spec.obligation_rate},
                        {"connection_rate", args.spec.connection_rate},
                        {"reflection_rate", args.spec.reflection_rate},
                        {"out", args.out}};
  std::string manifest =
      write_manifest("synth", dir_of(args.out), params, {}, {args.out, log_path}, args.spec.seed);
  std::ostringstream summary;
  summary << "wrote " << posts.size() << " posts (" << log.pos_posts << " positive, "
          << log.neg_posts << " negative recordings, " << log.reflections << " reflections) to "
          << args.out;
  return {summary.str(), {args.out, log_path}, manifest};
}

struct IngestArgs {
  std::string corpus;
  std::string out;  // labeled JSONL
};

inline StageResult run_ingest(const IngestArgs& args) {
  if (args.corpus.empty()) throw ConfigError("ingest: missing required option --corpus");
  if (args.out.empty()) throw ConfigError("ingest: missing required option --out");
  std::vector<RawPost> posts = load_corpus(args.corpus);
  std::vector<LabeledPost> labeled = label_corpus(posts);
  std::vector<LabeledPost> recordings;
  for (const auto& lp : labeled)
    if (lp.post.kind == PostKind::Recording) recordings.push_back(lp);
  ensure_dir(dir_of(args.out));
  save_labeled(args.out, recordings);
  SplitStats stats = corpus_stats(recordings);
  nlohmann::json params{{"corpus", args.corpus}, {"out", args.out}};
  std::string manifest =
      write_manifest("ingest", dir_of(args.out), params, {args.corpus}, {args.out}, 0);
  return {format_stats(stats), {args.out}, manifest};
}

struct PreprocessArgs {
  std::string labeled;
  std::string out_dir;
  std::size_t train_n = 0;
  std::size_t test_n = 0;
  std::uint64_t seed = 1;
};

// Post-level split, then sentence split + parse; each half lands as a
// pre-tagged token file so later stages never re-run the tagger.
inline StageResult run_preprocess(const PreprocessArgs& args) {
  if (args.labeled.empty()) throw ConfigError("preprocess: missing required option --labeled");
  if (args.out_dir.empty()) throw ConfigError("preprocess: missing required option --out-dir");
  if (args.train_n == 0 || args.test_n == 0)
    throw ConfigError("preprocess: --train-n and --test-n must be positive");
  std::vector<LabeledPost> posts = load_labeled(args.labeled);
  CorpusSplit split = split_corpus(posts, args.train_n, args.test_n, args.seed);

  auto collect = [&](const std::set<std::string>& ids) {
    std::vector<LabeledSentence> sentences;
    for (const auto& lp : posts) {
      if (!ids.count(lp.post.id)) continue;
      for (auto& s : sentence_split(lp.post, lp.label)) sentences.push_back(std::move(s));
    }
    return parse_labeled(sentences);
  };

  ensure_dir(args.out_dir);
  std::string train_path = args.out_dir + "/train.tsv";
  std::string test_path = args.out_dir + "/test.tsv";
  std::string split_path = args.out_dir + "/split.json";
  std::vector<ParsedSentence> train = collect(split.train);
  std::vector<ParsedSentence> test = collect(split.test);
  export_pretagged(train_path, train);
  export_pretagged(test_path, test);
  nlohmann::json sj;
  sj["seed"] = split.seed;
  sj["train"] = std::vector<std::string>(split.train.begin(), split.train.end());
  sj["test"] = std::vector<std::string>(split.test.begin(), split.test.end());
  sj["held_out"] = std::vector<std::string>(split.held_out.begin(), split.held_out.end());
  write_file(split_path, sj.dump(2) + "\n");

  SplitStats stats = corpus_stats(posts, &split);
  nlohmann::json params{{"labeled", args.labeled},
                        {"train_n", args.train_n},
                        {"test_n", args.test_n},
                        {"out_dir", args.out_dir}};
  std::string manifest = write_manifest("preprocess", args.out_dir, params, {args.labeled},
                                        {train_path, test_path, split_path}, args.seed);
  std::ostringstream summary;
  summary << format_stats(stats) << "train sentences: " << train.size()
          << ", test sentences: " << test.size();
  return {summary.str(), {train_path, test_path, split_path}, manifest};
}

namespace detail {

inline std::vector<ParsedSentence> load_parsed(const std::string& path, const Gazetteer* food) {
  std::vector<ParsedSentence> sentences = parse_pretagged(path);
  if (food) {
    for (auto& s : sentences) s = food->collapse(s);
  }
  return sentences;
}

inline PolarityLabel majority_label(const std::vector<ParsedSentence>& sentences) {
  std::size_t pos = 0, neg = 0;
  for (const auto& s : sentences) {
    if (s.label == PolarityLabel::Positive) ++pos;
    else if (s.label == PolarityLabel::Negative) ++neg;
  }
  return neg > pos ? PolarityLabel::Negative : PolarityLabel::Positive;
}

}  // namespace detail

struct LearnPatternsArgs {
  std::string corpus;  // pre-tagged sentences
  std::string gazetteer;
  std::string out;  // ranked pattern report TSV
};

inline StageResult run_learn_patterns(const LearnPatternsArgs& args) {
  if (args.corpus.empty()) throw ConfigError("learn-patterns: missing required option --corpus");
  if (args.out.empty()) throw ConfigError("learn-patterns: missing required option --out");
  std::optional<Gazetteer> food;
  if (!args.gazetteer.empty()) food = Gazetteer::load(args.gazetteer);
  std::vector<ParsedSentence> sentences =
      detail::load_parsed(args.corpus, food ? &*food : nullptr);
  PatternTable table;
  for (const auto& s : sentences) table.add(s);
  ensure_dir(dir_of(args.out));
  write_file(args.out, format_pattern_report(table.ranked()));
  nlohmann::json params{{"corpus", args.corpus}, {"gazetteer", args.gazetteer}, {"out", args.out}};
  std::vector<std::string> inputs{args.corpus};
  if (!args.gazetteer.empty()) inputs.push_back(args.gazetteer);
  std::string manifest =
      write_manifest("learn-patterns", dir_of(args.out), params, inputs, {args.out}, 0);
  std::ostringstream summary;
  summary << table.all().size() << " pattern types from " << sentences.size() << " sentences";
  return {summary.str(), {args.out}, manifest};
}

struct SweepArgs {
  std::string train;    // pattern statistics come from here
  std::string eval_on;  // optional; default carves a dev slice out of train
  std::string gazetteer;
  std::vector<std::size_t> freq_grid = default_freq_grid();
  std::vector<double> prob_grid = default_prob_grid();
  double dev_fraction = 0.2;
  std::uint64_t seed = 1;
  std::string out_dir;
};

inline StageResult run_sweep(const SweepArgs& args) {
  if (args.train.empty()) throw ConfigError("sweep: missing required option --train");
  if (args.out_dir.empty()) throw ConfigError("sweep: missing required option --out-dir");
  if (args.freq_grid.empty() || args.prob_grid.empty())
    throw ConfigError("sweep: threshold grids must be non-empty");
  if (args.dev_fraction <= 0.0 || args.dev_fraction >= 1.0)
    throw ConfigError("sweep: --dev-fraction must lie in (0, 1)");
  std::optional<Gazetteer> food;
  if (!args.gazetteer.empty()) food = Gazetteer::load(args.gazetteer);
  const Gazetteer* foodp = food ? &*food : nullptr;
  std::vector<ParsedSentence> train = detail::load_parsed(args.train, foodp);

  std::vector<ParsedSentence> stats_half;
  std::vector<ParsedSentence> eval_half;
  if (!args.eval_on.empty()) {
    stats_half = std::move(train);
    eval_half = detail::load_parsed(args.eval_on, foodp);
  } else {
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(args.seed);
    rng.shuffle(order);
    std::size_t dev_n = static_cast<std::size_t>(train.size() * args.dev_fraction);
    if (dev_n == 0 || dev_n >= train.size())
      throw ConfigError("sweep: too few sentences to carve a dev slice");
    std::set<std::size_t> dev_idx(order.begin(), order.begin() + dev_n);
    for (std::size_t i = 0; i < train.size(); ++i)
      (dev_idx.count(i) ? eval_half : stats_half).push_back(train[i]);
  }

  PatternTable table;
  for (const auto& s : stats_half) table.add(s);
  std::vector<std::vector<PatternKey>> instance_keys;
  std::vector<PolarityLabel> gold;
  for (const auto& s : eval_half) {
    std::vector<PatternKey> keys;
    for (auto& inst : instantiate(s)) keys.push_back(std::move(inst.key));
    instance_keys.push_back(std::move(keys));
    gold.push_back(s.label);
  }
  PolarityLabel majority = detail::majority_label(stats_half);
  SweepOutcome outcome = sweep_thresholds(table.all(), instance_keys, gold, args.freq_grid,
                                          args.prob_grid, majority);

  ensure_dir(args.out_dir);
  std::string grid_path = args.out_dir + "/sweep.tsv";
  std::string chosen_path = args.out_dir + "/chosen.json";
  std::ostringstream grid;
  grid << "theta_f\ttheta_p\tweighted_f1\tselected_pos\tselected_neg\n";
  for (const auto& c : outcome.cells)
    grid << c.theta_f << '\t' << format_fixed(c.theta_p, 2) << '\t'
         << format_fixed(c.weighted_f1, 4) << '\t' << c.selected_pos << '\t' << c.selected_neg
         << '\n';
  write_file(grid_path, grid.str());
  nlohmann::json chosen{{"theta_f", outcome.best.theta_f},
                        {"theta_p", outcome.best.theta_p},
                        {"weighted_f1", outcome.best.weighted_f1},
                        {"selected_pos", outcome.best.selected_pos},
                        {"selected_neg", outcome.best.selected_neg}};
  write_file(chosen_path, chosen.dump(2) + "\n");

  nlohmann::json params{{"train", args.train},
                        {"eval_on", args.eval_on},
                        {"gazetteer", args.gazetteer},
                        {"dev_fraction", args.dev_fraction},
                        {"freq_grid", args.freq_grid},
                        {"prob_grid", args.prob_grid}};
  std::vector<std::string> inputs{args.train};
  if (!args.eval_on.empty()) inputs.push_back(args.eval_on);
  if (!args.gazetteer.empty()) inputs.push_back(args.gazetteer);
  std::string manifest = write_manifest("sweep", args.out_dir, params, inputs,
                                        {grid_path, chosen_path}, args.seed);
  std::ostringstream summary;
  summary << "best theta_f=" << outcome.best.theta_f << " theta_p="
          << format_fixed(outcome.best.theta_p, 2) << " weighted F1="
          << format_fixed(outcome.best.weighted_f1, 4) << " (" << outcome.best.selected_pos
          << " positive / " << outcome.best.selected_neg << " negative patterns)";
  return {summary.str(), {grid_path, chosen_path}, manifest};
}

// Lexicon loading shared by the feature-bearing stages. Only the resources a
// scheme actually consumes are required.
struct LexiconPaths {
  std::string frames;
  std::string dict;
  std::string gazetteer;
};

struct LoadedLexicons {
  std::optional<FrameLexicon> frames;
  std::optional<Dictionary> dict;
  std::optional<Gazetteer> food;

  FeatureContext context(const SelectedPatterns* patterns = nullptr) const {
    FeatureContext ctx;
    ctx.frames = frames ? &*frames : nullptr;
    ctx.dict = dict ? &*dict : nullptr;
    ctx.food = food ? &*food : nullptr;
    ctx.patterns = patterns;
    return ctx;
  }
};

inline LoadedLexicons load_lexicons(const LexiconPaths& paths) {
  LoadedLexicons out;
  if (!paths.frames.empty()) out.frames = FrameLexicon::load(paths.frames);
  if (!paths.dict.empty()) out.dict = Dictionary::load(paths.dict);
  if (!paths.gazetteer.empty()) out.food = Gazetteer::load(paths.gazetteer);
  return out;
}

inline SelectedPatterns learn_selected_patterns(const std::vector<ParsedSentence>& train,
                                                const Gazetteer* food, std::size_t theta_f,
                                                double theta_p) {
  PatternTable table;
  for (const auto& s : train) {
    if (food) table.add(food->collapse(s));
    else table.add(s);
  }
  return select_patterns(table.all(), theta_f, theta_p);
}

struct FeaturesArgs {
  std::string scheme;
  std::string train;
  std::string test;  // optional
  LexiconPaths lexicons;
  std::size_t theta_f = 2;   // pattern scheme only
  double theta_p = 0.75;     // pattern scheme only
  std::string out_dir;
};

inline StageResult run_features(const FeaturesArgs& args) {
  if (args.scheme.empty()) throw ConfigError("features: missing required option --scheme");
  if (args.train.empty()) throw ConfigError("features: missing required option --train");
  if (args.out_dir.empty()) throw ConfigError("features: missing required option --out-dir");
  SchemeSpec scheme = scheme_by_name(args.scheme);
  LoadedLexicons lex = load_lexicons(args.lexicons);
  std::vector<ParsedSentence> train = parse_pretagged(args.train);

  SelectedPatterns selected;
  const SelectedPatterns* selp = nullptr;
  if (scheme.kind == Scheme::Pattern) {
    selected = learn_selected_patterns(train, lex.food ? &*lex.food : nullptr, args.theta_f,
                                       args.theta_p);
    selp = &selected;
  }
  FeatureContext ctx = lex.context(selp);

  FeatureSpace space = fit_space(train, scheme, ctx);
  std::vector<FeatureVector> train_vecs = extract(train, scheme, ctx, space);
  ensure_dir(args.out_dir);
  std::string space_path = args.out_dir + "/space.json";
  std::string train_path = args.out_dir + "/train_vectors.tsv";
  space.save(space_path);
  save_vectors(train_path, train_vecs);
  std::vector<std::string> outputs{space_path, train_path};
  std::vector<std::string> inputs{args.train};
  if (!args.test.empty()) {
    std::vector<ParsedSentence> test = parse_pretagged(args.test);
    std::string test_path = args.out_dir + "/test_vectors.tsv";
    save_vectors(test_path, extract(test, scheme, ctx, space));
    outputs.push_back(test_path);
    inputs.push_back(args.test);
  }
  for (const std::string& p : {args.lexicons.frames, args.lexicons.dict, args.lexicons.gazetteer})
    if (!p.empty()) inputs.push_back(p);

  nlohmann::json params{{"scheme", args.scheme},
                        {"theta_f", args.theta_f},
                        {"theta_p", args.theta_p},
                        {"out_dir", args.out_dir}};
  std::string manifest = write_manifest("features", args.out_dir, params, inputs, outputs, 0);
  std::ostringstream summary;
  summary << scheme.name << ": " << space.size() << " features, "
          << format_fixed(density(train_vecs), 2) << " mean counts per train sentence";
  return {summary.str(), outputs, manifest};
}

struct RankArgs {
  std::string vectors;
  std::string space;
  std::size_t top_k = 50;
  std::string out;
};

inline StageResult run_rank(const RankArgs& args) {
  if (args.vectors.empty()) throw ConfigError("rank: missing required option --vectors");
  if (args.space.empty()) throw ConfigError("rank: missing required option --space");
  if (args.out.empty()) throw ConfigError("rank: missing required option --out");
  std::vector<FeatureVector> vectors = load_vectors(args.vectors);
  FeatureSpace space = FeatureSpace::load(args.space);
  std::vector<FeatureGain> ranking = rank_features(vectors, space, args.top_k);
  ensure_dir(dir_of(args.out));
  write_file(args.out, format_ranking(ranking));
  nlohmann::json params{{"vectors", args.vectors}, {"space", args.space}, {"top_k", args.top_k}};
  std::string manifest = write_manifest("rank", dir_of(args.out), params,
                                        {args.vectors, args.space}, {args.out}, 0);
  std::ostringstream summary;
  summary << ranking.size() << " features ranked";
  if (!ranking.empty())
    summary << "; top: " << ranking.front().name << " (gain "
            << format_fixed(ranking.front().gain, 4) << ")";
  return {summary.str(), {args.out}, manifest};
}

struct TrainArgs {
  std::string vectors;
  std::string space;
  TrainConfig config;
  std::string out;
};

inline StageResult run_train(const TrainArgs& args) {
  if (args.vectors.empty()) throw ConfigError("train: missing required option --vectors");
  if (args.space.empty()) throw ConfigError("train: missing required option --space");
  if (args.out.empty()) throw ConfigError("train: missing required option --out");
  std::vector<FeatureVector> vectors = load_vectors(args.vectors);
  FeatureSpace space = FeatureSpace::load(args.space);
  LinearModel model = train(vectors, space.size(), args.config, space.scheme_name(), space.hash());
  ensure_dir(dir_of(args.out));
  save_model(model, args.out);
  nlohmann::json params{{"vectors", args.vectors},
                        {"space", args.space},
                        {"lambda", args.config.lambda},
                        {"epochs", args.config.epochs}};
  std::string manifest = write_manifest("train", dir_of(args.out), params,
                                        {args.vectors, args.space}, {args.out}, args.config.seed);
  std::ostringstream summary;
  summary << "trained " << space.scheme_name() << " model on " << vectors.size()
          << " sentences, objective " << format_fixed(
                 hinge_objective(model.weights, model.bias, vectors, args.config.lambda), 6);
  return {summary.str(), {args.out}, manifest};
}

struct PredictArgs {
  std::string model;
  std::string vectors;
  std::string out;
};

inline StageResult run_predict(const PredictArgs& args) {
  if (args.model.empty()) throw ConfigError("predict: missing required option --model");
  if (args.vectors.empty()) throw ConfigError("predict: missing required option --vectors");
  if (args.out.empty()) throw ConfigError("predict: missing required option --out");
  LinearModel model = load_model(args.model);
  std::vector<FeatureVector> vectors = load_vectors(args.vectors);
  std::ostringstream lines;
  lines << "sentence_id\tpredicted\tmargin\n";
  for (const auto& v : vectors)
    lines << v.sentence_id << '\t' << to_string(model.predict(v)) << '\t'
          << format_fixed(model.margin(v), 4) << '\n';
  ensure_dir(dir_of(args.out));
  write_file(args.out, lines.str());
  nlohmann::json params{{"model", args.model}, {"vectors", args.vectors}};
  std::string manifest = write_manifest("predict", dir_of(args.out), params,
                                        {args.model, args.vectors}, {args.out}, model.seed);
  std::ostringstream summary;
  summary << vectors.size() << " sentences scored";
  return {summary.str(), {args.out}, manifest};
}

struct EvalModelArgs {
  std::string model;
  std::string vectors;
  std::string space;  // optional hash check
  std::string out;
};

inline StageResult run_eval_model(const EvalModelArgs& args) {
  if (args.model.empty()) throw ConfigError("eval: missing required option --model");
  if (args.vectors.empty()) throw ConfigError("eval: missing required option --vectors");
  if (args.out.empty()) throw ConfigError("eval: missing required option --out");
  LinearModel model = load_model(args.model);
  if (!args.space.empty()) {
    FeatureSpace space = FeatureSpace::load(args.space);
    if (space.hash() != model.feature_space_hash)
      throw DataError("eval: feature space " + args.space + " does not match the model's hash");
  }
  std::vector<FeatureVector> vectors = load_vectors(args.vectors);
  std::vector<PolarityLabel> gold, predicted;
  for (const auto& v : vectors) {
    gold.push_back(v.label);
    predicted.push_back(model.predict(v));
  }
  EvalResult r = evaluate(gold, predicted);
  ensure_dir(dir_of(args.out));
  write_file(args.out, format_eval(r, model.scheme.empty() ? "evaluation" : model.scheme));
  nlohmann::json params{{"model", args.model}, {"vectors", args.vectors}, {"space", args.space}};
  std::vector<std::string> inputs{args.model, args.vectors};
  if (!args.space.empty()) inputs.push_back(args.space);
  std::string manifest =
      write_manifest("eval", dir_of(args.out), params, inputs, {args.out}, model.seed);
  std::ostringstream summary;
  summary << "weighted F1 " << format_fixed(r.weighted.f1, 2) << " over " << vectors.size()
          << " sentences";
  return {summary.str(), {args.out}, manifest};
}

// --- Scheme experiments -------------------------------------------------
//
// Train and score one classifier per requested scheme on a shared split;
// the pattern scheme picks its thresholds by an internal sweep unless fixed
// thresholds are given.

struct ExperimentArgs {
  std::string train;
  std::string test;
  LexiconPaths lexicons;
  std::vector<std::string> schemes;  // empty means every scheme
  std::optional<std::size_t> theta_f;
  std::optional<double> theta_p;
  TrainConfig config;
  std::string out_dir;
};

struct ExperimentRow {
  std::string scheme;
  EvalResult result;
  std::size_t feature_count = 0;
  double train_density = 0.0;
  double test_density = 0.0;
};

inline std::string format_experiment_tsv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << "scheme\tpos_p\tpos_r\tpos_f1\tneg_p\tneg_r\tneg_f1\tall_p\tall_r\tall_f1\tfeatures\t"
         "train_density\ttest_density\n";
  for (const auto& row : rows) {
    const EvalResult& r = row.result;
    out << row.scheme;
    for (double v : {r.positive.precision, r.positive.recall, r.positive.f1, r.negative.precision,
                     r.negative.recall, r.negative.f1, r.weighted.precision, r.weighted.recall,
                     r.weighted.f1})
      out << '\t' << format_fixed(v, 2);
    out << '\t' << row.feature_count << '\t' << format_fixed(row.train_density, 1) << '\t'
        << format_fixed(row.test_density, 1) << '\n';
  }
  return out.str();
}

inline std::string format_experiment_table(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-12s %5s %5s %5s  %5s %5s %5s  %5s %5s %5s\n", "scheme",
                "posP", "posR", "posF", "negP", "negR", "negF", "allP", "allR", "allF");
  out << buf;
  for (const auto& row : rows) {
    const EvalResult& r = row.result;
    std::snprintf(buf, sizeof(buf), "%-12s %5.2f %5.2f %5.2f  %5.2f %5.2f %5.2f  %5.2f %5.2f %5.2f\n",
                  row.scheme.c_str(), r.positive.precision, r.positive.recall, r.positive.f1,
                  r.negative.precision, r.negative.recall, r.negative.f1, r.weighted.precision,
                  r.weighted.recall, r.weighted.f1);
    out << buf;
  }
  return out.str();
}

inline StageResult run_experiment(const ExperimentArgs& args) {
  if (args.train.empty()) throw ConfigError("eval: missing required option --train");
  if (args.test.empty()) throw ConfigError("eval: missing required option --test");
  if (args.out_dir.empty()) throw ConfigError("eval: missing required option --out-dir");
  LoadedLexicons lex = load_lexicons(args.lexicons);
  const Gazetteer* foodp = lex.food ? &*lex.food : nullptr;
  std::vector<ParsedSentence> train_sents = parse_pretagged(args.train);
  std::vector<ParsedSentence> test_sents = parse_pretagged(args.test);

  std::vector<SchemeSpec> wanted;
  if (args.schemes.empty() || (args.schemes.size() == 1 && args.schemes[0] == "all")) {
    wanted = experiment_schemes();
  } else {
    for (const auto& name : args.schemes) wanted.push_back(scheme_by_name(name));
  }

  SelectedPatterns selected;
  bool have_patterns = false;
  auto ensure_patterns = [&]() {
    if (have_patterns) return;
    std::size_t tf;
    double tp;
    if (args.theta_f && args.theta_p) {
      tf = *args.theta_f;
      tp = *args.theta_p;
    } else {
      SweepArgs sw;
      sw.train = args.train;
      sw.gazetteer = args.lexicons.gazetteer;
      sw.seed = args.config.seed;
      sw.out_dir = args.out_dir + "/sweep";
      StageResult res = run_sweep(sw);
      nlohmann::json chosen = nlohmann::json::parse(read_file(args.out_dir + "/sweep/chosen.json"));
      tf = chosen.at("theta_f").get<std::size_t>();
      tp = chosen.at("theta_p").get<double>();
    }
    selected = learn_selected_patterns(train_sents, foodp, tf, tp);
    have_patterns = true;
  };

  std::vector<ExperimentRow> rows;
  for (const auto& scheme : wanted) {
    const SelectedPatterns* selp = nullptr;
    if (scheme.kind == Scheme::Pattern) {
      ensure_patterns();
      selp = &selected;
    }
    FeatureContext ctx = lex.context(selp);
    FeatureSpace space = fit_space(train_sents, scheme, ctx);
    std::vector<FeatureVector> train_vecs = extract(train_sents, scheme, ctx, space);
    std::vector<FeatureVector> test_vecs = extract(test_sents, scheme, ctx, space);
    LinearModel model = train(train_vecs, space.size(), args.config, scheme.name, space.hash());
    std::vector<PolarityLabel> gold, predicted;
    for (const auto& v : test_vecs) {
      gold.push_back(v.label);
      predicted.push_back(model.predict(v));
    }
    ExperimentRow row;
    row.scheme = scheme.name;
    row.result = evaluate(gold, predicted);
    row.feature_count = space.size();
    row.train_density = density(train_vecs);
    row.test_density = density(test_vecs);
    rows.push_back(std::move(row));
  }

  ensure_dir(args.out_dir);
  std::string tsv_path = args.out_dir + "/report.tsv";
  std::string txt_path = args.out_dir + "/report.txt";
  write_file(tsv_path, format_experiment_tsv(rows));
  write_file(txt_path, format_experiment_table(rows));

  std::vector<std::string> scheme_names;
  for (const auto& s : wanted) scheme_names.push_back(s.name);
  nlohmann::json params{{"train", args.train},
                        {"test", args.test},
                        {"schemes", scheme_names},
                        {"lambda", args.config.lambda},
                        {"epochs", args.config.epochs}};
  if (args.theta_f) params["theta_f"] = *args.theta_f;
  if (args.theta_p) params["theta_p"] = *args.theta_p;
  std::vector<std::string> inputs{args.train, args.test};
  for (const std::string& p : {args.lexicons.frames, args.lexicons.dict, args.lexicons.gazetteer})
    if (!p.empty()) inputs.push_back(p);
  std::string manifest = write_manifest("eval", args.out_dir, params, inputs,
                                        {tsv_path, txt_path}, args.config.seed);
  return {format_experiment_table(rows), {tsv_path, txt_path}, manifest};
}

struct ReportArgs {
  std::string corpus;  // pre-tagged sentences
  std::string gazetteer;
  std::vector<std::string> queries;
  std::string out;
};

inline StageResult run_report(const ReportArgs& args) {
  if (args.corpus.empty()) throw ConfigError("report: missing required option --corpus");
  if (args.queries.empty()) throw ConfigError("report: missing required option --query");
  if (args.out.empty()) throw ConfigError("report: missing required option --out");
  std::optional<Gazetteer> food;
  if (!args.gazetteer.empty()) food = Gazetteer::load(args.gazetteer);
  std::vector<ParsedSentence> sentences =
      detail::load_parsed(args.corpus, food ? &*food : nullptr);
  PatternTable table;
  for (const auto& s : sentences) table.add(s);
  std::vector<FamilyReport> reports;
  for (const auto& q : args.queries) reports.push_back(report_family(table.all(), q));
  ensure_dir(dir_of(args.out));
  write_file(args.out, format_family_report(reports));
  nlohmann::json params{{"corpus", args.corpus},
                        {"gazetteer", args.gazetteer},
                        {"queries", args.queries}};
  std::vector<std::string> inputs{args.corpus};
  if (!args.gazetteer.empty()) inputs.push_back(args.gazetteer);
  std::string manifest =
      write_manifest("report", dir_of(args.out), params, inputs, {args.out}, 0);
  return {format_family_report(reports), {args.out}, manifest};
}

// Convenience chain for smoke tests: synth -> ingest -> preprocess ->
// learn-patterns -> sweep -> experiment, all under one directory.
struct PipelineArgs {
  std::string corpus;  // raw JSONL; empty means synthesize one
  SyntheticSpec synth_spec;
  std::size_t train_n = 160;
  std::size_t test_n = 40;
  std::uint64_t seed = 1;
  LexiconPaths lexicons;
  TrainConfig config;
  std::string out_dir;
};

inline std::vector<StageResult> run_pipeline(const PipelineArgs& args) {
  if (args.out_dir.empty()) throw ConfigError("pipeline: missing required option --out-dir");
  std::vector<StageResult> results;
  std::string corpus = args.corpus;
  if (corpus.empty()) {
    SynthArgs sa;
    sa.spec = args.synth_spec;
    sa.out = args.out_dir + "/corpus.jsonl";
    results.push_back(run_synth(sa));
    corpus = sa.out;
  }
  IngestArgs ia{corpus, args.out_dir + "/labeled.jsonl"};
  results.push_back(run_ingest(ia));
  PreprocessArgs pa{ia.out, args.out_dir, args.train_n, args.test_n, args.seed};
  results.push_back(run_preprocess(pa));
  LearnPatternsArgs la;
  la.corpus = args.out_dir + "/train.tsv";
  la.gazetteer = args.lexicons.gazetteer;
  la.out = args.out_dir + "/patterns.tsv";
  results.push_back(run_learn_patterns(la));
  SweepArgs sa;
  sa.train = args.out_dir + "/train.tsv";
  sa.gazetteer = args.lexicons.gazetteer;
  sa.seed = args.seed;
  sa.out_dir = args.out_dir + "/sweep";
  results.push_back(run_sweep(sa));
  ExperimentArgs ea;
  ea.train = args.out_dir + "/train.tsv";
  ea.test = args.out_dir + "/test.tsv";
  ea.lexicons = args.lexicons;
  ea.config = args.config;
  ea.out_dir = args.out_dir;
  results.push_back(run_experiment(ea));
  return results;
}

}  // namespace wbtk

#endif  // WBTK_PIPELINE_HPP
