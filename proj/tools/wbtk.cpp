// Command-line front end: each subcommand is one pipeline stage. Options can
// come from flags or from a key = value config file; flags win.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wbtk/pipeline.hpp"

namespace {

using namespace wbtk;

// Folds explicitly-passed flags over the config file (if any). Multi-value
// options are comma-joined; the stage code splits them back apart.
Config merge_options(CLI::App* sub) {
  Config cfg;
  const CLI::Option* config_opt = sub->get_option("--config");
  if (config_opt->count() > 0) cfg = Config::from_file(config_opt->as<std::string>());
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    std::string name = opt->get_lnames()[0];
    if (name == "config" || opt->count() == 0) continue;
    cfg.set(name, join(opt->results(), ","));
  }
  return cfg;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  for (auto& piece : split(csv, ',')) {
    std::string p = trim(piece);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

// "2:20" expands to the inclusive range; "2,3,5" stays a list.
std::vector<std::size_t> parse_freq_grid(const std::string& text) {
  std::vector<std::size_t> grid;
  auto colon = text.find(':');
  try {
    if (colon != std::string::npos) {
      std::size_t lo = std::stoull(text.substr(0, colon));
      std::size_t hi = std::stoull(text.substr(colon + 1));
      if (lo == 0 || hi < lo) throw std::invalid_argument("range");
      for (std::size_t f = lo; f <= hi; ++f) grid.push_back(f);
    } else {
      for (const auto& piece : split_list(text)) grid.push_back(std::stoull(piece));
    }
  } catch (const std::exception&) {
    throw ConfigError("bad --freq-grid: " + text + " (expected lo:hi or a comma list)");
  }
  if (grid.empty()) throw ConfigError("bad --freq-grid: " + text);
  return grid;
}

std::vector<double> parse_prob_grid(const std::string& text) {
  std::vector<double> grid;
  try {
    for (const auto& piece : split_list(text)) grid.push_back(std::stod(piece));
  } catch (const std::exception&) {
    throw ConfigError("bad --prob-grid: " + text + " (expected a comma list of probabilities)");
  }
  if (grid.empty()) throw ConfigError("bad --prob-grid: " + text);
  return grid;
}

std::string with_stage(const std::string& stage, const std::string& msg) {
  if (msg.rfind(stage + ":", 0) == 0) return msg;
  return stage + ": " + msg;
}

template <class Fn>
void run_stage(const std::string& stage, Fn&& fn) {
  try {
    StageResult result = fn();
    if (!result.summary.empty()) std::cout << result.summary << "\n";
    std::cout << "manifest: " << result.manifest << "\n";
  } catch (const ConfigError& e) {
    throw ConfigError(with_stage(stage, e.what()));
  } catch (const DataError& e) {
    throw DataError(with_stage(stage, e.what()));
  }
}

void add_config_option(CLI::App* sub) {
  sub->add_option("--config", "key = value file supplying defaults for any option");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wbtk: polarity analysis of scored diary posts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "wbtk 1.0.0");

  // synth
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic scored corpus");
  add_config_option(synth);
  synth->add_option("--out", "corpus JSONL path");
  synth->add_option("--n-pos", "positive recordings");
  synth->add_option("--n-neg", "negative recordings");
  synth->add_option("--obligation-rate", "obligation phrasing rate in negative sentences");
  synth->add_option("--connection-rate", "shared-event phrasing rate in positive sentences");
  synth->add_option("--reflection-rate", "rate of score-5 posts resolved by a reflection");
  synth->add_option("--seed", "generator seed");
  synth->callback([synth] {
    run_stage("synth", [&] {
      Config cfg = merge_options(synth);
      SynthArgs args;
      args.spec.n_pos = cfg.get_uint("n-pos", 100);
      args.spec.n_neg = cfg.get_uint("n-neg", 100);
      args.spec.obligation_rate = cfg.get_double("obligation-rate", 0.5);
      args.spec.connection_rate = cfg.get_double("connection-rate", 0.5);
      args.spec.reflection_rate = cfg.get_double("reflection-rate", 0.0);
      args.spec.seed = cfg.get_uint("seed", 1);
      args.out = cfg.get("out", "");
      return run_synth(args);
    });
  });

  // ingest
  CLI::App* ingest = app.add_subcommand("ingest", "label posts by score band and report counts");
  add_config_option(ingest);
  ingest->add_option("--corpus", "raw corpus JSONL");
  ingest->add_option("--out", "labeled recordings JSONL");
  ingest->callback([ingest] {
    run_stage("ingest", [&] {
      Config cfg = merge_options(ingest);
      return run_ingest({cfg.get("corpus", ""), cfg.get("out", "")});
    });
  });

  // preprocess
  CLI::App* preprocess =
      app.add_subcommand("preprocess", "split posts and emit pre-tagged sentence files");
  add_config_option(preprocess);
  preprocess->add_option("--labeled", "labeled recordings JSONL");
  preprocess->add_option("--out-dir", "directory for train.tsv / test.tsv / split.json");
  preprocess->add_option("--train-n", "posts in the training split");
  preprocess->add_option("--test-n", "posts in the test split");
  preprocess->add_option("--seed", "shuffle seed");
  preprocess->callback([preprocess] {
    run_stage("preprocess", [&] {
      Config cfg = merge_options(preprocess);
      PreprocessArgs args;
      args.labeled = cfg.get("labeled", "");
      args.out_dir = cfg.get("out-dir", "");
      args.train_n = cfg.get_uint("train-n", 0);
      args.test_n = cfg.get_uint("test-n", 0);
      args.seed = cfg.get_uint("seed", 1);
      return run_preprocess(args);
    });
  });

  // learn-patterns
  CLI::App* learn = app.add_subcommand("learn-patterns", "extract and rank extraction patterns");
  add_config_option(learn);
  learn->add_option("--corpus", "pre-tagged sentence file");
  learn->add_option("--gazetteer", "food term list collapsed before matching");
  learn->add_option("--out", "ranked pattern report TSV");
  learn->callback([learn] {
    run_stage("learn-patterns", [&] {
      Config cfg = merge_options(learn);
      return run_learn_patterns(
          {cfg.get("corpus", ""), cfg.get("gazetteer", ""), cfg.get("out", "")});
    });
  });

  // sweep
  CLI::App* sweep = app.add_subcommand("sweep", "grid-search pattern selection thresholds");
  add_config_option(sweep);
  sweep->add_option("--train", "pre-tagged sentences supplying pattern statistics");
  sweep->add_option("--eval-on", "pre-tagged sentences scored per cell (default: dev slice)");
  sweep->add_option("--gazetteer", "food term list collapsed before matching");
  sweep->add_option("--freq-grid", "lo:hi range or comma list (default 2:20)");
  sweep->add_option("--prob-grid", "comma list (default 0.60..0.95 by 0.05)");
  sweep->add_option("--dev-fraction", "share of train carved off when --eval-on is absent");
  sweep->add_option("--seed", "dev-slice shuffle seed");
  sweep->add_option("--out-dir", "directory for sweep.tsv / chosen.json");
  sweep->callback([sweep] {
    run_stage("sweep", [&] {
      Config cfg = merge_options(sweep);
      SweepArgs args;
      args.train = cfg.get("train", "");
      args.eval_on = cfg.get("eval-on", "");
      args.gazetteer = cfg.get("gazetteer", "");
      if (cfg.has("freq-grid")) args.freq_grid = parse_freq_grid(cfg.get("freq-grid", ""));
      if (cfg.has("prob-grid")) args.prob_grid = parse_prob_grid(cfg.get("prob-grid", ""));
      args.dev_fraction = cfg.get_double("dev-fraction", 0.2);
      args.seed = cfg.get_uint("seed", 1);
      args.out_dir = cfg.get("out-dir", "");
      return run_sweep(args);
    });
  });

  // features
  CLI::App* features = app.add_subcommand("features", "extract sparse feature vectors");
  add_config_option(features);
  features->add_option("--scheme", "feature scheme name");
  features->add_option("--train", "pre-tagged training sentences (fits the feature space)");
  features->add_option("--test", "pre-tagged test sentences (optional)");
  features->add_option("--frames", "frame lexicon TSV");
  features->add_option("--dict", "category dictionary TSV");
  features->add_option("--gazetteer", "food term list");
  features->add_option("--theta-f", "pattern frequency threshold (Pattern scheme)");
  features->add_option("--theta-p", "pattern probability threshold (Pattern scheme)");
  features->add_option("--out-dir", "directory for space.json and vector files");
  features->callback([features] {
    run_stage("features", [&] {
      Config cfg = merge_options(features);
      FeaturesArgs args;
      args.scheme = cfg.get("scheme", "");
      args.train = cfg.get("train", "");
      args.test = cfg.get("test", "");
      args.lexicons = {cfg.get("frames", ""), cfg.get("dict", ""), cfg.get("gazetteer", "")};
      args.theta_f = cfg.get_uint("theta-f", 2);
      args.theta_p = cfg.get_double("theta-p", 0.75);
      args.out_dir = cfg.get("out-dir", "");
      return run_features(args);
    });
  });

  // rank
  CLI::App* rank = app.add_subcommand("rank", "rank features by information gain");
  add_config_option(rank);
  rank->add_option("--vectors", "training vector file");
  rank->add_option("--space", "feature space JSON");
  rank->add_option("--top-k", "rows to keep (default 50)");
  rank->add_option("--out", "ranking TSV");
  rank->callback([rank] {
    run_stage("rank", [&] {
      Config cfg = merge_options(rank);
      RankArgs args;
      args.vectors = cfg.get("vectors", "");
      args.space = cfg.get("space", "");
      args.top_k = cfg.get_uint("top-k", 50);
      args.out = cfg.get("out", "");
      return run_rank(args);
    });
  });

  // train
  CLI::App* train_cmd = app.add_subcommand("train", "fit the linear classifier");
  add_config_option(train_cmd);
  train_cmd->add_option("--vectors", "training vector file");
  train_cmd->add_option("--space", "feature space JSON");
  train_cmd->add_option("--lambda", "regularization strength");
  train_cmd->add_option("--epochs", "passes over the data");
  train_cmd->add_option("--seed", "shuffle seed");
  train_cmd->add_option("--out", "model JSON path");
  train_cmd->callback([train_cmd] {
    run_stage("train", [&] {
      Config cfg = merge_options(train_cmd);
      TrainArgs args;
      args.vectors = cfg.get("vectors", "");
      args.space = cfg.get("space", "");
      args.config.lambda = cfg.get_double("lambda", TrainConfig{}.lambda);
      args.config.epochs = cfg.get_uint("epochs", TrainConfig{}.epochs);
      args.config.seed = cfg.get_uint("seed", TrainConfig{}.seed);
      args.out = cfg.get("out", "");
      return run_train(args);
    });
  });

  // predict
  CLI::App* predict = app.add_subcommand("predict", "score sentences with a trained model");
  add_config_option(predict);
  predict->add_option("--model", "model JSON path");
  predict->add_option("--vectors", "vector file to score");
  predict->add_option("--out", "predictions TSV");
  predict->callback([predict] {
    run_stage("predict", [&] {
      Config cfg = merge_options(predict);
      return run_predict({cfg.get("model", ""), cfg.get("vectors", ""), cfg.get("out", "")});
    });
  });

  // eval
  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "score one model, or train and compare schemes with --schemes");
  add_config_option(eval_cmd);
  eval_cmd->add_option("--model", "model JSON path (single-model mode)");
  eval_cmd->add_option("--vectors", "labeled vector file (single-model mode)");
  eval_cmd->add_option("--space", "feature space JSON for a hash check (optional)");
  eval_cmd->add_option("--out", "metrics report path (single-model mode)");
  eval_cmd->add_option("--schemes", "'all' or comma list (experiment mode)");
  eval_cmd->add_option("--train", "pre-tagged training sentences (experiment mode)");
  eval_cmd->add_option("--test", "pre-tagged test sentences (experiment mode)");
  eval_cmd->add_option("--frames", "frame lexicon TSV");
  eval_cmd->add_option("--dict", "category dictionary TSV");
  eval_cmd->add_option("--gazetteer", "food term list");
  eval_cmd->add_option("--theta-f", "fixed pattern frequency threshold");
  eval_cmd->add_option("--theta-p", "fixed pattern probability threshold");
  eval_cmd->add_option("--lambda", "regularization strength");
  eval_cmd->add_option("--epochs", "passes over the data");
  eval_cmd->add_option("--seed", "shuffle seed");
  eval_cmd->add_option("--out-dir", "directory for report.tsv / report.txt (experiment mode)");
  eval_cmd->callback([eval_cmd] {
    run_stage("eval", [&] {
      Config cfg = merge_options(eval_cmd);
      if (cfg.has("schemes")) {
        ExperimentArgs args;
        args.train = cfg.get("train", "");
        args.test = cfg.get("test", "");
        args.lexicons = {cfg.get("frames", ""), cfg.get("dict", ""), cfg.get("gazetteer", "")};
        args.schemes = split_list(cfg.get("schemes", "all"));
        if (cfg.has("theta-f")) args.theta_f = cfg.get_uint("theta-f", 2);
        if (cfg.has("theta-p")) args.theta_p = cfg.get_double("theta-p", 0.75);
        args.config.lambda = cfg.get_double("lambda", TrainConfig{}.lambda);
        args.config.epochs = cfg.get_uint("epochs", TrainConfig{}.epochs);
        args.config.seed = cfg.get_uint("seed", TrainConfig{}.seed);
        args.out_dir = cfg.get("out-dir", "");
        return run_experiment(args);
      }
      EvalModelArgs args;
      args.model = cfg.get("model", "");
      args.vectors = cfg.get("vectors", "");
      args.space = cfg.get("space", "");
      args.out = cfg.get("out", "");
      return run_eval_model(args);
    });
  });

  // report
  CLI::App* report = app.add_subcommand("report", "summarize pattern families by query");
  add_config_option(report);
  report->add_option("--corpus", "pre-tagged sentence file");
  report->add_option("--gazetteer", "food term list collapsed before matching");
  report->add_option("--query", "family query, e.g. ^NEW_ or _WITH$ (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  report->add_option("--out", "family report TSV");
  report->callback([report] {
    run_stage("report", [&] {
      Config cfg = merge_options(report);
      ReportArgs args;
      args.corpus = cfg.get("corpus", "");
      args.gazetteer = cfg.get("gazetteer", "");
      args.queries = split_list(cfg.get("query", ""));
      args.out = cfg.get("out", "");
      return run_report(args);
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  } catch (const wbtk::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const wbtk::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
