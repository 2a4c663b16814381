// textclf command-line front end.

#include <CLI11.hpp>

#include <algorithm>
#include <iomanip>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "textclf/classifiers.hpp"
#include "textclf/corpus.hpp"
#include "textclf/error.hpp"
#include "textclf/evaluation.hpp"
#include "textclf/normalize.hpp"
#include "textclf/pipeline.hpp"
#include "textclf/reshape.hpp"
#include "textclf/rng.hpp"
#include "textclf/sampling.hpp"
#include "textclf/tfidf.hpp"

namespace fs = std::filesystem;
using namespace textclf;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInvariant = 4;

std::optional<CorpusFormat> format_override;

Corpus read_input(const fs::path& path) { return load_corpus(path, format_override.value_or(format_for_path(path))); }

void write_output(const Corpus& corpus, const fs::path& path) {
  save_corpus(corpus, path, format_override.value_or(format_for_path(path)));
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::optional<fs::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

void print_stats(const Corpus& corpus, EmitFormat emit) {
  const auto summary = corpus_summary(corpus);
  const auto counts = word_counts(corpus);
  const auto bounds = iqr_bounds(corpus);
  std::optional<double> skew;
  try {
    skew = sample_skewness(counts);
  } catch (const DataError&) {
  }
  const double imbalance = majority_imbalance(corpus);
  if (emit != EmitFormat::markdown) {
    nlohmann::ordered_json j;
    j["entries"] = corpus.size();
    j["q1"] = bounds.q1;
    j["q3"] = bounds.q3;
    j["skewness"] = skew ? nlohmann::ordered_json(*skew) : nlohmann::ordered_json(nullptr);
    j["majority_percentage_difference"] = imbalance;
    auto cats = nlohmann::ordered_json::array();
    for (const auto& s : summary) {
      cats.push_back({{"category", s.category},
                      {"entries", s.entries},
                      {"percent", s.percent},
                      {"min_words", s.min_words},
                      {"max_words", s.max_words},
                      {"avg_words", s.avg_words},
                      {"total_words", s.total_words},
                      {"unique_words", s.unique_words},
                      {"q1_words", s.q1_words},
                      {"q3_words", s.q3_words}});
    }
    j["categories"] = std::move(cats);
    std::cout << j.dump(2) << "\n";
  }
  if (emit != EmitFormat::json) {
    std::cout << "| Category | Entries | % | Min | Max | Avg | Words | Unique |\n|---|---|---|---|---|---|---|---|\n";
    for (const auto& s : summary) {
      std::cout << "| " << s.category << " | " << s.entries << " | " << std::fixed << std::setprecision(2)
                << s.percent << " | " << s.min_words << " | " << s.max_words << " | " << s.avg_words << " | "
                << s.total_words << " | " << s.unique_words << " |\n";
    }
    std::cout << "\nentries: " << corpus.size() << ", q1: " << bounds.q1 << ", q3: " << bounds.q3;
    if (skew) std::cout << ", skewness: " << *skew;
    std::cout << ", majority vs mean: " << imbalance << "%\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text classification toolkit for low-resource corpora"};
  app.require_subcommand(1);
  std::string format_name;
  app.add_option("--format", format_name, "Corpus format (jsonl or csv); default from file extension");

  // normalize
  auto* normalize_cmd = app.add_subcommand("normalize", "Clean a corpus");
  std::string in_path, out_path, charmap, alphabet, stopwords;
  std::size_t min_len = 2, max_len = 14;
  bool keep_repeated = false;
  normalize_cmd->add_option("-i,--input", in_path, "Input corpus")->required();
  normalize_cmd->add_option("-o,--output", out_path, "Output corpus")->required();
  normalize_cmd->add_option("--charmap", charmap, "Character table (TSV)");
  normalize_cmd->add_option("--alphabet", alphabet, "Alphabet file");
  normalize_cmd->add_option("--stopwords", stopwords, "Stopword list");
  normalize_cmd->add_option("--min-len", min_len, "Minimum word length in codepoints");
  normalize_cmd->add_option("--max-len", max_len, "Maximum word length in codepoints");
  normalize_cmd->add_flag("--keep-repeated", keep_repeated, "Keep tokens of one repeated character");

  // reshape
  auto* reshape_cmd = app.add_subcommand("reshape", "Chunk long and merge short documents, then prune rare classes");
  std::string leftover = "append";
  double min_fraction = 0.01;
  reshape_cmd->add_option("-i,--input", in_path, "Input corpus")->required();
  reshape_cmd->add_option("-o,--output", out_path, "Output corpus")->required();
  reshape_cmd->add_option("--leftover", leftover, "keep, append or drop");
  reshape_cmd->add_option("--min-fraction", min_fraction, "Prune categories below this share");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
  std::string emit = "markdown";
  stats_cmd->add_option("-i,--input", in_path, "Corpus")->required();
  stats_cmd->add_option("--emit", emit, "markdown, json or both");

  // split
  auto* split_cmd = app.add_subcommand("split", "Stratified train/test split");
  std::string train_out, test_out;
  double test_fraction = 0.1;
  std::uint64_t seed = 42;
  split_cmd->add_option("-i,--input", in_path, "Corpus")->required();
  split_cmd->add_option("--train", train_out, "Training output")->required();
  split_cmd->add_option("--test", test_out, "Test output")->required();
  split_cmd->add_option("--test-fraction", test_fraction, "Test share per category");
  split_cmd->add_option("--seed", seed, "Random seed");

  // vectorize
  auto* vectorize_cmd = app.add_subcommand("vectorize", "Fit a TF-IDF model on a training corpus");
  bool l2 = false;
  vectorize_cmd->add_option("-i,--input", in_path, "Training corpus")->required();
  vectorize_cmd->add_option("-o,--output", out_path, "TF-IDF model file")->required();
  vectorize_cmd->add_flag("--l2-normalize", l2, "L2-normalize vectors");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a classifier");
  std::string tfidf_path, algorithm = "linear_svm", metric = "cosine";
  TrainingOptions training;
  bool balance = false;
  std::size_t smote_k = 5;
  train_cmd->add_option("-i,--input", in_path, "Training corpus")->required();
  train_cmd->add_option("--tfidf", tfidf_path, "TF-IDF model file")->required();
  train_cmd->add_option("-o,--output", out_path, "Model file")->required();
  train_cmd->add_option("-a,--algorithm", algorithm, "knn, linear_svm, logreg or tree");
  train_cmd->add_option("--k", training.knn.k, "KNN neighbours");
  train_cmd->add_option("--metric", metric, "KNN distance: cosine or euclidean");
  train_cmd->add_option("--lambda", training.linear.lambda, "L2 regularization strength");
  train_cmd->add_option("--epochs", training.linear.epochs, "SGD epochs");
  train_cmd->add_option("--max-depth", training.tree.max_depth, "Tree depth limit");
  train_cmd->add_option("--min-samples-split", training.tree.min_samples_split, "Smallest splittable node");
  train_cmd->add_flag("--balance", balance, "Apply SMOTE to the training vectors");
  train_cmd->add_option("--smote-k", smote_k, "SMOTE neighbours");
  train_cmd->add_option("--seed", seed, "Random seed");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a model on a test corpus");
  std::string model_path;
  evaluate_cmd->add_option("-i,--input", in_path, "Test corpus")->required();
  evaluate_cmd->add_option("--tfidf", tfidf_path, "TF-IDF model file")->required();
  evaluate_cmd->add_option("-m,--model", model_path, "Model file")->required();
  evaluate_cmd->add_option("--emit", emit, "markdown, json or both");

  // scenario
  auto* scenario_cmd = app.add_subcommand("scenario", "Run a full scenario end to end");
  std::string config_path;
  scenario_cmd->add_option("-c,--config", config_path, "Config file (key = value)");
  std::map<std::string, std::string> flag_values;
  for (const auto& key : config_keys()) {
    scenario_cmd->add_option("--" + key, flag_values[key], "Overrides config key '" + key + "'");
  }

  // explain
  auto* explain_cmd = app.add_subcommand("explain", "Top weighted features of a linear model");
  std::string label;
  std::size_t top = 20;
  explain_cmd->add_option("-m,--model", model_path, "Model file")->required();
  explain_cmd->add_option("--tfidf", tfidf_path, "TF-IDF model file")->required();
  explain_cmd->add_option("-l,--label", label, "Class label")->required();
  explain_cmd->add_option("-n,--top", top, "Number of features");

  // kappa
  auto* kappa_cmd = app.add_subcommand("kappa", "Cohen's kappa between two annotators");
  std::string first, second;
  kappa_cmd->add_option("first", first, "Labels of annotator A, one per line")->required();
  kappa_cmd->add_option("second", second, "Labels of annotator B, one per line")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (!format_name.empty()) format_override = parse_corpus_format(format_name);

    if (*normalize_cmd) {
      const NormalizeConfig cfg{opt_path(charmap), opt_path(alphabet), opt_path(stopwords),
                                WordLengthLimits{min_len, max_len, !keep_repeated}};
      const auto input = read_input(in_path);
      const auto output = normalize_corpus(input, cfg);
      write_output(output, out_path);
      std::cerr << "normalize: " << input.size() << " -> " << output.size() << " entries\n";
    } else if (*reshape_cmd) {
      const auto input = read_input(in_path);
      const auto bounds = iqr_bounds(input);
      const auto reshaped = reshape_corpus(input, parse_leftover_policy(leftover));
      const auto pruned = prune_rare_categories(reshaped, min_fraction);
      write_output(pruned, out_path);
      std::cerr << "reshape: q1 " << bounds.q1 << ", q3 " << bounds.q3 << "; " << input.size() << " -> "
                << reshaped.size() << " -> " << pruned.size() << " entries\n";
    } else if (*stats_cmd) {
      print_stats(read_input(in_path), parse_emit_format(emit));
    } else if (*split_cmd) {
      const auto split = stratified_split(read_input(in_path), test_fraction, seed);
      write_output(split.train, train_out);
      write_output(split.test, test_out);
      std::cerr << "split: " << split.train.size() << " train, " << split.test.size() << " test\n";
    } else if (*vectorize_cmd) {
      const auto model = TfidfModel::fit(read_input(in_path), TfidfOptions{l2});
      model.save(out_path);
      std::cerr << "vectorize: " << model.feature_count() << " features\n";
    } else if (*train_cmd) {
      training.knn.metric = parse_knn_metric(metric);
      training.linear.seed = derive_seed(seed, 3);
      const auto tfidf = TfidfModel::load(tfidf_path);
      auto data = transform_corpus(tfidf, read_input(in_path));
      if (balance) data = smote(data, SmoteOptions{smote_k, derive_seed(seed, 2), std::nullopt});
      save_model(train(parse_algorithm(algorithm), data, training), out_path);
    } else if (*evaluate_cmd) {
      const auto tfidf = TfidfModel::load(tfidf_path);
      const auto model = load_model(model_path);
      const auto data = transform_corpus(tfidf, read_input(in_path));
      auto classes = model.labels;
      for (const auto& l : data.labels) {
        if (std::find(classes.begin(), classes.end(), l) == classes.end()) classes.push_back(l);
      }
      const auto report =
          classification_report(confusion_matrix(data.labels, predict_all(model, data.vectors), classes));
      const auto fmt = parse_emit_format(emit);
      if (fmt != EmitFormat::markdown) std::cout << report_to_json(report).dump(2) << "\n";
      if (fmt != EmitFormat::json) {
        std::cout << reports_to_markdown({ReportRow{"-", std::string(display_name(model.variant)), report}});
      }
    } else if (*scenario_cmd) {
      auto settings = config_path.empty() ? std::map<std::string, std::string>{} : load_config(config_path);
      for (const auto& key : config_keys()) {
        if (scenario_cmd->count("--" + key) > 0) settings[key] = flag_values[key];
      }
      const auto cfg = resolve_config(settings);
      const auto result = run_scenario(cfg);
      const auto dir = write_run(result, cfg);
      if (cfg.emit != EmitFormat::json) std::cout << reports_to_markdown(result.reports);
      if (cfg.emit != EmitFormat::markdown) std::cout << reports_to_json(result, cfg).dump(2) << "\n";
      std::cerr << "run written to " << dir.string() << "\n";
    } else if (*explain_cmd) {
      const auto tfidf = TfidfModel::load(tfidf_path);
      const auto model = load_model(model_path);
      for (const auto& [term, weight] : top_features(model, tfidf.vocabulary(), label, top)) {
        std::cout << term << "\t" << weight << "\n";
      }
    } else if (*kappa_cmd) {
      const auto k = cohens_kappa(read_lines(first), read_lines(second));
      std::cout << "observed agreement: " << k.p_o << "\nchance agreement: " << k.p_e << "\nkappa: " << k.kappa
                << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return 0;
}
