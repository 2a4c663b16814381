#include "textclf/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "textclf/error.hpp"
#include "textclf/rng.hpp"
#include "textclf/sampling.hpp"

namespace textclf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Rethrows `fn`'s library errors with the stage name prefixed, keeping the
// error category (and therefore the CLI exit code).
template <typename Fn>
auto in_stage(std::string_view stage, Fn&& fn) -> decltype(fn()) {
  auto msg = [&](const std::exception& e) { return std::string(stage) + ": " + e.what(); };
  try {
    return fn();
  } catch (const VersionError& e) {
    throw VersionError(msg(e));
  } catch (const CorruptFileError& e) {
    throw CorruptFileError(msg(e));
  } catch (const DataError& e) {
    throw DataError(msg(e));
  } catch (const UnsupportedVariantError& e) {
    throw UnsupportedVariantError(msg(e));
  } catch (const ConfigError& e) {
    throw ConfigError(msg(e));
  } catch (const InvariantError& e) {
    throw InvariantError(msg(e));
  }
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return out;
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::vector<Algorithm> parse_algorithms(const std::string& value) {
  std::vector<Algorithm> out;
  if (value == "none" || value.empty()) return out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item == "all") {
      out = {Algorithm::knn, Algorithm::linear_svm, Algorithm::logreg, Algorithm::tree};
      continue;
    }
    const auto algorithm = parse_algorithm(item);
    if (std::find(out.begin(), out.end(), algorithm) == out.end()) out.push_back(algorithm);
  }
  return out;
}

void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "scenario") {
    // handled by resolve_config
  } else if (key == "balance") {
    cfg.balance = parse_flag(key, value);
  } else if (key == "test-fraction") {
    cfg.test_fraction = parse_real(key, value);
  } else if (key == "undersample-category") {
    cfg.undersample_category = value;
  } else if (key == "undersample-fraction") {
    cfg.undersample_fraction = parse_real(key, value);
  } else if (key == "smote-k") {
    cfg.smote_k = parse_uint(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_uint(key, value);
  } else if (key == "algorithms") {
    cfg.algorithms = parse_algorithms(value);
  } else if (key == "corpus") {
    cfg.corpus = value;
  } else if (key == "stopwords") {
    cfg.stopwords = value;
  } else if (key == "charmap") {
    cfg.charmap = value;
  } else if (key == "alphabet") {
    cfg.alphabet = value;
  } else if (key == "output") {
    cfg.output = value;
  } else if (key == "min-len") {
    cfg.limits.min_len = parse_uint(key, value);
  } else if (key == "max-len") {
    cfg.limits.max_len = parse_uint(key, value);
  } else if (key == "drop-repeated") {
    cfg.limits.drop_repeated = parse_flag(key, value);
  } else if (key == "leftover") {
    cfg.leftover = parse_leftover_policy(value);
  } else if (key == "min-fraction") {
    cfg.min_fraction = parse_real(key, value);
  } else if (key == "l2-normalize") {
    cfg.l2_normalize = parse_flag(key, value);
  } else if (key == "k") {
    cfg.training.knn.k = parse_uint(key, value);
  } else if (key == "metric") {
    cfg.training.knn.metric = parse_knn_metric(value);
  } else if (key == "lambda") {
    cfg.training.linear.lambda = parse_real(key, value);
  } else if (key == "epochs") {
    cfg.training.linear.epochs = parse_uint(key, value);
  } else if (key == "max-depth") {
    cfg.training.tree.max_depth = parse_uint(key, value);
  } else if (key == "min-samples-split") {
    cfg.training.tree.min_samples_split = parse_uint(key, value);
  } else if (key == "emit") {
    cfg.emit = parse_emit_format(value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void validate(const ScenarioConfig& cfg) {
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) throw ConfigError("test-fraction must lie in (0, 1)");
  if (!(cfg.undersample_fraction > 0.0 && cfg.undersample_fraction <= 1.0)) {
    throw ConfigError("undersample-fraction must lie in (0, 1]");
  }
  if (cfg.smote_k == 0) throw ConfigError("smote-k must be positive");
  if (cfg.training.knn.k == 0) throw ConfigError("k must be positive");
  if (!(cfg.training.linear.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (cfg.training.linear.epochs == 0) throw ConfigError("epochs must be positive");
  if (cfg.training.tree.min_samples_split < 2) throw ConfigError("min-samples-split must be at least 2");
  if (cfg.limits.min_len > cfg.limits.max_len) throw ConfigError("min-len exceeds max-len");
  if (!(cfg.min_fraction >= 0.0 && cfg.min_fraction < 1.0)) throw ConfigError("min-fraction must lie in [0, 1)");
}

std::string corpus_digest(const Corpus& corpus) {
  std::ostringstream out;
  write_corpus(out, corpus, CorpusFormat::jsonl);
  return sha256_hex(out.str());
}

void notify(const PipelineObserver* observer, std::string_view stage, const Corpus& corpus) {
  if (observer && observer->on_stage) observer->on_stage(stage, corpus);
}

// Evaluation classes: the model's labels, then any test-only labels.
std::vector<std::string> evaluation_classes(const TrainedClassifier& model, const std::vector<std::string>& truth) {
  auto classes = model.labels;
  std::unordered_set<std::string> seen(classes.begin(), classes.end());
  for (const auto& label : truth) {
    if (seen.insert(label).second) classes.push_back(label);
  }
  return classes;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  return out.str();
}

}  // namespace

EmitFormat parse_emit_format(std::string_view name) {
  if (name == "markdown") return EmitFormat::markdown;
  if (name == "json") return EmitFormat::json;
  if (name == "both") return EmitFormat::both;
  throw ConfigError("unknown emit format '" + std::string(name) + "' (expected markdown, json or both)");
}

std::string_view to_string(EmitFormat format) {
  switch (format) {
    case EmitFormat::markdown: return "markdown";
    case EmitFormat::json: return "json";
    case EmitFormat::both: return "both";
  }
  return "both";
}

ScenarioConfig ScenarioConfig::for_scenario(int scenario_id) {
  if (scenario_id < 1 || scenario_id > 4) {
    throw ConfigError("scenario must be 1, 2, 3 or 4 (got " + std::to_string(scenario_id) + ")");
  }
  ScenarioConfig cfg;
  cfg.scenario_id = scenario_id;
  cfg.balance = scenario_id >= 3;
  cfg.test_fraction = scenario_id % 2 == 1 ? 0.1 : 0.3;
  return cfg;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "scenario", "balance",   "test-fraction", "undersample-category", "undersample-fraction", "smote-k",
      "seed",     "algorithms", "corpus",       "stopwords",            "charmap",              "alphabet",
      "output",   "min-len",   "max-len",       "drop-repeated",        "leftover",             "min-fraction",
      "l2-normalize", "k",     "metric",        "lambda",               "epochs",               "max-depth",
      "min-samples-split", "emit"};
  return keys;
}

std::map<std::string, std::string> read_config(std::istream& in) {
  std::map<std::string, std::string> settings;
  const auto& keys = config_keys();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!settings.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key + "' repeated");
    }
  }
  return settings;
}

std::map<std::string, std::string> load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return read_config(in);
}

ScenarioConfig resolve_config(const std::map<std::string, std::string>& settings) {
  int scenario = 1;
  if (auto it = settings.find("scenario"); it != settings.end()) {
    scenario = static_cast<int>(std::min<std::uint64_t>(parse_uint("scenario", it->second), 1000));
  }
  auto cfg = ScenarioConfig::for_scenario(scenario);
  for (const auto& [key, value] : settings) apply_setting(cfg, key, value);
  validate(cfg);
  return cfg;
}

nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg) {
  auto opt_path = [](const std::optional<std::filesystem::path>& p) -> nlohmann::ordered_json {
    return p ? nlohmann::ordered_json(p->string()) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json algorithms = nlohmann::ordered_json::array();
  for (auto a : cfg.algorithms) algorithms.push_back(std::string(to_string(a)));
  nlohmann::ordered_json j;
  j["scenario"] = cfg.scenario_id;
  j["balance"] = cfg.balance;
  j["test-fraction"] = cfg.test_fraction;
  j["undersample-category"] =
      cfg.undersample_category ? nlohmann::ordered_json(*cfg.undersample_category) : nlohmann::ordered_json(nullptr);
  j["undersample-fraction"] = cfg.undersample_fraction;
  j["smote-k"] = cfg.smote_k;
  j["seed"] = cfg.seed;
  j["algorithms"] = std::move(algorithms);
  j["corpus"] = cfg.corpus.string();
  j["stopwords"] = opt_path(cfg.stopwords);
  j["charmap"] = opt_path(cfg.charmap);
  j["alphabet"] = opt_path(cfg.alphabet);
  j["output"] = cfg.output.string();
  j["min-len"] = cfg.limits.min_len;
  j["max-len"] = cfg.limits.max_len;
  j["drop-repeated"] = cfg.limits.drop_repeated;
  j["leftover"] = std::string(to_string(cfg.leftover));
  j["min-fraction"] = cfg.min_fraction;
  j["l2-normalize"] = cfg.l2_normalize;
  j["k"] = cfg.training.knn.k;
  j["metric"] = std::string(to_string(cfg.training.knn.metric));
  j["lambda"] = cfg.training.linear.lambda;
  j["epochs"] = cfg.training.linear.epochs;
  j["max-depth"] = cfg.training.tree.max_depth;
  j["min-samples-split"] = cfg.training.tree.min_samples_split;
  j["emit"] = std::string(to_string(cfg.emit));
  return j;
}

ScenarioResult run_scenario(const Corpus& corpus, const ScenarioConfig& cfg, const PipelineObserver* observer) {
  validate(cfg);
  ScenarioResult result;
  result.timings = nlohmann::ordered_json::object();
  auto record = [&](std::string stage, std::size_t entries) { result.stages.push_back({std::move(stage), entries}); };
  auto timed = [&](const char* stage, auto&& fn) {
    const auto start = Clock::now();
    auto out = in_stage(stage, fn);
    result.timings[stage] = seconds_since(start);
    return out;
  };
  record("input", corpus.size());
  notify(observer, "input", corpus);

  const NormalizeConfig norm_cfg{cfg.charmap, cfg.alphabet, cfg.stopwords, cfg.limits};
  const auto normalizer = in_stage("normalize", [&] { return Normalizer::from_config(norm_cfg); });
  const auto normalized = timed("normalize", [&] { return normalize_corpus(corpus, normalizer); });
  record("normalize", normalized.size());
  notify(observer, "normalize", normalized);

  result.bounds = in_stage("reshape", [&] { return iqr_bounds(normalized); });
  const auto reshaped = timed("reshape", [&] { return reshape_corpus(normalized, cfg.leftover); });
  record("reshape", reshaped.size());
  notify(observer, "reshape", reshaped);

  auto working = timed("prune", [&] { return prune_rare_categories(reshaped, cfg.min_fraction); });
  record("prune", working.size());
  notify(observer, "prune", working);

  std::optional<std::string> undersampled;
  if (cfg.balance) {
    working = timed("undersample", [&] {
      const auto category = cfg.undersample_category.value_or(corpus_summary(working).front().category);
      const auto cats = working.categories();
      if (std::find(cats.begin(), cats.end(), category) == cats.end()) {
        throw ConfigError("category '" + category + "' is not in the corpus");
      }
      undersampled = category;
      return undersample(working, category, cfg.undersample_fraction, derive_seed(cfg.seed, 0));
    });
    record("undersample", working.size());
    notify(observer, "undersample", working);
  }

  const auto split = timed("split", [&] { return stratified_split(working, cfg.test_fraction, derive_seed(cfg.seed, 1)); });
  if (split.train.size() + split.test.size() != working.size()) {
    throw InvariantError("split: train and test sizes do not add up to the input");
  }
  record("train", split.train.size());
  record("test", split.test.size());
  if (observer && observer->on_split) observer->on_split(split.train, split.test);

  if (observer && observer->on_fit) observer->on_fit(split.train);
  result.tfidf = timed("vectorize", [&] { return TfidfModel::fit(split.train, TfidfOptions{cfg.l2_normalize}); });
  auto train_vectors = in_stage("vectorize", [&] { return transform_corpus(result.tfidf, split.train); });
  const auto test_vectors = in_stage("vectorize", [&] { return transform_corpus(result.tfidf, split.test); });

  if (cfg.balance) {
    if (observer && observer->on_smote) observer->on_smote(train_vectors);
    train_vectors = timed("smote", [&] {
      return smote(train_vectors, SmoteOptions{cfg.smote_k, derive_seed(cfg.seed, 2), std::nullopt});
    });
    if (train_vectors.size() < split.train.size()) throw InvariantError("smote: output smaller than its input");
    record("smote", train_vectors.size());
  }

  TrainingOptions options = cfg.training;
  options.linear.seed = derive_seed(cfg.seed, 3);
  for (auto algorithm : cfg.algorithms) {
    const std::string stage = "train " + std::string(to_string(algorithm));
    const auto start = Clock::now();
    auto model = in_stage(stage, [&] { return train(algorithm, train_vectors, options); });
    const double elapsed = seconds_since(start);
    auto report = in_stage("evaluate " + std::string(to_string(algorithm)), [&] {
      const auto predicted = predict_all(model, test_vectors.vectors);
      return classification_report(
          confusion_matrix(test_vectors.labels, predicted, evaluation_classes(model, test_vectors.labels)));
    });
    report.training_time_s = elapsed;
    result.timings[stage] = elapsed;
    result.reports.push_back({std::to_string(cfg.scenario_id), std::string(display_name(algorithm)), std::move(report)});
    result.models.push_back(std::move(model));
  }

  auto& m = result.manifest;
  m["format"] = "textclf-run";
  m["version"] = 1;
  m["seed"] = cfg.seed;
  m["config"] = config_to_json(cfg);
  m["corpus_sha256"] = corpus_digest(corpus);
  const auto dir = default_data_dir();
  m["resources"] = {
      {"alphabet", sha256_file(cfg.alphabet.value_or(dir / "alphabet.txt"))},
      {"charmap", sha256_file(cfg.charmap.value_or(dir / "charmap.tsv"))},
      {"stopwords", sha256_file(cfg.stopwords.value_or(dir / "stopwords.txt"))},
  };
  m["iqr"] = {{"q1", result.bounds.q1}, {"q3", result.bounds.q3}, {"cap", result.bounds.cap()}};
  if (undersampled) m["undersampled_category"] = *undersampled;
  auto stages = nlohmann::ordered_json::array();
  for (const auto& s : result.stages) stages.push_back({{"stage", s.stage}, {"entries", s.entries}});
  m["stages"] = std::move(stages);
  m["classes"] = split.train.categories();
  m["features"] = result.tfidf.feature_count();
  return result;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const PipelineObserver* observer) {
  if (cfg.corpus.empty()) throw ConfigError("no corpus path given");
  const auto corpus = in_stage("load", [&] { return load_corpus(cfg.corpus, format_for_path(cfg.corpus)); });
  auto result = run_scenario(corpus, cfg, observer);
  result.manifest["corpus_file_sha256"] = sha256_file(cfg.corpus);
  return result;
}

nlohmann::ordered_json reports_to_json(const ScenarioResult& result, const ScenarioConfig& cfg) {
  auto out = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    nlohmann::ordered_json j;
    j["scenario"] = cfg.scenario_id;
    j["algorithm"] = std::string(to_string(result.models[i].variant));
    j["seed"] = cfg.seed;
    j["test_fraction"] = cfg.test_fraction;
    j["balance"] = cfg.balance;
    j["metrics"] = report_to_json(result.reports[i].report);
    out.push_back(std::move(j));
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw InvariantError("SHA-256 computation failed");
  }
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
  return out.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

std::filesystem::path write_run(const ScenarioResult& result, const ScenarioConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output);
  const std::string base = "run-" + utc_timestamp() + "-seed" + std::to_string(cfg.seed);
  fs::path dir = cfg.output / base;
  for (int n = 2; !fs::create_directory(dir); ++n) dir = cfg.output / (base + "-" + std::to_string(n));

  write_text(dir / "manifest.json", result.manifest.dump(2) + "\n");
  write_text(dir / "timings.json", result.timings.dump(2) + "\n");
  result.tfidf.save(dir / "tfidf.json");
  if (!result.models.empty()) fs::create_directory(dir / "models");
  for (const auto& model : result.models) {
    save_model(model, dir / "models" / (std::string(to_string(model.variant)) + ".json"));
  }
  if (cfg.emit != EmitFormat::markdown) write_text(dir / "reports.json", reports_to_json(result, cfg).dump(2) + "\n");
  if (cfg.emit != EmitFormat::json) write_text(dir / "report.md", reports_to_markdown(result.reports));
  return dir;
}

}  // namespace textclf
