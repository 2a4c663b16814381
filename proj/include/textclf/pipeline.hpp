#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "textclf/classifiers.hpp"
#include "textclf/corpus.hpp"
#include "textclf/evaluation.hpp"
#include "textclf/normalize.hpp"
#include "textclf/reshape.hpp"
#include "textclf/tfidf.hpp"

namespace textclf {

enum class EmitFormat { markdown, json, both };

EmitFormat parse_emit_format(std::string_view name);
std::string_view to_string(EmitFormat format);

struct ScenarioConfig {
  int scenario_id = 1;
  bool balance = false;
  double test_fraction = 0.1;
  std::optional<std::string> undersample_category;  // majority class when unset
  double undersample_fraction = 0.5;
  std::size_t smote_k = 5;
  std::uint64_t seed = 42;
  std::vector<Algorithm> algorithms{Algorithm::knn, Algorithm::linear_svm, Algorithm::logreg, Algorithm::tree};

  std::filesystem::path corpus;
  std::optional<std::filesystem::path> stopwords;
  std::optional<std::filesystem::path> charmap;
  std::optional<std::filesystem::path> alphabet;
  std::filesystem::path output = "runs";

  WordLengthLimits limits;
  LeftoverPolicy leftover = LeftoverPolicy::append;
  double min_fraction = 0.01;
  bool l2_normalize = false;
  TrainingOptions training;
  EmitFormat emit = EmitFormat::both;

  /// Scenario defaults: 1 = imbalanced 90/10, 2 = imbalanced 70/30,
  /// 3 = balanced 90/10, 4 = balanced 70/30.
  static ScenarioConfig for_scenario(int scenario_id);
};

/// Keys accepted by config files and, with a leading "--", by the CLI.
const std::vector<std::string>& config_keys();

/// Parses "key = value" lines; '#' starts a comment. Unknown keys and
/// repeated keys throw ConfigError naming the line.
std::map<std::string, std::string> read_config(std::istream& in);
std::map<std::string, std::string> load_config(const std::filesystem::path& path);

/// Builds a config from key/value settings. "scenario" is applied first so
/// explicit keys override its defaults.
ScenarioConfig resolve_config(const std::map<std::string, std::string>& settings);

/// Flat key/value view of a config, as recorded in the run manifest.
nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg);

/// Hooks for inspecting intermediate data.
struct PipelineObserver {
  std::function<void(std::string_view stage, const Corpus& corpus)> on_stage;
  std::function<void(const Corpus& train, const Corpus& test)> on_split;
  std::function<void(const Corpus& fit_input)> on_fit;
  std::function<void(const LabeledVectors& smote_input)> on_smote;
};

struct StageCount {
  std::string stage;
  std::size_t entries = 0;
};

struct ScenarioResult {
  std::vector<ReportRow> reports;
  std::vector<TrainedClassifier> models;
  TfidfModel tfidf;
  ReshapeBounds bounds;
  std::vector<StageCount> stages;
  nlohmann::ordered_json manifest;
  nlohmann::ordered_json timings;
};

/// Runs normalize, reshape, prune, optional undersample, stratified split,
/// TF-IDF fit on the training side, optional SMOTE on training vectors,
/// then trains and evaluates each selected algorithm. Stage failures are
/// rethrown with the stage name prefixed.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const PipelineObserver* observer = nullptr);
ScenarioResult run_scenario(const Corpus& corpus, const ScenarioConfig& cfg,
                            const PipelineObserver* observer = nullptr);

/// One JSON object per report; seed and scenario included, timing omitted.
nlohmann::ordered_json reports_to_json(const ScenarioResult& result, const ScenarioConfig& cfg);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Creates a fresh "run-<UTC timestamp>-seed<seed>" directory under
/// cfg.output (suffixing "-2", "-3", ... on collision) and writes the
/// manifest, reports, TF-IDF model and classifier models into it.
std::filesystem::path write_run(const ScenarioResult& result, const ScenarioConfig& cfg);

}  // namespace textclf
