#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "textclf/sparse_vector.hpp"
#include "textclf/tfidf.hpp"

namespace textclf {

enum class Algorithm { knn, linear_svm, logreg, tree };

std::string_view to_string(Algorithm algorithm);
/// Accepts the canonical names plus "svm", "lr" and "dt".
Algorithm parse_algorithm(std::string_view name);
/// Human-readable name used in report tables.
std::string_view display_name(Algorithm algorithm);

enum class KnnMetric { cosine, euclidean };

KnnMetric parse_knn_metric(std::string_view name);
std::string_view to_string(KnnMetric metric);

struct KnnConfig {
  std::size_t k = 5;
  KnnMetric metric = KnnMetric::cosine;
};

struct LinearConfig {
  double lambda = 1e-4;
  std::size_t epochs = 30;
  std::uint64_t seed = 0;
};

struct TreeConfig {
  std::size_t max_depth = 50;
  std::size_t min_samples_split = 2;
};

struct KnnModel {
  KnnConfig config;
  std::vector<SparseVector> vectors;
  std::vector<std::uint32_t> classes;  // index into TrainedClassifier::labels
  std::vector<double> norms;           // cached L2 norms, not persisted
};

/// One-vs-rest weights: one dense (w_c, b_c) pair per label.
struct LinearModel {
  LinearConfig config;
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
};

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;  // kLeaf for leaves
  double threshold = 0.0;        // go left when x[feature] <= threshold
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::uint32_t label = 0;  // majority class at the node

  bool is_leaf() const { return feature == kLeaf; }
  bool operator==(const TreeNode&) const = default;
};

/// Nodes in preorder; node 0 is the root.
struct TreeModel {
  TreeConfig config;
  std::vector<TreeNode> nodes;
  std::size_t depth = 0;
};

/// A fitted model of any variant. `labels` is ordered by training frequency,
/// most frequent first (ties by first appearance); every tie rule that falls
/// back to "most frequent class" picks the lowest label index.
struct TrainedClassifier {
  Algorithm variant = Algorithm::knn;
  std::vector<std::string> labels;
  std::size_t dimension = 0;
  std::variant<KnnModel, LinearModel, TreeModel> payload;
};

struct TrainingOptions {
  KnnConfig knn;
  LinearConfig linear;
  TreeConfig tree;
};

/// Labels sorted by descending frequency, ties by first appearance.
std::vector<std::string> frequency_ordered_labels(const std::vector<std::string>& labels);

TrainedClassifier train_knn(const LabeledVectors& data, const KnnConfig& cfg);
TrainedClassifier train_linear_svm(const LabeledVectors& data, const LinearConfig& cfg);
TrainedClassifier train_logreg(const LabeledVectors& data, const LinearConfig& cfg);
TrainedClassifier train_tree(const LabeledVectors& data, const TreeConfig& cfg);
TrainedClassifier train(Algorithm algorithm, const LabeledVectors& data, const TrainingOptions& options);

/// Index into model.labels. Throws DataError on a dimension mismatch.
std::uint32_t predict_index(const TrainedClassifier& model, const SparseVector& x);
const std::string& predict(const TrainedClassifier& model, const SparseVector& x);
std::vector<std::string> predict_all(const TrainedClassifier& model, const std::vector<SparseVector>& xs);

/// Per-label decision values w_c . x + b_c of a linear model.
std::vector<double> decision_scores(const TrainedClassifier& model, const SparseVector& x);

/// 1 / (1 + exp(-z)).
double sigmoid(double z);

/// One-vs-rest class probabilities sigmoid(w_c . x + b_c); logreg only.
std::vector<double> predict_proba(const TrainedClassifier& model, const SparseVector& x);

/// The k largest weights of `label`'s hyperplane, descending, ties by
/// vocabulary index. Throws UnsupportedVariantError for KNN and trees.
std::vector<std::pair<std::string, double>> top_features(const TrainedClassifier& model, const Vocabulary& vocabulary,
                                                         const std::string& label, std::size_t k);

/// Shannon entropy in bits of a class-count histogram.
double entropy(std::span<const std::size_t> counts);

inline constexpr int kModelFormatVersion = 1;

nlohmann::ordered_json model_to_json(const TrainedClassifier& model);
TrainedClassifier model_from_json(const nlohmann::ordered_json& j);
void save_model(const TrainedClassifier& model, const std::filesystem::path& path);
TrainedClassifier load_model(const std::filesystem::path& path);

}  // namespace textclf
