#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "classifier_detail.hpp"
#include "textclf/error.hpp"

namespace textclf {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::knn:
      return "knn";
    case Algorithm::linear_svm:
      return "linear_svm";
    case Algorithm::logreg:
      return "logreg";
    case Algorithm::tree:
      return "tree";
  }
  return "unknown";
}

std::string_view display_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::knn:
      return "K-Nearest Neighbor";
    case Algorithm::linear_svm:
      return "Linear SVM";
    case Algorithm::logreg:
      return "Logistic Regression";
    case Algorithm::tree:
      return "Decision Tree";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "knn") return Algorithm::knn;
  if (name == "linear_svm" || name == "svm") return Algorithm::linear_svm;
  if (name == "logreg" || name == "lr") return Algorithm::logreg;
  if (name == "tree" || name == "dt") return Algorithm::tree;
  throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected knn, linear_svm, logreg or tree)");
}

KnnMetric parse_knn_metric(std::string_view name) {
  if (name == "cosine") return KnnMetric::cosine;
  if (name == "euclidean") return KnnMetric::euclidean;
  throw ConfigError("unknown KNN metric '" + std::string(name) + "' (expected cosine or euclidean)");
}

std::string_view to_string(KnnMetric metric) { return metric == KnnMetric::cosine ? "cosine" : "euclidean"; }

std::vector<std::string> frequency_ordered_labels(const std::vector<std::string>& labels) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& l : labels) {
    if (counts[l]++ == 0) order.push_back(l);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](const std::string& a, const std::string& b) { return counts[a] > counts[b]; });
  return order;
}

TrainedClassifier train(Algorithm algorithm, const LabeledVectors& data, const TrainingOptions& options) {
  switch (algorithm) {
    case Algorithm::knn:
      return train_knn(data, options.knn);
    case Algorithm::linear_svm:
      return train_linear_svm(data, options.linear);
    case Algorithm::logreg:
      return train_logreg(data, options.linear);
    case Algorithm::tree:
      return train_tree(data, options.tree);
  }
  throw InvariantError("unhandled algorithm");
}

std::vector<double> decision_scores(const TrainedClassifier& model, const SparseVector& x) {
  const auto* linear = std::get_if<LinearModel>(&model.payload);
  if (linear == nullptr) {
    throw UnsupportedVariantError("decision scores are only defined for linear models, not " +
                                  std::string(to_string(model.variant)));
  }
  if (x.dimension() != model.dimension) {
    throw DataError("vector dimension " + std::to_string(x.dimension()) + " does not match model dimension " +
                    std::to_string(model.dimension));
  }
  std::vector<double> scores(linear->weights.size());
  for (std::size_t c = 0; c < scores.size(); ++c) scores[c] = x.dot(linear->weights[c]) + linear->bias[c];
  return scores;
}

std::uint32_t predict_index(const TrainedClassifier& model, const SparseVector& x) {
  if (x.dimension() != model.dimension) {
    throw DataError("vector dimension " + std::to_string(x.dimension()) + " does not match model dimension " +
                    std::to_string(model.dimension));
  }
  if (const auto* knn = std::get_if<KnnModel>(&model.payload)) return knn_predict(*knn, model.labels.size(), x);
  if (const auto* tree = std::get_if<TreeModel>(&model.payload)) return tree_predict(*tree, x);
  const auto scores = decision_scores(model, x);
  // First maximum wins, i.e. the most frequent training class on ties.
  return static_cast<std::uint32_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

const std::string& predict(const TrainedClassifier& model, const SparseVector& x) {
  return model.labels[predict_index(model, x)];
}

std::vector<std::string> predict_all(const TrainedClassifier& model, const std::vector<SparseVector>& xs) {
  std::vector<std::string> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(predict(model, x));
  return out;
}

std::vector<double> predict_proba(const TrainedClassifier& model, const SparseVector& x) {
  if (model.variant != Algorithm::logreg) {
    throw UnsupportedVariantError("probabilities are only defined for logistic regression");
  }
  auto scores = decision_scores(model, x);
  for (auto& s : scores) s = sigmoid(s);
  return scores;
}

std::vector<std::pair<std::string, double>> top_features(const TrainedClassifier& model, const Vocabulary& vocabulary,
                                                         const std::string& label, std::size_t k) {
  const auto* linear = std::get_if<LinearModel>(&model.payload);
  if (linear == nullptr) {
    throw UnsupportedVariantError("feature weights are only available for linear models, not " +
                                  std::string(to_string(model.variant)));
  }
  const auto it = std::find(model.labels.begin(), model.labels.end(), label);
  if (it == model.labels.end()) throw DataError("model has no class '" + label + "'");
  if (vocabulary.size() != model.dimension) throw DataError("vocabulary does not match the model dimension");
  const auto& w = linear->weights[static_cast<std::size_t>(it - model.labels.begin())];

  std::vector<std::uint32_t> order(w.size());
  std::iota(order.begin(), order.end(), 0u);
  k = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::uint32_t a, std::uint32_t b) { return w[a] != w[b] ? w[a] > w[b] : a < b; });
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < k; ++i) out.emplace_back(vocabulary.term(order[i]), w[order[i]]);
  return out;
}

}  // namespace textclf
