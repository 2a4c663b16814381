#include <algorithm>
#include <numeric>

#include "classifier_detail.hpp"
#include "textclf/error.hpp"

namespace textclf {

namespace {

std::vector<std::uint32_t> class_indices(const std::vector<std::string>& labels,
                                         const std::vector<std::string>& ordered) {
  std::vector<std::uint32_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    const auto it = std::find(ordered.begin(), ordered.end(), l);
    out.push_back(static_cast<std::uint32_t>(it - ordered.begin()));
  }
  return out;
}

}  // namespace

TrainedClassifier train_knn(const LabeledVectors& data, const KnnConfig& cfg) {
  data.validate();
  if (data.empty()) throw DataError("KNN needs at least one stored vector");
  if (cfg.k < 1 || cfg.k > data.size()) {
    throw ConfigError("KNN k=" + std::to_string(cfg.k) + " outside [1, " + std::to_string(data.size()) + "]");
  }
  auto labels = frequency_ordered_labels(data.labels);
  KnnModel model;
  model.config = cfg;
  model.vectors = data.vectors;
  model.classes = class_indices(data.labels, labels);
  for (const auto& v : model.vectors) model.norms.push_back(v.norm());
  return TrainedClassifier{Algorithm::knn, std::move(labels), data.dimension(), std::move(model)};
}

std::uint32_t knn_predict(const KnnModel& model, std::size_t n_labels, const SparseVector& x) {
  const std::size_t n = model.vectors.size();
  std::vector<std::pair<double, std::uint32_t>> dist(n);
  if (model.config.metric == KnnMetric::cosine) {
    const double xnorm = x.norm();
    for (std::size_t i = 0; i < n; ++i) {
      const double denom = xnorm * model.norms[i];
      const double sim = denom == 0.0 ? 0.0 : x.dot(model.vectors[i]) / denom;
      dist[i] = {1.0 - sim, static_cast<std::uint32_t>(i)};
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = {squared_euclidean(x, model.vectors[i]), static_cast<std::uint32_t>(i)};
    }
  }
  const auto k = static_cast<std::ptrdiff_t>(std::min(model.config.k, n));
  // Pair ordering breaks distance ties by the lower stored index.
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  std::vector<std::size_t> votes(n_labels, 0);
  for (std::ptrdiff_t i = 0; i < k; ++i) ++votes[model.classes[dist[static_cast<std::size_t>(i)].second]];
  // max_element returns the first maximum: the most frequent training class.
  return static_cast<std::uint32_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

}  // namespace textclf
