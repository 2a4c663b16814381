#include <fstream>

#include "textclf/classifiers.hpp"
#include "textclf/error.hpp"

namespace textclf {

namespace {

using Json = nlohmann::ordered_json;

void require(bool ok, const char* what) {
  if (!ok) throw CorruptFileError(std::string("malformed model file: ") + what);
}

Json vector_to_json(const SparseVector& v) {
  Json out = Json::array();
  for (const auto& e : v.entries()) out.push_back(Json::array({e.index, e.weight}));
  return out;
}

SparseVector vector_from_json(const Json& j, std::size_t dimension) {
  std::vector<SparseEntry> entries;
  for (const auto& pair : j) {
    require(pair.is_array() && pair.size() == 2, "sparse entry must be [index, weight]");
    entries.push_back({pair[0].get<std::uint32_t>(), pair[1].get<double>()});
  }
  try {
    return SparseVector(dimension, std::move(entries));
  } catch (const DataError& e) {
    throw CorruptFileError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace

nlohmann::ordered_json model_to_json(const TrainedClassifier& model) {
  Json j;
  j["format"] = "textclf-model";
  j["version"] = kModelFormatVersion;
  j["variant"] = to_string(model.variant);
  j["labels"] = model.labels;
  j["dimension"] = model.dimension;
  if (const auto* knn = std::get_if<KnnModel>(&model.payload)) {
    j["k"] = knn->config.k;
    j["metric"] = to_string(knn->config.metric);
    j["classes"] = knn->classes;
    Json vectors = Json::array();
    for (const auto& v : knn->vectors) vectors.push_back(vector_to_json(v));
    j["vectors"] = std::move(vectors);
  } else if (const auto* linear = std::get_if<LinearModel>(&model.payload)) {
    j["lambda"] = linear->config.lambda;
    j["epochs"] = linear->config.epochs;
    j["seed"] = linear->config.seed;
    j["bias"] = linear->bias;
    j["weights"] = linear->weights;
  } else {
    const auto& tree = std::get<TreeModel>(model.payload);
    j["max_depth"] = tree.config.max_depth;
    j["min_samples_split"] = tree.config.min_samples_split;
    j["depth"] = tree.depth;
    Json nodes = Json::array();
    for (const auto& n : tree.nodes) nodes.push_back(Json::array({n.feature, n.threshold, n.left, n.right, n.label}));
    j["nodes"] = std::move(nodes);
  }
  return j;
}

TrainedClassifier model_from_json(const nlohmann::ordered_json& j) {
  try {
    require(j.is_object() && j.value("format", "") == "textclf-model", "not a textclf model");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) throw VersionError("unsupported model version " + std::to_string(version));

    TrainedClassifier model;
    model.variant = parse_algorithm(j.at("variant").get<std::string>());
    model.labels = j.at("labels").get<std::vector<std::string>>();
    model.dimension = j.at("dimension").get<std::size_t>();
    require(!model.labels.empty(), "empty label list");
    const auto n_labels = model.labels.size();

    switch (model.variant) {
      case Algorithm::knn: {
        KnnModel knn;
        knn.config.k = j.at("k").get<std::size_t>();
        knn.config.metric = parse_knn_metric(j.at("metric").get<std::string>());
        knn.classes = j.at("classes").get<std::vector<std::uint32_t>>();
        for (const auto& v : j.at("vectors")) knn.vectors.push_back(vector_from_json(v, model.dimension));
        require(knn.classes.size() == knn.vectors.size(), "class and vector counts differ");
        require(knn.config.k >= 1 && knn.config.k <= knn.vectors.size(), "k out of range");
        for (auto c : knn.classes) require(c < n_labels, "class index out of range");
        for (const auto& v : knn.vectors) knn.norms.push_back(v.norm());
        model.payload = std::move(knn);
        break;
      }
      case Algorithm::linear_svm:
      case Algorithm::logreg: {
        LinearModel linear;
        linear.config.lambda = j.at("lambda").get<double>();
        linear.config.epochs = j.at("epochs").get<std::size_t>();
        linear.config.seed = j.at("seed").get<std::uint64_t>();
        linear.bias = j.at("bias").get<std::vector<double>>();
        linear.weights = j.at("weights").get<std::vector<std::vector<double>>>();
        require(linear.bias.size() == n_labels && linear.weights.size() == n_labels, "one hyperplane per label");
        for (const auto& w : linear.weights) require(w.size() == model.dimension, "weight dimension mismatch");
        model.payload = std::move(linear);
        break;
      }
      case Algorithm::tree: {
        TreeModel tree;
        tree.config.max_depth = j.at("max_depth").get<std::size_t>();
        tree.config.min_samples_split = j.at("min_samples_split").get<std::size_t>();
        tree.depth = j.at("depth").get<std::size_t>();
        for (const auto& n : j.at("nodes")) {
          require(n.is_array() && n.size() == 5, "tree node must have five fields");
          tree.nodes.push_back(TreeNode{n[0].get<std::int32_t>(), n[1].get<double>(), n[2].get<std::uint32_t>(),
                                        n[3].get<std::uint32_t>(), n[4].get<std::uint32_t>()});
        }
        require(!tree.nodes.empty(), "tree has no nodes");
        // Preorder: children always follow their parent, which rules out cycles.
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
          const auto& n = tree.nodes[i];
          require(n.label < n_labels, "leaf label out of range");
          if (n.is_leaf()) continue;
          require(n.feature >= 0 && static_cast<std::size_t>(n.feature) < model.dimension, "feature out of range");
          require(n.left > i && n.right > i && n.left < tree.nodes.size() && n.right < tree.nodes.size(),
                  "child index out of range");
        }
        model.payload = std::move(tree);
        break;
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFileError(std::string("malformed model file: ") + e.what());
  } catch (const ConfigError& e) {
    throw CorruptFileError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const TrainedClassifier& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << model_to_json(model).dump() << '\n';
}

TrainedClassifier load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw CorruptFileError(path.string() + ": corrupt model file: " + e.what());
  }
  return model_from_json(j);
}

}  // namespace textclf
