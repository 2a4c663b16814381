#include <algorithm>
#include <cmath>
#include <numeric>

#include "classifier_detail.hpp"
#include "textclf/error.hpp"

namespace textclf {

double entropy(std::span<const std::size_t> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0,
                                       [](double acc, std::size_t c) { return acc + static_cast<double>(c); });
  if (total == 0.0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

// Gains closer than this are treated as equal, so ties resolve by feature
// index and threshold rather than by rounding noise.
constexpr double kGainTolerance = 1e-12;

struct Split {
  std::int32_t feature = TreeNode::kLeaf;
  double threshold = 0.0;
  double gain = 0.0;
};

struct Cell {
  std::uint32_t feature;
  double value;
  std::uint32_t label;
};

std::uint32_t majority(const std::vector<std::size_t>& counts) {
  return static_cast<std::uint32_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

class TreeBuilder {
 public:
  TreeBuilder(const LabeledVectors& data, std::vector<std::uint32_t> classes, std::size_t n_labels,
              const TreeConfig& cfg)
      : data_(data), classes_(std::move(classes)), n_labels_(n_labels), cfg_(cfg) {}

  TreeModel build() {
    std::vector<std::uint32_t> all(data_.size());
    std::iota(all.begin(), all.end(), 0u);
    model_.config = cfg_;
    grow(all, 0);
    return std::move(model_);
  }

 private:
  std::vector<std::size_t> histogram(const std::vector<std::uint32_t>& samples) const {
    std::vector<std::size_t> counts(n_labels_, 0);
    for (auto s : samples) ++counts[classes_[s]];
    return counts;
  }

  // Best (feature, threshold) over midpoints of consecutive distinct values,
  // implicit zeros included.
  Split best_split(const std::vector<std::uint32_t>& samples, const std::vector<std::size_t>& parent) const {
    std::vector<Cell> cells;
    for (auto s : samples) {
      for (const auto& e : data_.vectors[s].entries()) cells.push_back({e.index, e.weight, classes_[s]});
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
      return a.feature != b.feature ? a.feature < b.feature : a.value < b.value;
    });

    const double n = static_cast<double>(samples.size());
    const double parent_h = entropy(parent);
    Split best;
    std::vector<std::size_t> left(n_labels_);
    std::vector<std::size_t> right(n_labels_);
    std::vector<std::size_t> zeros(n_labels_);
    std::vector<double> values;        // distinct values of one feature, ascending
    std::vector<std::size_t> counts;   // class histogram per distinct value, flattened

    for (std::size_t begin = 0; begin < cells.size();) {
      const auto feature = cells[begin].feature;
      std::size_t end = begin;
      while (end < cells.size() && cells[end].feature == feature) ++end;

      zeros = parent;
      for (std::size_t i = begin; i < end; ++i) --zeros[cells[i].label];
      const bool has_zeros = samples.size() > end - begin;

      values.clear();
      counts.clear();
      auto open_group = [&](double v) {
        values.push_back(v);
        counts.resize(counts.size() + n_labels_, 0);
      };
      bool zeros_placed = !has_zeros;
      for (std::size_t i = begin; i < end; ++i) {
        const double v = cells[i].value;
        if (!zeros_placed && v > 0.0) {
          open_group(0.0);
          std::copy(zeros.begin(), zeros.end(), counts.end() - static_cast<std::ptrdiff_t>(n_labels_));
          zeros_placed = true;
        }
        if (values.empty() || values.back() != v) open_group(v);
        ++counts[counts.size() - n_labels_ + cells[i].label];
      }
      if (!zeros_placed) {
        open_group(0.0);
        std::copy(zeros.begin(), zeros.end(), counts.end() - static_cast<std::ptrdiff_t>(n_labels_));
      }

      std::fill(left.begin(), left.end(), 0);
      double left_n = 0.0;
      for (std::size_t g = 0; g + 1 < values.size(); ++g) {
        for (std::size_t c = 0; c < n_labels_; ++c) {
          const auto k = counts[g * n_labels_ + c];
          left[c] += k;
          left_n += static_cast<double>(k);
          right[c] = parent[c] - left[c];
        }
        const double gain = parent_h - (left_n / n) * entropy(left) - ((n - left_n) / n) * entropy(right);
        if (gain > best.gain + kGainTolerance) {
          best.feature = static_cast<std::int32_t>(feature);
          best.threshold = values[g] + (values[g + 1] - values[g]) / 2.0;
          best.gain = gain;
        }
      }
      begin = end;
    }
    return best;
  }

  std::uint32_t grow(const std::vector<std::uint32_t>& samples, std::size_t depth) {
    const auto index = static_cast<std::uint32_t>(model_.nodes.size());
    const auto counts = histogram(samples);
    model_.nodes.push_back(TreeNode{TreeNode::kLeaf, 0.0, 0, 0, majority(counts)});
    model_.depth = std::max(model_.depth, depth);

    const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
    if (pure || depth >= cfg_.max_depth || samples.size() < cfg_.min_samples_split) return index;
    const Split split = best_split(samples, counts);
    if (split.feature == TreeNode::kLeaf) return index;

    std::vector<std::uint32_t> left;
    std::vector<std::uint32_t> right;
    for (auto s : samples) {
      (data_.vectors[s].at(static_cast<std::uint32_t>(split.feature)) <= split.threshold ? left : right).push_back(s);
    }
    model_.nodes[index].feature = split.feature;
    model_.nodes[index].threshold = split.threshold;
    const auto l = grow(left, depth + 1);
    const auto r = grow(right, depth + 1);
    model_.nodes[index].left = l;
    model_.nodes[index].right = r;
    return index;
  }

  const LabeledVectors& data_;
  std::vector<std::uint32_t> classes_;
  std::size_t n_labels_;
  TreeConfig cfg_;
  TreeModel model_;
};

}  // namespace

TrainedClassifier train_tree(const LabeledVectors& data, const TreeConfig& cfg) {
  data.validate();
  if (data.empty()) throw DataError("decision tree needs at least one sample");
  if (cfg.min_samples_split < 2) throw ConfigError("min_samples_split must be at least 2");
  auto labels = frequency_ordered_labels(data.labels);
  std::vector<std::uint32_t> classes;
  classes.reserve(data.size());
  for (const auto& l : data.labels) {
    classes.push_back(static_cast<std::uint32_t>(std::find(labels.begin(), labels.end(), l) - labels.begin()));
  }
  TreeBuilder builder(data, std::move(classes), labels.size(), cfg);
  auto model = builder.build();
  return TrainedClassifier{Algorithm::tree, std::move(labels), data.dimension(), std::move(model)};
}

std::uint32_t tree_predict(const TreeModel& model, const SparseVector& x) {
  std::uint32_t node = 0;
  while (!model.nodes[node].is_leaf()) {
    const auto& n = model.nodes[node];
    node = x.at(static_cast<std::uint32_t>(n.feature)) <= n.threshold ? n.left : n.right;
  }
  return model.nodes[node].label;
}

}  // namespace textclf
