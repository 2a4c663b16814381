#include "textclf/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "textclf/error.hpp"
#include "textclf/rng.hpp"

namespace textclf {

namespace {

std::unordered_map<std::string, std::vector<std::size_t>> indices_by_label(const std::vector<std::string>& labels) {
  std::unordered_map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(i);
  return out;
}

std::vector<std::string> category_labels(const Corpus& corpus) {
  std::vector<std::string> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus) out.push_back(doc.category);
  return out;
}

// Draws `count` distinct members of `pool` (partial Fisher-Yates).
std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t> pool, std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

SparseVector interpolate(const SparseVector& x, const SparseVector& neighbour, double lambda) {
  std::vector<SparseEntry> entries;
  auto a = x.entries().begin();
  auto b = neighbour.entries().begin();
  auto push = [&](std::uint32_t index, double xv, double nv) {
    const double v = xv + lambda * (nv - xv);
    if (v != 0.0) entries.push_back({index, v});
  };
  while (a != x.entries().end() || b != neighbour.entries().end()) {
    if (b == neighbour.entries().end() || (a != x.entries().end() && a->index < b->index)) {
      push(a->index, a->weight, 0.0);
      ++a;
    } else if (a == x.entries().end() || b->index < a->index) {
      push(b->index, 0.0, b->weight);
      ++b;
    } else {
      push(a->index, a->weight, b->weight);
      ++a;
      ++b;
    }
  }
  return SparseVector(x.dimension(), std::move(entries));
}

}  // namespace

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5 + 1e-9)); }

SplitResult stratified_split(const Corpus& corpus, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test fraction must lie in (0, 1)");
  const auto labels = category_labels(corpus);
  auto groups = indices_by_label(labels);
  Rng rng(seed);
  std::vector<bool> in_test(corpus.size(), false);
  for (const auto& category : corpus.categories()) {
    const auto& members = groups[category];
    if (members.size() < 2) {
      throw DataError("category '" + category + "' has a single document; stratified split needs at least two");
    }
    const auto take = round_half_up(static_cast<double>(members.size()) * test_fraction);
    for (auto i : draw_without_replacement(members, take, rng)) in_test[i] = true;
  }
  std::vector<Document> train;
  std::vector<Document> test;
  for (std::size_t i = 0; i < corpus.size(); ++i) (in_test[i] ? test : train).push_back(corpus[i]);
  return SplitResult{Corpus(std::move(train)), Corpus(std::move(test)), seed, test_fraction};
}

Corpus undersample(const Corpus& corpus, const std::string& category, double keep_fraction, std::uint64_t seed) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) throw ConfigError("keep fraction must lie in (0, 1]");
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].category == category) members.push_back(i);
  }
  if (members.empty()) throw DataError("cannot under-sample unknown category '" + category + "'");
  const auto keep = round_half_up(static_cast<double>(members.size()) * keep_fraction);
  Rng rng(seed);
  std::vector<bool> kept(corpus.size(), true);
  for (auto i : members) kept[i] = false;
  for (auto i : draw_without_replacement(members, std::min(keep, members.size()), rng)) kept[i] = true;
  std::vector<Document> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (kept[i]) out.push_back(corpus[i]);
  }
  return Corpus(std::move(out));
}

LabeledVectors smote(const LabeledVectors& data, const SmoteOptions& options) {
  data.validate();
  if (options.k < 1) throw ConfigError("SMOTE k must be at least 1");
  const auto classes = data.classes();
  auto groups = indices_by_label(data.labels);
  std::size_t majority = 0;
  for (const auto& c : classes) {
    if (groups[c].size() < 2) throw DataError("SMOTE needs at least two samples in class '" + c + "'");
    majority = std::max(majority, groups[c].size());
  }

  LabeledVectors out = data;
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const auto& members = groups[classes[ci]];
    if (members.size() == majority) continue;
    const std::size_t k = std::min(options.k, members.size() - 1);

    // k nearest same-class neighbours of every member; ties by position.
    std::vector<std::vector<std::size_t>> neighbours(members.size());
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < members.size(); ++i) {
      dist.clear();
      for (std::size_t j = 0; j < members.size(); ++j) {
        if (j != i) dist.emplace_back(squared_euclidean(data.vectors[members[i]], data.vectors[members[j]]), j);
      }
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
      for (std::size_t n = 0; n < k; ++n) neighbours[i].push_back(dist[n].second);
    }

    Rng rng(derive_seed(options.seed, ci));
    for (std::size_t made = members.size(); made < majority; ++made) {
      const auto i = static_cast<std::size_t>(rng.below(members.size()));
      const auto n = neighbours[i][static_cast<std::size_t>(rng.below(k))];
      const double lambda = options.fixed_lambda ? *options.fixed_lambda : rng.unit();
      out.vectors.push_back(interpolate(data.vectors[members[i]], data.vectors[members[n]], lambda));
      out.labels.push_back(classes[ci]);
    }
  }
  return out;
}

}  // namespace textclf
