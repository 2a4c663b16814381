#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "textclf/error.hpp"
#include "textclf/rng.hpp"
#include "textclf/sampling.hpp"

using namespace textclf;

namespace {

Corpus labeled(const std::vector<std::pair<std::string, std::size_t>>& sizes) {
  std::vector<Document> docs;
  for (const auto& [label, n] : sizes) {
    for (std::size_t i = 0; i < n; ++i) docs.push_back({label + std::to_string(i), "t", label, ""});
  }
  return Corpus(docs);
}

std::map<std::string, std::size_t> counts(const Corpus& c) {
  std::map<std::string, std::size_t> out;
  for (const auto& d : c) ++out[d.category];
  return out;
}

std::map<std::string, std::size_t> counts(const std::vector<std::string>& labels) {
  std::map<std::string, std::size_t> out;
  for (const auto& l : labels) ++out[l];
  return out;
}

SparseVector random_vector(Rng& rng, std::size_t dim) {
  std::vector<double> dense(dim, 0.0);
  for (auto& v : dense) {
    if (rng.below(3) == 0) v = rng.unit();
  }
  return SparseVector::from_dense(dense);
}

}  // namespace

TEST_CASE("rng is reproducible and bounded") {
  Rng a(1), b(1);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(2);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.below(7) < 7);
    const double u = r.unit();
    CHECK((u >= 0.0 && u < 1.0));
  }
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("round half up") {
  CHECK(round_half_up(2.5) == 3);
  CHECK(round_half_up(2.4999) == 2);
  CHECK(round_half_up(0.1 * 15) == 2);
  CHECK(round_half_up(0.0) == 0);
}

TEST_CASE("stratified split exact arithmetic") {
  const auto corpus = labeled({{"a", 50}, {"b", 50}});
  const auto split = stratified_split(corpus, 0.3, 9);
  CHECK(counts(split.test) == std::map<std::string, std::size_t>{{"a", 15}, {"b", 15}});
  CHECK(split.train.size() == 70);
}

TEST_CASE("stratified split properties") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<std::string, std::size_t>> sizes;
    const auto n_classes = 2 + rng.below(5);
    for (std::uint64_t c = 0; c < n_classes; ++c) sizes.emplace_back("c" + std::to_string(c), 2 + rng.below(60));
    const auto corpus = labeled(sizes);
    const double fraction = 0.05 + 0.9 * rng.unit();
    const auto seed = rng.next();
    const auto split = stratified_split(corpus, fraction, seed);

    // Disjoint union by id, order preserved on each side.
    std::set<std::string> train_ids, test_ids;
    for (const auto& d : split.train) train_ids.insert(d.id);
    for (const auto& d : split.test) test_ids.insert(d.id);
    CHECK(train_ids.size() + test_ids.size() == corpus.size());
    for (const auto& id : test_ids) CHECK_FALSE(train_ids.contains(id));

    const auto test_counts = counts(split.test);
    for (const auto& [label, n] : sizes) {
      const auto expect = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 0.5 + 1e-9));
      const auto got = test_counts.contains(label) ? test_counts.at(label) : 0;
      CHECK(got == expect);
      CHECK(std::abs(static_cast<double>(got) - static_cast<double>(n) * fraction) <= 1.0);
    }
    const auto again = stratified_split(corpus, fraction, seed);
    CHECK(again.test == split.test);
    CHECK(again.train == split.train);
  }
}

TEST_CASE("different seeds give different splits") {
  const auto corpus = labeled({{"a", 30}, {"b", 30}});
  CHECK_FALSE(stratified_split(corpus, 0.3, 1).test == stratified_split(corpus, 0.3, 2).test);
}

TEST_CASE("split errors") {
  try {
    stratified_split(labeled({{"a", 5}, {"lonely", 1}}), 0.3, 0);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("lonely") != std::string::npos);
  }
  CHECK_THROWS_AS(stratified_split(labeled({{"a", 5}}), 1.0, 0), ConfigError);
}

TEST_CASE("undersample") {
  const auto corpus = labeled({{"p", 10}, {"q", 4}});
  CHECK(undersample(corpus, "p", 1.0, 3) == corpus);
  const auto out = undersample(corpus, "p", 0.3, 3);
  CHECK(counts(out) == std::map<std::string, std::size_t>{{"p", 3}, {"q", 4}});
  CHECK(undersample(corpus, "p", 0.3, 3) == out);
  CHECK(counts(undersample(labeled({{"p", 5011}}), "p", 0.5, 1)).at("p") == 2506);
  CHECK_THROWS_AS(undersample(corpus, "zzz", 0.5, 3), DataError);
  CHECK_THROWS_AS(undersample(corpus, "p", 0.0, 3), ConfigError);
}

TEST_CASE("smote on balanced input is the identity") {
  Rng rng(1);
  LabeledVectors data;
  for (int i = 0; i < 6; ++i) {
    data.vectors.push_back(random_vector(rng, 8));
    data.labels.push_back(i % 2 ? "a" : "b");
  }
  const auto out = smote(data, {});
  CHECK(out.vectors == data.vectors);
  CHECK(out.labels == data.labels);
}

TEST_CASE("smote with lambda zero copies sources") {
  Rng rng(2);
  LabeledVectors data;
  for (int i = 0; i < 10; ++i) {
    data.vectors.push_back(random_vector(rng, 6));
    data.labels.push_back(i < 7 ? "maj" : "min");
  }
  SmoteOptions opts;
  opts.fixed_lambda = 0.0;
  const auto out = smote(data, opts);
  REQUIRE(out.size() == 14);
  for (std::size_t i = 10; i < out.size(); ++i) {
    const bool found = std::any_of(data.vectors.begin() + 7, data.vectors.end(),
                                   [&](const SparseVector& v) { return v == out.vectors[i]; });
    CHECK(found);
  }
}

TEST_CASE("smote toy set: synthetics lie on segments to true neighbours") {
  Rng rng(3);
  LabeledVectors data;
  for (int i = 0; i < 14; ++i) {
    data.vectors.push_back(random_vector(rng, 5));
    data.labels.push_back(i < 10 ? "major" : "minor");
  }
  const auto out = smote(data, SmoteOptions{2, 99, std::nullopt});
  CHECK(counts(out.labels) == std::map<std::string, std::size_t>{{"major", 10}, {"minor", 10}});
  for (std::size_t i = 0; i < data.size(); ++i) CHECK(out.vectors[i] == data.vectors[i]);

  const std::vector<std::size_t> minority{10, 11, 12, 13};
  for (std::size_t s = data.size(); s < out.size(); ++s) {
    const auto syn = out.vectors[s].to_dense();
    bool ok = false;
    for (auto xi : minority) {
      // Exhaustive neighbour ranking by Euclidean distance, ties by position.
      std::vector<std::pair<double, std::size_t>> d;
      for (auto xj : minority) {
        if (xj != xi) d.emplace_back(squared_euclidean(data.vectors[xi], data.vectors[xj]), xj);
      }
      std::sort(d.begin(), d.end());
      const auto x = data.vectors[xi].to_dense();
      for (std::size_t n = 0; n < 2; ++n) {
        const auto nn = data.vectors[d[n].second].to_dense();
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
          num += (syn[j] - x[j]) * (nn[j] - x[j]);
          den += (nn[j] - x[j]) * (nn[j] - x[j]);
        }
        const double lambda = den > 0 ? num / den : 0.0;
        if (lambda < -1e-12 || lambda > 1 + 1e-12) continue;
        double residual = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) residual += std::abs(x[j] + lambda * (nn[j] - x[j]) - syn[j]);
        if (residual < 1e-9) ok = true;
      }
    }
    CHECK(ok);
  }
}

TEST_CASE("smote errors") {
  LabeledVectors data;
  data.vectors = {SparseVector(3), SparseVector(3), SparseVector(3)};
  data.labels = {"a", "a", "solo"};
  try {
    smote(data, {});
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("solo") != std::string::npos);
  }
  data.labels = {"a", "a", "a"};
  CHECK_THROWS_AS(smote(data, SmoteOptions{0, 0, std::nullopt}), ConfigError);
}
