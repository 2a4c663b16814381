#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "textclf/corpus.hpp"
#include "textclf/sparse_vector.hpp"

namespace textclf {

/// floor(x + 0.5), with a small guard against products like 0.1 * 15 landing
/// a hair under the half.
std::size_t round_half_up(double x);

struct SplitResult {
  Corpus train;
  Corpus test;
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
};

/// Per category, round_half_up(n_c * test_fraction) documents drawn without
/// replacement go to test. Both sides keep corpus order. Throws DataError for
/// a category with a single document.
SplitResult stratified_split(const Corpus& corpus, double test_fraction, std::uint64_t seed);

/// Keeps round_half_up(n * keep_fraction) uniformly drawn documents of
/// `category`; other categories are untouched and order is preserved.
Corpus undersample(const Corpus& corpus, const std::string& category, double keep_fraction, std::uint64_t seed);

struct SmoteOptions {
  std::size_t k = 5;
  std::uint64_t seed = 0;
  /// Overrides the interpolation factor (testing hook).
  std::optional<double> fixed_lambda;
};

/// Tops every minority class up to the majority count with synthetic
/// samples x + lambda * (x_nn - x), x_nn among the k nearest same-class
/// neighbours by Euclidean distance. The output holds the originals
/// unchanged and in order, followed by the synthetic samples grouped by
/// class in first-appearance order.
LabeledVectors smote(const LabeledVectors& data, const SmoteOptions& options);

}  // namespace textclf
