#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace textclf {

struct SparseEntry {
  std::uint32_t index = 0;
  double weight = 0.0;

  bool operator==(const SparseEntry&) const = default;
};

/// Fixed-dimension sparse vector. Indices are strictly increasing and below
/// the dimension, weights finite and non-zero.
class SparseVector {
 public:
  SparseVector() = default;
  explicit SparseVector(std::size_t dimension) : dimension_(dimension) {}

  /// Validates the invariants; throws DataError on violation.
  SparseVector(std::size_t dimension, std::vector<SparseEntry> entries);

  /// Drops zero coordinates.
  static SparseVector from_dense(std::span<const double> values);

  std::size_t dimension() const { return dimension_; }
  const std::vector<SparseEntry>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  bool is_zero() const { return entries_.empty(); }

  /// Value at `index`, zero when absent (binary search).
  double at(std::uint32_t index) const;

  double dot(const SparseVector& other) const;
  double dot(std::span<const double> dense) const;
  double squared_norm() const;
  double norm() const;

  std::vector<double> to_dense() const;

  bool operator==(const SparseVector&) const = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<SparseEntry> entries_;
};

double squared_euclidean(const SparseVector& a, const SparseVector& b);

/// Cosine similarity; zero when either vector is zero.
double cosine_similarity(const SparseVector& a, const SparseVector& b);

/// Feature vectors with a parallel label list.
struct LabeledVectors {
  std::vector<SparseVector> vectors;
  std::vector<std::string> labels;

  std::size_t size() const { return vectors.size(); }
  bool empty() const { return vectors.empty(); }

  /// Common dimension; zero when empty.
  std::size_t dimension() const { return vectors.empty() ? 0 : vectors.front().dimension(); }

  /// Throws DataError on length mismatch or mixed dimensions.
  void validate() const;

  /// Distinct labels in first-appearance order.
  std::vector<std::string> classes() const;
};

}  // namespace textclf
