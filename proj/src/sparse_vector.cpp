#include "textclf/sparse_vector.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "textclf/error.hpp"

namespace textclf {

SparseVector::SparseVector(std::size_t dimension, std::vector<SparseEntry> entries)
    : dimension_(dimension), entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.index >= dimension_) throw DataError("sparse index out of range");
    if (i > 0 && entries_[i - 1].index >= e.index) throw DataError("sparse indices must be strictly increasing");
    if (!std::isfinite(e.weight)) throw DataError("sparse weight is not finite");
    if (e.weight == 0.0) throw DataError("sparse vector holds an explicit zero");
  }
}

SparseVector SparseVector::from_dense(std::span<const double> values) {
  std::vector<SparseEntry> entries;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) entries.push_back({static_cast<std::uint32_t>(i), values[i]});
  }
  return SparseVector(values.size(), std::move(entries));
}

double SparseVector::at(std::uint32_t index) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const SparseEntry& e, std::uint32_t i) { return e.index < i; });
  return it != entries_.end() && it->index == index ? it->weight : 0.0;
}

double SparseVector::dot(const SparseVector& other) const {
  double sum = 0.0;
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() && b != other.entries_.end()) {
    if (a->index < b->index) {
      ++a;
    } else if (b->index < a->index) {
      ++b;
    } else {
      sum += a->weight * b->weight;
      ++a;
      ++b;
    }
  }
  return sum;
}

double SparseVector::dot(std::span<const double> dense) const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.weight * dense[e.index];
  return sum;
}

double SparseVector::squared_norm() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.weight * e.weight;
  return sum;
}

double SparseVector::norm() const { return std::sqrt(squared_norm()); }

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(dimension_, 0.0);
  for (const auto& e : entries_) out[e.index] = e.weight;
  return out;
}

double squared_euclidean(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  auto x = a.entries().begin();
  auto y = b.entries().begin();
  while (x != a.entries().end() || y != b.entries().end()) {
    double d = 0.0;
    if (y == b.entries().end() || (x != a.entries().end() && x->index < y->index)) {
      d = x->weight;
      ++x;
    } else if (x == a.entries().end() || y->index < x->index) {
      d = -y->weight;
      ++y;
    } else {
      d = x->weight - y->weight;
      ++x;
      ++y;
    }
    sum += d * d;
  }
  return sum;
}

double cosine_similarity(const SparseVector& a, const SparseVector& b) {
  const double denom = a.norm() * b.norm();
  return denom == 0.0 ? 0.0 : a.dot(b) / denom;
}

void LabeledVectors::validate() const {
  if (vectors.size() != labels.size()) throw DataError("vector and label counts differ");
  for (const auto& v : vectors) {
    if (v.dimension() != dimension()) throw DataError("labeled vectors have mixed dimensions");
  }
}

std::vector<std::string> LabeledVectors::classes() const {
  std::vector<std::string> out;
  std::unordered_set<std::string_view> seen;
  for (const auto& l : labels) {
    if (seen.insert(l).second) out.push_back(l);
  }
  return out;
}

}  // namespace textclf
