#pragma once

#include "textclf/classifiers.hpp"

namespace textclf {

std::uint32_t knn_predict(const KnnModel& model, std::size_t n_labels, const SparseVector& x);
std::uint32_t tree_predict(const TreeModel& model, const SparseVector& x);

}  // namespace textclf
