#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "textclf/sparse_vector.hpp"

// Binary L2-regularized linear learners shared by the SVM and logistic
// regression classifiers. The objective is
//   (lambda / 2) * |w|^2 + (1 / n) * sum_i loss(y_i * (w . x_i + b))
// with y_i in {-1, +1} and an unregularized bias.
namespace textclf::linear {

enum class Loss { hinge, logistic };

/// Loss at margin m = y * score.
double loss(Loss kind, double margin);

/// Negative derivative of the loss with respect to the score.
double dloss(Loss kind, double score, double y);

struct BinaryProblem {
  std::span<const SparseVector> xs;
  std::span<const double> ys;
  double lambda = 1e-4;
  Loss loss = Loss::hinge;
};

double objective(const BinaryProblem& problem, std::span<const double> w, double b);

struct Gradient {
  std::vector<double> w;
  double b = 0.0;
};

/// Full-batch (sub)gradient of the objective.
Gradient gradient(const BinaryProblem& problem, std::span<const double> w, double b);

struct Solution {
  std::vector<double> w;
  double b = 0.0;
  double eta0 = 0.0;  // calibrated initial step size
};

/// Averaged stochastic gradient descent with step eta0 / (1 + lambda eta0 t)^0.75,
/// sparse updates and lazily applied weight decay. eta0 is calibrated on a
/// sample before training. Deterministic for a given seed.
Solution solve_sgd(const BinaryProblem& problem, std::size_t epochs, std::uint64_t seed);

}  // namespace textclf::linear
