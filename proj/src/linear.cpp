#include <algorithm>
#include <cmath>
#include <numeric>

#include "textclf/classifiers.hpp"
#include "textclf/error.hpp"
#include "textclf/linear_solver.hpp"
#include "textclf/rng.hpp"

namespace textclf {

namespace linear {

double loss(Loss kind, double margin) {
  if (kind == Loss::hinge) return std::max(0.0, 1.0 - margin);
  if (margin > 0.0) return std::log1p(std::exp(-margin));
  return -margin + std::log1p(std::exp(margin));
}

double dloss(Loss kind, double score, double y) {
  if (kind == Loss::hinge) return y * score < 1.0 ? y : 0.0;
  const double z = y * score;
  if (z > 0.0) {
    const double e = std::exp(-z);
    return y * e / (1.0 + e);
  }
  return y / (1.0 + std::exp(z));
}

double objective(const BinaryProblem& problem, std::span<const double> w, double b) {
  double reg = 0.0;
  for (double v : w) reg += v * v;
  double total = 0.0;
  for (std::size_t i = 0; i < problem.xs.size(); ++i) {
    total += loss(problem.loss, problem.ys[i] * (problem.xs[i].dot(w) + b));
  }
  return 0.5 * problem.lambda * reg + total / static_cast<double>(problem.xs.size());
}

Gradient gradient(const BinaryProblem& problem, std::span<const double> w, double b) {
  Gradient g;
  g.w.resize(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) g.w[j] = problem.lambda * w[j];
  const double inv_n = 1.0 / static_cast<double>(problem.xs.size());
  for (std::size_t i = 0; i < problem.xs.size(); ++i) {
    const double d = dloss(problem.loss, problem.xs[i].dot(w) + b, problem.ys[i]);
    if (d == 0.0) continue;
    for (const auto& e : problem.xs[i].entries()) g.w[e.index] -= inv_n * d * e.weight;
    g.b -= inv_n * d;
  }
  return g;
}

namespace {

// Averaged SGD state. The current iterate is w / w_div + bias; the averaged
// iterate is (avg + w_frac * w) / avg_div + avg_bias. Scaling factors absorb
// the weight decay so each step only touches the sample's nonzeros.
class AsgdState {
 public:
  AsgdState(std::size_t dim, double lambda, Loss loss) : w_(dim, 0.0), avg_(dim, 0.0), lambda_(lambda), loss_(loss) {}

  void step(const SparseVector& x, double y, double eta, double mu) {
    if (avg_div_ > 1e5 || w_div_ > 1e5) renormalize();
    const double score = x.dot(w_) / w_div_ + bias_;
    w_div_ /= 1.0 - eta * lambda_;
    const double d = dloss(loss_, score, y);
    const double etd = eta * d * w_div_;
    if (etd != 0.0) {
      for (const auto& e : x.entries()) w_[e.index] += etd * e.weight;
    }
    if (mu >= 1.0) {
      if (avg_dirty_) {
        std::fill(avg_.begin(), avg_.end(), 0.0);
        avg_dirty_ = false;
      }
      avg_div_ = w_div_;
      w_frac_ = 1.0;
    } else if (mu > 0.0) {
      if (etd != 0.0) {
        for (const auto& e : x.entries()) avg_[e.index] -= w_frac_ * etd * e.weight;
        avg_dirty_ = true;
      }
      avg_div_ /= 1.0 - mu;
      w_frac_ += mu * avg_div_ / w_div_;
    }
    bias_ += eta * d;
    avg_bias_ += mu >= 1.0 ? bias_ - avg_bias_ : mu * (bias_ - avg_bias_);
  }

  std::vector<double> current_weights() const {
    std::vector<double> out(w_.size());
    for (std::size_t j = 0; j < w_.size(); ++j) out[j] = w_[j] / w_div_;
    return out;
  }
  double current_bias() const { return bias_; }

  std::vector<double> averaged_weights() const {
    std::vector<double> out(w_.size());
    for (std::size_t j = 0; j < w_.size(); ++j) out[j] = (avg_[j] + w_frac_ * w_[j]) / avg_div_;
    return out;
  }
  double averaged_bias() const { return avg_bias_; }

 private:
  void renormalize() {
    for (std::size_t j = 0; j < w_.size(); ++j) {
      avg_[j] = avg_[j] / avg_div_ + w_[j] * w_frac_ / avg_div_;
      w_[j] /= w_div_;
    }
    avg_dirty_ = true;
    w_div_ = 1.0;
    avg_div_ = 1.0;
    w_frac_ = 0.0;
  }

  std::vector<double> w_;
  std::vector<double> avg_;
  double w_div_ = 1.0;
  double avg_div_ = 1.0;
  double w_frac_ = 1.0;
  double bias_ = 0.0;
  double avg_bias_ = 0.0;
  bool avg_dirty_ = false;
  double lambda_;
  Loss loss_;
};

double eta_at(double eta0, double lambda, std::size_t t) {
  return eta0 / std::pow(1.0 + lambda * eta0 * static_cast<double>(t), 0.75);
}

// Cost after one plain SGD pass over `sample` with constant step `eta`.
double trial_cost(const BinaryProblem& problem, const std::vector<std::size_t>& sample, double eta) {
  AsgdState state(problem.xs.empty() ? 0 : problem.xs.front().dimension(), problem.lambda, problem.loss);
  for (auto i : sample) state.step(problem.xs[i], problem.ys[i], eta, 1.0);
  const auto w = state.current_weights();
  double reg = 0.0;
  for (double v : w) reg += v * v;
  double total = 0.0;
  for (auto i : sample) total += loss(problem.loss, problem.ys[i] * (problem.xs[i].dot(w) + state.current_bias()));
  return total / static_cast<double>(sample.size()) + 0.5 * problem.lambda * reg;
}

// Doubling/halving search for the step size with the lowest trial cost.
double calibrate_eta0(const BinaryProblem& problem, const std::vector<std::size_t>& sample) {
  constexpr double kFactor = 2.0;
  constexpr int kMaxSteps = 30;
  const double max_eta = 0.5 / problem.lambda;
  double lo_eta = std::min(1.0, max_eta);
  double lo_cost = trial_cost(problem, sample, lo_eta);
  double hi_eta = std::min(lo_eta * kFactor, max_eta);
  double hi_cost = trial_cost(problem, sample, hi_eta);
  if (lo_cost < hi_cost) {
    for (int s = 0; s < kMaxSteps && lo_cost < hi_cost; ++s) {
      hi_eta = lo_eta;
      hi_cost = lo_cost;
      lo_eta = hi_eta / kFactor;
      lo_cost = trial_cost(problem, sample, lo_eta);
    }
  } else if (hi_cost < lo_cost) {
    for (int s = 0; s < kMaxSteps && hi_cost < lo_cost && hi_eta < max_eta; ++s) {
      lo_eta = hi_eta;
      lo_cost = hi_cost;
      hi_eta = std::min(lo_eta * kFactor, max_eta);
      hi_cost = trial_cost(problem, sample, hi_eta);
    }
  }
  return lo_eta;
}

}  // namespace

Solution solve_sgd(const BinaryProblem& problem, std::size_t epochs, std::uint64_t seed) {
  const std::size_t n = problem.xs.size();
  if (n == 0) throw DataError("cannot train on an empty problem");
  if (!(problem.lambda > 0.0)) throw ConfigError("regularization strength must be positive");
  const std::size_t dim = problem.xs.front().dimension();

  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);

  constexpr std::size_t kCalibrationSize = 1000;
  const std::vector<std::size_t> sample(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(n, kCalibrationSize)));
  const double eta0 = calibrate_eta0(problem, sample);

  AsgdState state(dim, problem.lambda, problem.loss);
  const std::size_t average_start = n;  // plain SGD during the first epoch
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    if (epoch > 0) rng.shuffle(order);
    for (auto i : order) {
      const double eta = eta_at(eta0, problem.lambda, t);
      const double mu = t > average_start ? 1.0 / static_cast<double>(t - average_start) : 1.0;
      state.step(problem.xs[i], problem.ys[i], eta, mu);
      ++t;
    }
  }
  return Solution{state.averaged_weights(), state.averaged_bias(), eta0};
}

}  // namespace linear

namespace {

TrainedClassifier train_one_vs_rest(const LabeledVectors& data, const LinearConfig& cfg, linear::Loss loss,
                                    Algorithm variant) {
  data.validate();
  if (data.empty()) throw DataError("cannot train on an empty data set");
  if (!(cfg.lambda > 0.0)) throw ConfigError("regularization strength must be positive");
  auto labels = frequency_ordered_labels(data.labels);
  if (labels.size() < 2) throw DataError("linear classifiers need at least two classes");

  LinearModel model;
  model.config = cfg;
  std::vector<double> ys(data.size());
  for (std::size_t c = 0; c < labels.size(); ++c) {
    for (std::size_t i = 0; i < data.size(); ++i) ys[i] = data.labels[i] == labels[c] ? 1.0 : -1.0;
    linear::BinaryProblem problem{data.vectors, ys, cfg.lambda, loss};
    auto solution = linear::solve_sgd(problem, cfg.epochs, derive_seed(cfg.seed, c));
    model.weights.push_back(std::move(solution.w));
    model.bias.push_back(solution.b);
  }
  return TrainedClassifier{variant, std::move(labels), data.dimension(), std::move(model)};
}

}  // namespace

TrainedClassifier train_linear_svm(const LabeledVectors& data, const LinearConfig& cfg) {
  return train_one_vs_rest(data, cfg, linear::Loss::hinge, Algorithm::linear_svm);
}

TrainedClassifier train_logreg(const LabeledVectors& data, const LinearConfig& cfg) {
  return train_one_vs_rest(data, cfg, linear::Loss::logistic, Algorithm::logreg);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace textclf
