#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace textclf {

/// counts[t][p] = instances of true class t predicted as p.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  ConfusionMatrix(std::vector<std::string> labels, std::vector<std::vector<std::size_t>> counts);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::vector<std::size_t>>& counts() const { return counts_; }
  std::size_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth][predicted]; }
  std::size_t size() const { return labels_.size(); }
  std::size_t total() const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<std::size_t>> counts_;
};

/// Throws DataError on length mismatch or a label missing from `classes`.
ConfusionMatrix confusion_matrix(const std::vector<std::string>& y_true, const std::vector<std::string>& y_pred,
                                 const std::vector<std::string>& classes);

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvaluationReport {
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  double f1_macro = 0.0;
  double hamming_loss = 0.0;
  double training_time_s = 0.0;
  ConfusionMatrix matrix;
};

/// Accuracy, per-class and support-weighted precision/recall/F1, macro F1
/// and Hamming loss. Undefined ratios (0/0) count as 0. Throws DataError on
/// an empty matrix.
EvaluationReport classification_report(const ConfusionMatrix& matrix);

struct KappaResult {
  double p_o = 0.0;
  double p_e = 0.0;
  double kappa = 0.0;
};

/// Cohen's kappa between two annotators.
KappaResult cohens_kappa(const std::vector<std::string>& labels_a, const std::vector<std::string>& labels_b);

/// Report as JSON. Wall-clock timing is left out unless `include_timing`,
/// so reports of identical runs compare byte for byte.
nlohmann::ordered_json report_to_json(const EvaluationReport& report, bool include_timing = false);

struct ReportRow {
  std::string scenario;
  std::string algorithm;
  EvaluationReport report;
};

/// Markdown table: Scenario | Algorithm | Accuracy | Precision | Recall |
/// F1-score | F1 macro average | Hamming loss | Training time (s).
std::string reports_to_markdown(const std::vector<ReportRow>& rows);

}  // namespace textclf
