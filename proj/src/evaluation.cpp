#include "textclf/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "textclf/error.hpp"

namespace textclf {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels, std::vector<std::vector<std::size_t>> counts)
    : labels_(std::move(labels)), counts_(std::move(counts)) {
  if (counts_.size() != labels_.size()) throw DataError("confusion matrix must be square");
  for (const auto& row : counts_) {
    if (row.size() != labels_.size()) throw DataError("confusion matrix must be square");
  }
}

std::size_t ConfusionMatrix::total() const {
  std::size_t sum = 0;
  for (const auto& row : counts_) sum = std::accumulate(row.begin(), row.end(), sum);
  return sum;
}

ConfusionMatrix confusion_matrix(const std::vector<std::string>& y_true, const std::vector<std::string>& y_pred,
                                 const std::vector<std::string>& classes) {
  if (y_true.size() != y_pred.size()) {
    throw DataError("label lists differ in length (" + std::to_string(y_true.size()) + " vs " +
                    std::to_string(y_pred.size()) + ")");
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (!index.emplace(classes[i], i).second) throw DataError("class '" + classes[i] + "' listed twice");
  }
  auto lookup = [&](const std::string& label) {
    auto it = index.find(label);
    if (it == index.end()) throw DataError("label '" + label + "' is not among the classes");
    return it->second;
  };
  std::vector<std::vector<std::size_t>> counts(classes.size(), std::vector<std::size_t>(classes.size(), 0));
  for (std::size_t i = 0; i < y_true.size(); ++i) ++counts[lookup(y_true[i])][lookup(y_pred[i])];
  return ConfusionMatrix(classes, std::move(counts));
}

EvaluationReport classification_report(const ConfusionMatrix& matrix) {
  const std::size_t total = matrix.total();
  if (total == 0) throw DataError("cannot report on an empty confusion matrix");
  const auto n = matrix.size();
  const auto dtotal = static_cast<double>(total);

  EvaluationReport report;
  report.matrix = matrix;
  std::size_t correct = 0;
  for (std::size_t c = 0; c < n; ++c) correct += matrix.at(c, c);
  report.accuracy = static_cast<double>(correct) / dtotal;
  report.hamming_loss = static_cast<double>(total - correct) / dtotal;

  double f1_sum = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t o = 0; o < n; ++o) {
      predicted += matrix.at(o, c);
      actual += matrix.at(c, o);
    }
    const auto tp = static_cast<double>(matrix.at(c, c));
    ClassMetrics m;
    m.label = matrix.labels()[c];
    m.support = actual;
    m.precision = ratio(tp, static_cast<double>(predicted));
    m.recall = ratio(tp, static_cast<double>(actual));
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    const double weight = static_cast<double>(actual) / dtotal;
    report.weighted_precision += weight * m.precision;
    report.weighted_recall += weight * m.recall;
    report.weighted_f1 += weight * m.f1;
    f1_sum += m.f1;
    report.per_class.push_back(std::move(m));
  }
  report.f1_macro = n == 0 ? 0.0 : f1_sum / static_cast<double>(n);
  return report;
}

KappaResult cohens_kappa(const std::vector<std::string>& labels_a, const std::vector<std::string>& labels_b) {
  if (labels_a.size() != labels_b.size()) throw DataError("annotation lists differ in length");
  if (labels_a.empty()) throw DataError("kappa needs at least one annotated item");
  const auto n = static_cast<double>(labels_a.size());
  std::map<std::string, std::pair<std::size_t, std::size_t>> marginals;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    ++marginals[labels_a[i]].first;
    ++marginals[labels_b[i]].second;
    if (labels_a[i] == labels_b[i]) ++agree;
  }
  KappaResult r;
  r.p_o = static_cast<double>(agree) / n;
  for (const auto& [label, counts] : marginals) {
    r.p_e += (static_cast<double>(counts.first) / n) * (static_cast<double>(counts.second) / n);
  }
  if (r.p_e >= 1.0) {
    if (r.p_o == 1.0) {
      r.kappa = 1.0;
      return r;
    }
    throw DataError("kappa is undefined when chance agreement is 1");
  }
  r.kappa = (r.p_o - r.p_e) / (1.0 - r.p_e);
  return r;
}

nlohmann::ordered_json report_to_json(const EvaluationReport& report, bool include_timing) {
  nlohmann::ordered_json j;
  j["accuracy"] = report.accuracy;
  j["precision"] = report.weighted_precision;
  j["recall"] = report.weighted_recall;
  j["f1"] = report.weighted_f1;
  j["f1_macro"] = report.f1_macro;
  j["hamming_loss"] = report.hamming_loss;
  if (include_timing) j["training_time_s"] = report.training_time_s;
  auto per_class = nlohmann::ordered_json::array();
  for (const auto& m : report.per_class) {
    nlohmann::ordered_json row;
    row["label"] = m.label;
    row["precision"] = m.precision;
    row["recall"] = m.recall;
    row["f1"] = m.f1;
    row["support"] = m.support;
    per_class.push_back(std::move(row));
  }
  j["per_class"] = std::move(per_class);
  j["confusion_matrix"] = {{"labels", report.matrix.labels()}, {"counts", report.matrix.counts()}};
  return j;
}

std::string reports_to_markdown(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "| Scenario | Algorithm | Accuracy | Precision | Recall | F1-score | F1 macro average | Hamming loss | "
         "Training time (s) |\n";
  out << "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    out << "| " << row.scenario << " | " << row.algorithm << " | " << fixed(r.accuracy, 2) << " | "
        << fixed(r.weighted_precision, 2) << " | " << fixed(r.weighted_recall, 2) << " | " << fixed(r.weighted_f1, 2)
        << " | " << fixed(r.f1_macro, 2) << " | " << fixed(r.hamming_loss, 2) << " | "
        << fixed(r.training_time_s, 2) << " |\n";
  }
  return out.str();
}

}  // namespace textclf
