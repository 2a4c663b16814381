// Acceptance gate: one PASS/FAIL/SKIP line per criterion.
//
// Criterion 10 needs the public Hawrami corpus; point TEXTCLF_HAWRAMI_CORPUS
// at a JSONL or CSV export of it to enable the check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "synthetic.hpp"
#include "textclf/classifiers.hpp"
#include "textclf/evaluation.hpp"
#include "textclf/linear_solver.hpp"
#include "textclf/pipeline.hpp"
#include "textclf/reshape.hpp"
#include "textclf/rng.hpp"
#include "textclf/sampling.hpp"
#include "textclf/tfidf.hpp"

using namespace textclf;

namespace {

struct Outcome {
  enum Kind { pass, fail, skip } kind = pass;
  std::string detail;
};

Outcome check(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

SparseVector random_vector(Rng& rng, std::size_t dim, double density) {
  std::vector<double> dense(dim, 0.0);
  for (auto& v : dense) {
    if (rng.unit() < density) v = rng.unit();
  }
  return SparseVector::from_dense(dense);
}

Outcome tfidf_oracle() {
  Rng rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto n_docs = 1 + rng.below(20);
    const auto n_terms = 1 + rng.below(50);
    std::vector<Document> docs;
    for (std::uint64_t d = 0; d < n_docs; ++d) {
      std::string text;
      const auto len = rng.below(30);
      for (std::uint64_t t = 0; t < len; ++t) text += (t ? " " : "") + std::string("t") + std::to_string(rng.below(n_terms));
      docs.push_back({"d" + std::to_string(d), text, "c", ""});
    }
    docs[0].text += " t0";
    const auto model = TfidfModel::fit(docs);
    const auto& vocab = model.vocabulary();
    std::vector<std::vector<std::string>> toks;
    for (const auto& d : docs) toks.push_back(tokenize(d.text));
    const double n = static_cast<double>(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
      const auto x = model.transform(docs[d]);
      for (std::uint32_t j = 0; j < vocab.size(); ++j) {
        const auto& term = vocab.term(j);
        double tf = 0.0, df = 0.0;
        for (const auto& t : toks[d]) tf += t == term;
        for (const auto& other : toks) df += std::find(other.begin(), other.end(), term) != other.end();
        const double expect = toks[d].empty() ? 0.0 : tf / static_cast<double>(toks[d].size()) * std::log((1 + n) / (1 + df));
        worst = std::max(worst, std::abs(x.at(j) - expect));
      }
    }
  }
  return check(worst <= 1e-9, fmt("max abs error %.3g", worst));
}

std::uint32_t knn_oracle(const LabeledVectors& train, const std::vector<std::string>& order, const SparseVector& x,
                         std::size_t k) {
  const auto dx = x.to_dense();
  double xx = 0.0;
  for (double v : dx) xx += v * v;
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto di = train.vectors[i].to_dense();
    double dot = 0.0, yy = 0.0;
    for (std::size_t j = 0; j < dx.size(); ++j) {
      dot += dx[j] * di[j];
      yy += di[j] * di[j];
    }
    const double denom = std::sqrt(xx) * std::sqrt(yy);
    dist.emplace_back(1.0 - (denom == 0.0 ? 0.0 : dot / denom), i);
  }
  std::stable_sort(dist.begin(), dist.end(), [](auto a, auto b) { return a.first < b.first; });
  std::vector<std::size_t> votes(order.size(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    ++votes[static_cast<std::size_t>(std::find(order.begin(), order.end(), train.labels[dist[i].second]) - order.begin())];
  }
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < votes.size(); ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return best;
}

Outcome knn_oracle_check() {
  Rng rng(2002);
  std::size_t mismatches = 0, queries = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto dim = 1 + rng.below(64);
    LabeledVectors train;
    const auto n_classes = 2 + rng.below(4);
    for (int i = 0; i < 200; ++i) {
      // Duplicates exercise the distance tie rule.
      train.vectors.push_back(i > 0 && rng.below(10) == 0 ? train.vectors[rng.below(train.vectors.size())]
                                                          : random_vector(rng, dim, 0.3));
      train.labels.push_back("c" + std::to_string(rng.below(n_classes)));
    }
    const auto order = frequency_ordered_labels(train.labels);
    for (std::size_t k : {1, 3, 5}) {
      const auto model = train_knn(train, KnnConfig{k, KnnMetric::cosine});
      for (int q = 0; q < 10; ++q) {
        const auto x = q % 3 == 0 ? train.vectors[rng.below(200)] : random_vector(rng, dim, 0.3);
        mismatches += predict_index(model, x) != knn_oracle(train, order, x, k);
        ++queries;
      }
    }
  }
  return check(mismatches == 0, std::to_string(mismatches) + " mismatches in " + std::to_string(queries) + " queries");
}

Outcome metric_checks() {
  const auto r = classification_report(ConfusionMatrix({"A", "B"}, {{1, 1}, {0, 2}}));
  bool ok = std::abs(r.accuracy - 0.75) < 1e-12 && std::abs(r.per_class[0].f1 - 2.0 / 3.0) < 1e-12 &&
            std::abs(r.per_class[1].f1 - 0.8) < 1e-12 && std::abs(r.f1_macro - (2.0 / 3.0 + 0.8) / 2.0) < 1e-12 &&
            std::abs(r.hamming_loss - 0.25) < 1e-12;
  Rng rng(3003);
  std::size_t violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = 1 + rng.below(8);
    std::vector<std::string> labels;
    for (std::uint64_t i = 0; i < n; ++i) labels.push_back("c" + std::to_string(i));
    std::vector<std::vector<std::size_t>> counts(n, std::vector<std::size_t>(n));
    std::size_t total = 0;
    for (auto& row : counts) {
      for (auto& c : row) total += c = rng.below(50);
    }
    if (total == 0) counts[0][0] = 1;
    const auto rep = classification_report(ConfusionMatrix(labels, counts));
    violations += std::abs(rep.weighted_recall - rep.accuracy) > 1e-12;
    violations += std::abs(rep.hamming_loss - (1.0 - rep.accuracy)) > 1e-12;
  }
  return check(ok && violations == 0,
               fmt("macro F1 %.6f, hamming %.2f", r.f1_macro, r.hamming_loss) + ", " + std::to_string(violations) +
                   " property violations");
}

Outcome kappa_checks() {
  const double same = cohens_kappa({"a", "b", "c", "a"}, {"a", "b", "c", "a"}).kappa;
  const double k = cohens_kappa({"x", "x", "y", "y"}, {"x", "y", "y", "y"}).kappa;
  return check(same == 1.0 && std::abs(k - 0.5) < 1e-12, fmt("identical %.3f, example %.12f", same, k));
}

Outcome smote_checks() {
  Rng rng(5005);
  std::size_t unequal = 0, off_segment = 0, synthetics = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto dim = 2 + rng.below(10);
    const auto n_classes = 2 + rng.below(3);
    const std::size_t k = 1 + rng.below(5);
    LabeledVectors data;
    for (std::uint64_t c = 0; c < n_classes; ++c) {
      const auto size = c == 0 ? 20 + rng.below(20) : 2 + rng.below(15);
      for (std::uint64_t i = 0; i < size; ++i) {
        data.vectors.push_back(random_vector(rng, dim, 0.5));
        data.labels.push_back("c" + std::to_string(c));
      }
    }
    const auto out = smote(data, SmoteOptions{k, rng.next(), std::nullopt});
    std::map<std::string, std::size_t> counts;
    for (const auto& l : out.labels) ++counts[l];
    for (const auto& [l, n] : counts) unequal += n != counts.begin()->second;

    for (std::size_t s = data.size(); s < out.size(); ++s) {
      ++synthetics;
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i] == out.labels[s]) members.push_back(i);
      }
      const auto kk = std::min(k, members.size() - 1);
      const auto syn = out.vectors[s].to_dense();
      bool found = false;
      for (auto xi : members) {
        std::vector<std::pair<double, std::size_t>> d;
        const auto x = data.vectors[xi].to_dense();
        for (auto xj : members) {
          if (xj == xi) continue;
          const auto y = data.vectors[xj].to_dense();
          double sq = 0.0;
          for (std::size_t j = 0; j < dim; ++j) sq += (x[j] - y[j]) * (x[j] - y[j]);
          d.emplace_back(sq, xj);
        }
        std::stable_sort(d.begin(), d.end(), [](auto a, auto b) { return a.first < b.first; });
        for (std::size_t n = 0; n < kk && !found; ++n) {
          const auto y = data.vectors[d[n].second].to_dense();
          double num = 0.0, den = 0.0;
          for (std::size_t j = 0; j < dim; ++j) {
            num += (syn[j] - x[j]) * (y[j] - x[j]);
            den += (y[j] - x[j]) * (y[j] - x[j]);
          }
          const double lambda = den > 0.0 ? num / den : 0.0;
          if (lambda < -1e-12 || lambda > 1.0 + 1e-12) continue;
          double residual = 0.0;
          for (std::size_t j = 0; j < dim; ++j) residual += std::abs(x[j] + lambda * (y[j] - x[j]) - syn[j]);
          found = residual < 1e-9;
        }
        if (found) break;
      }
      off_segment += !found;
    }
  }
  return check(unequal == 0 && off_segment == 0, std::to_string(synthetics) + " synthetics, " +
                                                      std::to_string(off_segment) + " off-segment, " +
                                                      std::to_string(unequal) + " unequal class counts");
}

Outcome split_checks() {
  Rng rng(6006);
  std::size_t violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Document> docs;
    std::map<std::string, std::size_t> sizes;
    const auto n_classes = 2 + rng.below(6);
    for (int i = 0; i < 200; ++i) {
      const auto c = "c" + std::to_string(rng.below(n_classes));
      ++sizes[c];
      docs.push_back({"d" + std::to_string(i), "x", c, ""});
    }
    for (auto& [c, n] : sizes) {
      if (n < 2) {
        docs.push_back({"extra" + c, "x", c, ""});
        ++n;
      }
    }
    const Corpus corpus(docs);
    const double fraction = 0.05 + 0.9 * rng.unit();
    const auto seed = rng.next();
    const auto split = stratified_split(corpus, fraction, seed);
    std::map<std::string, std::size_t> test;
    for (const auto& d : split.test) ++test[d.category];
    for (const auto& [c, n] : sizes) violations += std::abs(static_cast<double>(test[c]) - static_cast<double>(n) * fraction) > 1.0;
    const auto again = stratified_split(corpus, fraction, seed);
    violations += !(again.test == split.test && again.train == split.train);
  }
  return check(violations == 0, std::to_string(violations) + " violations over 100 corpora");
}

Outcome reshape_checks() {
  Rng rng(7007);
  std::size_t broken = 0, skewed = 0, not_reduced = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Document> docs;
    const auto n = 30 + rng.below(120);
    for (std::uint64_t i = 0; i < n; ++i) {
      const double u = 1.0 - rng.unit();
      const auto len = 3 + static_cast<std::size_t>(std::min(3000.0, 15.0 / std::pow(u, 1.0)));
      std::string text;
      for (std::size_t t = 0; t < len; ++t) text += (t ? " " : "") + std::string("w") + std::to_string(t % 97);
      docs.push_back({"d" + std::to_string(i), text, "c" + std::to_string(rng.below(3)), ""});
    }
    const Corpus corpus(docs);
    const auto out = reshape_corpus(corpus);
    std::size_t before = 0, after = 0;
    for (const auto& d : corpus) before += word_count(d.text);
    for (const auto& d : out) after += word_count(d.text);
    broken += before != after;
    const double s_in = sample_skewness(word_counts(corpus));
    if (s_in > 1.0) {
      ++skewed;
      not_reduced += !(std::abs(sample_skewness(word_counts(out))) < std::abs(s_in));
    }
  }
  return check(broken == 0 && not_reduced == 0, std::to_string(broken) + " conservation failures, " +
                                                     std::to_string(not_reduced) + " of " + std::to_string(skewed) +
                                                     " skewed corpora not reduced");
}

Outcome gradient_checks() {
  Rng rng(8008);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto dim = 1 + rng.below(8);
    std::vector<SparseVector> xs;
    std::vector<double> ys;
    const auto n = 2 + rng.below(15);
    for (std::uint64_t i = 0; i < n; ++i) {
      xs.push_back(random_vector(rng, dim, 0.7));
      ys.push_back(rng.below(2) ? 1.0 : -1.0);
    }
    const linear::BinaryProblem problem{xs, ys, 0.001 + rng.unit(), linear::Loss::logistic};
    std::vector<double> w(dim);
    for (auto& v : w) v = 4.0 * rng.unit() - 2.0;
    const double b = rng.unit() - 0.5;
    const auto g = linear::gradient(problem, w, b);
    const double h = 1e-6;
    for (std::size_t j = 0; j <= dim; ++j) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      (j < dim ? wp[j] : bp) += h;
      (j < dim ? wm[j] : bm) -= h;
      const double numeric = (linear::objective(problem, wp, bp) - linear::objective(problem, wm, bm)) / (2.0 * h);
      const double analytic = j < dim ? g.w[j] : g.b;
      worst = std::max(worst, std::abs(numeric - analytic) / std::max(1e-3, std::abs(analytic)));
    }
  }
  return check(worst <= 1e-5, fmt("max relative error %.3g", worst));
}

Outcome desk_scale() {
  const auto start = std::chrono::steady_clock::now();
  const auto corpus = testing::synthetic_corpus();
  const auto cfg = ScenarioConfig::for_scenario(1);
  const auto result = run_scenario(corpus, cfg);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::map<std::string, double> acc;
  for (const auto& row : result.reports) acc[row.algorithm] = row.report.accuracy;
  const double svm = acc.at(std::string(display_name(Algorithm::linear_svm)));
  bool best = true;
  std::string detail;
  for (const auto& [name, a] : acc) {
    best = best && svm >= a;
    detail += name + " " + fmt("%.3f", a) + ", ";
  }
  return check(svm >= 0.90 && best && elapsed < 60.0, detail + fmt("%.1f s", elapsed));
}

Outcome dataset_reproduction() {
  const char* path = std::getenv("TEXTCLF_HAWRAMI_CORPUS");
  if (path == nullptr || !std::filesystem::exists(path)) {
    return {Outcome::skip, "set TEXTCLF_HAWRAMI_CORPUS to the public Hawrami corpus to run"};
  }
  const auto corpus = load_corpus(path, format_for_path(path));
  const double pd = majority_imbalance(corpus);
  const auto normalized = normalize_corpus(corpus, NormalizeConfig{});
  const auto bounds = iqr_bounds(normalized);
  auto cfg = ScenarioConfig::for_scenario(1);
  cfg.algorithms = {Algorithm::linear_svm};
  const auto result = run_scenario(corpus, cfg);
  std::size_t entries = 0;
  for (const auto& s : result.stages) {
    if (s.stage == "prune") entries = s.entries;
  }
  const auto& svm = result.reports.front().report;
  const double features = static_cast<double>(result.tfidf.feature_count());
  const bool ok = std::abs(static_cast<double>(entries) - 8056.0) <= 0.05 * 8056.0 &&
                  std::abs(bounds.q1 - 54.0) <= 5.0 && std::abs(bounds.q3 - 179.0) <= 5.0 &&
                  std::abs(svm.accuracy - 0.96) <= 0.03 && std::abs(svm.f1_macro - 0.79) <= 0.05 &&
                  std::abs(features - 193381.0) <= 0.10 * 193381.0 && std::abs(pd - 156.92) <= 1.5;
  return check(ok, "entries " + std::to_string(entries) + fmt(", IQR %.1f-%.1f", bounds.q1, bounds.q3) +
                       fmt(", accuracy %.3f, macro F1 %.3f", svm.accuracy, svm.f1_macro) +
                       fmt(", features %.0f, imbalance %.2f%%", features, pd));
}

Outcome determinism() {
  testing::SyntheticSpec spec;
  spec.documents = 800;
  const auto corpus = testing::synthetic_corpus(spec);
  const auto root = std::filesystem::temp_directory_path() / "textclf_acceptance_runs";
  std::filesystem::remove_all(root);
  std::filesystem::create_directories(root);
  const auto corpus_path = root / "corpus.jsonl";
  save_corpus(corpus, corpus_path, CorpusFormat::jsonl);
  auto cfg = ScenarioConfig::for_scenario(3);
  cfg.corpus = corpus_path;
  cfg.output = root;
  auto read = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const auto first = write_run(run_scenario(cfg), cfg);
  const auto second = write_run(run_scenario(cfg), cfg);
  const auto a = read(first / "reports.json");
  const auto b = read(second / "reports.json");
  std::filesystem::remove_all(root);
  return check(!a.empty() && a == b, std::to_string(a.size()) + " bytes compared");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"TF-IDF matches naive oracle", tfidf_oracle},
      {"KNN matches exhaustive sort", knn_oracle_check},
      {"metric hand checks and properties", metric_checks},
      {"Cohen's kappa", kappa_checks},
      {"SMOTE class counts and segment test", smote_checks},
      {"stratified split allocation and determinism", split_checks},
      {"reshape token conservation and skew reduction", reshape_checks},
      {"logistic gradient vs finite differences", gradient_checks},
      {"desk-scale synthetic scenario 1", desk_scale},
      {"dataset-gated reproduction", dataset_reproduction},
      {"byte-identical reports across runs", determinism},
  };
  const double limits[] = {5.0, 5.0, 0, 0, 0, 0, 0, 0, 60.0, 0, 0};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {Outcome::fail, std::string("exception: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limits[i] > 0.0 && elapsed >= limits[i] && outcome.kind == Outcome::pass) {
      outcome = {Outcome::fail, outcome.detail + fmt(" (runtime %.2f s over %.0f s)", elapsed, limits[i])};
    }
    const char* tag = outcome.kind == Outcome::pass ? "PASS" : outcome.kind == Outcome::fail ? "FAIL" : "SKIP";
    std::printf("[%s] %2zu %s: %s (%.2f s)\n", tag, i + 1, criteria[i].first.c_str(), outcome.detail.c_str(), elapsed);
    failures += outcome.kind == Outcome::fail;
  }
  return failures == 0 ? 0 : 1;
}
