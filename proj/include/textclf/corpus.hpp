#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace textclf {

/// One labeled text entry.
struct Document {
  std::string id;
  std::string text;
  std::string category;
  std::string source;  // provenance tag, may be empty

  bool operator==(const Document&) const = default;
};

/// Ordered, immutable collection of documents with unique ids and
/// non-empty categories. Construction validates both.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Document> documents);

  const std::vector<Document>& documents() const { return documents_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  const Document& operator[](std::size_t i) const { return documents_[i]; }
  auto begin() const { return documents_.begin(); }
  auto end() const { return documents_.end(); }

  /// Distinct labels in order of first appearance.
  std::vector<std::string> categories() const;

  bool operator==(const Corpus&) const = default;

 private:
  std::vector<Document> documents_;
};

enum class CorpusFormat { jsonl, csv };

/// Picks the format from the file extension (.csv, otherwise jsonl).
CorpusFormat format_for_path(const std::filesystem::path& path);
CorpusFormat parse_corpus_format(std::string_view name);

Corpus read_corpus(std::istream& in, CorpusFormat format);
void write_corpus(std::ostream& out, const Corpus& corpus, CorpusFormat format);

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format);

/// Splits on ASCII whitespace, dropping empty pieces.
std::vector<std::string> tokenize(std::string_view text);

/// Number of maximal whitespace-delimited tokens.
std::size_t word_count(std::string_view text);

/// Joins tokens with single spaces.
std::string join_tokens(std::span<const std::string> tokens);

struct CategoryStats {
  std::string category;
  std::size_t entries = 0;
  double percent = 0.0;
  std::size_t min_words = 0;
  std::size_t max_words = 0;
  double avg_words = 0.0;
  std::size_t total_words = 0;
  std::size_t unique_words = 0;
  double q1_words = 0.0;
  double q3_words = 0.0;
};

/// Quantile with linear interpolation between closest ranks
/// (position q * (n - 1) in the sorted values). Throws on empty input.
double quantile(std::span<const double> values, double q);

/// Per-category descriptive statistics, sorted by entry count descending
/// (ties keep first-appearance order). Throws DataError on an empty corpus.
std::vector<CategoryStats> corpus_summary(const Corpus& corpus);

/// |a - b| / ((a + b) / 2) * 100.
double percentage_difference(double a, double b);

/// Percentage difference between the largest category and the mean
/// category size (entries / number of categories).
double majority_imbalance(const Corpus& corpus);

/// Adjusted Fisher-Pearson skewness, g1 * sqrt(n(n-1)) / (n-2).
double sample_skewness(std::span<const double> values);

/// Per-document word counts in corpus order.
std::vector<double> word_counts(const Corpus& corpus);

}  // namespace textclf
