#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "textclf/corpus.hpp"
#include "textclf/sparse_vector.hpp"

namespace textclf {

/// Unigram vocabulary in first-occurrence order with document frequencies.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Rebuilds from persisted parts; checks the bijection and 1 <= DF <= N.
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> document_frequency,
             std::size_t n_documents);

  std::size_t size() const { return terms_.size(); }
  std::size_t n_documents() const { return n_documents_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::uint32_t>& document_frequency() const { return document_frequency_; }
  const std::string& term(std::uint32_t index) const { return terms_.at(index); }
  std::optional<std::uint32_t> find(std::string_view term) const;

 private:
  friend class TfidfModel;

  std::vector<std::string> terms_;
  std::vector<std::uint32_t> document_frequency_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::size_t n_documents_ = 0;
};

struct TfidfOptions {
  bool l2_normalize = false;
};

/// TF-IDF weighting: tf = count / token length, idf = ln((1 + N) / (1 + DF)).
class TfidfModel {
 public:
  static constexpr int kFormatVersion = 1;

  TfidfModel() = default;
  TfidfModel(Vocabulary vocabulary, TfidfOptions options = {});

  /// Fits on training documents; throws DataError if no document has a token.
  static TfidfModel fit(std::span<const Document> docs, TfidfOptions options = {});
  static TfidfModel fit(const Corpus& corpus, TfidfOptions options = {});

  const Vocabulary& vocabulary() const { return vocabulary_; }
  const std::vector<double>& idf() const { return idf_; }
  const TfidfOptions& options() const { return options_; }
  std::size_t feature_count() const { return vocabulary_.size(); }

  SparseVector transform(std::string_view text) const;
  SparseVector transform(const Document& doc) const { return transform(doc.text); }

  nlohmann::ordered_json to_json() const;
  static TfidfModel from_json(const nlohmann::ordered_json& j);

  void save(const std::filesystem::path& path) const;
  static TfidfModel load(const std::filesystem::path& path);

 private:
  Vocabulary vocabulary_;
  std::vector<double> idf_;
  TfidfOptions options_;
};

/// Labels carried over in corpus order.
LabeledVectors transform_corpus(const TfidfModel& model, const Corpus& corpus);

}  // namespace textclf
