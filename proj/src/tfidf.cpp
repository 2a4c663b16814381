#include "textclf/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "textclf/error.hpp"

namespace textclf {

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> document_frequency,
                       std::size_t n_documents)
    : terms_(std::move(terms)), document_frequency_(std::move(document_frequency)), n_documents_(n_documents) {
  if (terms_.size() != document_frequency_.size()) throw DataError("vocabulary and DF lengths differ");
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], static_cast<std::uint32_t>(i)).second) {
      throw DataError("vocabulary lists term '" + terms_[i] + "' twice");
    }
    if (document_frequency_[i] < 1 || document_frequency_[i] > n_documents_) {
      throw DataError("document frequency of '" + terms_[i] + "' outside [1, N]");
    }
  }
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TfidfModel::TfidfModel(Vocabulary vocabulary, TfidfOptions options)
    : vocabulary_(std::move(vocabulary)), options_(options) {
  const auto n = static_cast<double>(vocabulary_.n_documents());
  idf_.reserve(vocabulary_.size());
  for (auto df : vocabulary_.document_frequency()) {
    idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(df))));
  }
}

TfidfModel TfidfModel::fit(std::span<const Document> docs, TfidfOptions options) {
  Vocabulary vocab;
  vocab.n_documents_ = docs.size();
  std::vector<std::uint32_t> last_seen;  // 1-based doc number of the last DF increment
  bool any_token = false;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (auto& token : tokenize(docs[d].text)) {
      any_token = true;
      auto [it, inserted] = vocab.index_.try_emplace(token, static_cast<std::uint32_t>(vocab.terms_.size()));
      if (inserted) {
        vocab.terms_.push_back(std::move(token));
        vocab.document_frequency_.push_back(0);
        last_seen.push_back(0);
      }
      const auto i = it->second;
      if (last_seen[i] != d + 1) {
        last_seen[i] = static_cast<std::uint32_t>(d + 1);
        ++vocab.document_frequency_[i];
      }
    }
  }
  if (!any_token) throw DataError("TF-IDF fit needs at least one non-empty document");
  return TfidfModel(std::move(vocab), options);
}

TfidfModel TfidfModel::fit(const Corpus& corpus, TfidfOptions options) {
  return fit(std::span<const Document>(corpus.documents()), options);
}

SparseVector TfidfModel::transform(std::string_view text) const {
  const auto tokens = tokenize(text);
  if (tokens.empty()) return SparseVector(feature_count());
  std::unordered_map<std::uint32_t, std::size_t> counts;
  for (const auto& t : tokens) {
    if (auto idx = vocabulary_.find(t)) ++counts[*idx];
  }
  const auto length = static_cast<double>(tokens.size());
  std::vector<SparseEntry> entries;
  entries.reserve(counts.size());
  for (const auto& [index, count] : counts) {
    const double weight = static_cast<double>(count) / length * idf_[index];
    if (weight != 0.0) entries.push_back({index, weight});
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  if (options_.l2_normalize && !entries.empty()) {
    double norm = 0.0;
    for (const auto& e : entries) norm += e.weight * e.weight;
    norm = std::sqrt(norm);
    for (auto& e : entries) e.weight /= norm;
  }
  return SparseVector(feature_count(), std::move(entries));
}

nlohmann::ordered_json TfidfModel::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "textclf-tfidf";
  j["version"] = kFormatVersion;
  j["n_documents"] = vocabulary_.n_documents();
  j["l2_normalize"] = options_.l2_normalize;
  j["terms"] = vocabulary_.terms();
  j["document_frequency"] = vocabulary_.document_frequency();
  return j;
}

TfidfModel TfidfModel::from_json(const nlohmann::ordered_json& j) {
  try {
    if (j.at("format").get<std::string>() != "textclf-tfidf") throw CorruptFileError("not a TF-IDF model file");
    const int version = j.at("version").get<int>();
    if (version != kFormatVersion) {
      throw VersionError("unsupported TF-IDF model version " + std::to_string(version));
    }
    Vocabulary vocab(j.at("terms").get<std::vector<std::string>>(),
                     j.at("document_frequency").get<std::vector<std::uint32_t>>(),
                     j.at("n_documents").get<std::size_t>());
    return TfidfModel(std::move(vocab), TfidfOptions{j.at("l2_normalize").get<bool>()});
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFileError(std::string("malformed TF-IDF model: ") + e.what());
  }
}

void TfidfModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_json().dump() << '\n';
}

TfidfModel TfidfModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw CorruptFileError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

LabeledVectors transform_corpus(const TfidfModel& model, const Corpus& corpus) {
  LabeledVectors out;
  out.vectors.reserve(corpus.size());
  out.labels.reserve(corpus.size());
  for (const auto& doc : corpus) {
    out.vectors.push_back(model.transform(doc));
    out.labels.push_back(doc.category);
  }
  return out;
}

}  // namespace textclf
