#include "textclf/reshape.hpp"

#include <map>
#include <string>
#include <unordered_map>

#include "textclf/error.hpp"

namespace textclf {

LeftoverPolicy parse_leftover_policy(std::string_view name) {
  if (name == "keep") return LeftoverPolicy::keep;
  if (name == "append") return LeftoverPolicy::append;
  if (name == "drop") return LeftoverPolicy::drop;
  throw ConfigError("unknown leftover policy '" + std::string(name) + "' (expected keep, append or drop)");
}

std::string_view to_string(LeftoverPolicy policy) {
  switch (policy) {
    case LeftoverPolicy::keep:
      return "keep";
    case LeftoverPolicy::append:
      return "append";
    case LeftoverPolicy::drop:
      return "drop";
  }
  return "append";
}

ReshapeBounds iqr_bounds(const Corpus& corpus) {
  if (corpus.empty()) throw DataError("IQR bounds require a non-empty corpus");
  const auto counts = word_counts(corpus);
  ReshapeBounds bounds{quantile(counts, 0.25), quantile(counts, 0.75)};
  if (!(bounds.q1 > 0.0)) throw DataError("first quartile of word counts is zero; corpus is mostly empty");
  return bounds;
}

std::vector<Document> chunk_document(const Document& doc, double q3) {
  if (!(q3 >= 1.0)) throw DataError("chunk size must be at least one word");
  const auto cap = static_cast<std::size_t>(q3);
  auto tokens = tokenize(doc.text);
  if (tokens.size() <= cap) return {doc};

  std::vector<Document> chunks;
  for (std::size_t start = 0, n = 1; start < tokens.size(); start += cap, ++n) {
    const std::size_t stop = std::min(tokens.size(), start + cap);
    Document piece{doc.id + "#" + std::to_string(n),
                   join_tokens(std::span<const std::string>(tokens).subspan(start, stop - start)), doc.category,
                   doc.source};
    chunks.push_back(std::move(piece));
  }
  return chunks;
}

std::vector<Document> merge_short(const std::vector<Document>& docs, const ReshapeBounds& bounds,
                                  LeftoverPolicy leftover) {
  if (docs.empty()) return {};
  for (const auto& doc : docs) {
    if (doc.category != docs.front().category) {
      throw DataError("merge_short expects one category, found '" + docs.front().category + "' and '" +
                      doc.category + "'");
    }
  }

  std::vector<Document> out;
  std::vector<const Document*> parts;
  std::vector<std::string> pending;

  auto merged = [&]() {
    if (parts.size() == 1) return *parts.front();
    return Document{parts.front()->id + "+" + std::to_string(parts.size()), join_tokens(pending),
                    parts.front()->category, parts.front()->source};
  };

  for (const auto& doc : docs) {
    if (static_cast<double>(word_count(doc.text)) >= bounds.q1) {
      out.push_back(doc);
      continue;
    }
    parts.push_back(&doc);
    for (auto& t : tokenize(doc.text)) pending.push_back(std::move(t));
    if (static_cast<double>(pending.size()) >= bounds.q1) {
      out.push_back(merged());
      parts.clear();
      pending.clear();
    }
  }
  if (parts.empty()) return out;

  switch (leftover) {
    case LeftoverPolicy::drop:
      break;
    case LeftoverPolicy::keep:
      out.push_back(merged());
      break;
    case LeftoverPolicy::append: {
      // Latest entry that stays within two chunk lengths after appending.
      const std::size_t limit = 2 * bounds.cap();
      for (auto it = out.rbegin(); it != out.rend(); ++it) {
        if (word_count(it->text) + pending.size() <= limit) {
          it->text += ' ';
          it->text += join_tokens(pending);
          return out;
        }
      }
      out.push_back(merged());
      break;
    }
  }
  return out;
}

Corpus reshape_corpus(const Corpus& corpus, LeftoverPolicy leftover) {
  const auto bounds = iqr_bounds(corpus);
  const auto order = corpus.categories();
  std::unordered_map<std::string, std::vector<Document>> by_category;
  for (const auto& doc : corpus) {
    auto pieces = chunk_document(doc, bounds.q3);
    auto& bucket = by_category[doc.category];
    for (auto& p : pieces) bucket.push_back(std::move(p));
  }
  std::vector<Document> out;
  for (const auto& category : order) {
    for (auto& doc : merge_short(by_category[category], bounds, leftover)) out.push_back(std::move(doc));
  }
  return Corpus(std::move(out));
}

Corpus prune_rare_categories(const Corpus& corpus, double min_fraction) {
  if (!(min_fraction >= 0.0 && min_fraction < 1.0)) throw ConfigError("min_fraction must lie in [0, 1)");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& doc : corpus) ++counts[doc.category];
  const auto total = static_cast<double>(corpus.size());
  std::vector<Document> kept;
  for (const auto& doc : corpus) {
    if (static_cast<double>(counts[doc.category]) / total >= min_fraction) kept.push_back(doc);
  }
  return Corpus(std::move(kept));
}

}  // namespace textclf
