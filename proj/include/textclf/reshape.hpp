#pragma once

#include <string_view>
#include <vector>

#include "textclf/corpus.hpp"

namespace textclf {

/// Word-count window taken from the first and third quartiles.
struct ReshapeBounds {
  double q1 = 0.0;
  double q3 = 0.0;

  /// Chunk size, floor(q3).
  std::size_t cap() const { return static_cast<std::size_t>(q3); }
};

/// What to do with a run of short documents that never reached q1.
enum class LeftoverPolicy {
  keep,    // emit it as its own (short) document
  append,  // glue it onto the last formed document of the category
  drop,    // discard it; breaks token conservation
};

LeftoverPolicy parse_leftover_policy(std::string_view name);
std::string_view to_string(LeftoverPolicy policy);

/// 25th/75th percentile of per-document word counts. Throws DataError on an
/// empty corpus or when q1 is not positive.
ReshapeBounds iqr_bounds(const Corpus& corpus);

/// Splits into consecutive chunks of floor(q3) tokens; the last chunk holds
/// the remainder. Chunk ids are "<parent>#<n>", n from 1. Documents that fit
/// are returned unchanged.
std::vector<Document> chunk_document(const Document& doc, double q3);

/// Concatenates documents shorter than q1, in order, until each merged
/// document reaches q1. Merged ids are "<first id>+<parts>". All documents
/// must share one category.
std::vector<Document> merge_short(const std::vector<Document>& docs, const ReshapeBounds& bounds,
                                  LeftoverPolicy leftover = LeftoverPolicy::append);

/// Chunks every document with bounds computed on the input, then merges
/// short pieces per category. Output is grouped by category in order of
/// first appearance.
Corpus reshape_corpus(const Corpus& corpus, LeftoverPolicy leftover = LeftoverPolicy::append);

/// Drops every category whose share of the input is below `min_fraction`.
Corpus prune_rare_categories(const Corpus& corpus, double min_fraction = 0.01);

}  // namespace textclf
