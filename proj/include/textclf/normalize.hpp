#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "textclf/corpus.hpp"

namespace textclf {

/// Directory holding the bundled Hawrami alphabet, character table and
/// stopword list. Honors the TEXTCLF_DATA_DIR environment variable.
std::filesystem::path default_data_dir();

class AlphabetSpec {
 public:
  AlphabetSpec(std::string name, std::set<char32_t> allowed);

  /// One U+XXXX codepoint per line; blank lines and '#' comments ignored.
  static AlphabetSpec read(std::istream& in, std::string name);
  static AlphabetSpec load(const std::filesystem::path& path);

  const std::string& name() const { return name_; }
  const std::set<char32_t>& allowed() const { return allowed_; }
  bool contains(char32_t cp) const { return allowed_.contains(cp); }

 private:
  std::string name_;
  std::set<char32_t> allowed_;
};

/// Single-pass codepoint substitution table. An empty replacement deletes
/// the source codepoint.
class CharMapTable {
 public:
  CharMapTable() = default;

  /// Throws DataError if `source` is already mapped.
  void add(char32_t source, std::u32string replacement);

  /// TSV rows: "U+XXXX<TAB>replacement". A missing or empty second column
  /// means deletion.
  static CharMapTable read(std::istream& in);
  static CharMapTable load(const std::filesystem::path& path);

  /// Replacements must use only alphabet codepoints or whitespace, and must
  /// not themselves be mapped (so a second pass is the identity).
  void validate(const AlphabetSpec& alphabet) const;

  const std::vector<std::pair<char32_t, std::u32string>>& entries() const { return entries_; }
  const std::u32string* find(char32_t cp) const;
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<std::pair<char32_t, std::u32string>> entries_;
  std::unordered_map<char32_t, std::size_t> index_;
};

class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::unordered_set<std::string> words);

  /// One token per line; blank lines and '#' comments ignored.
  static StopwordList read(std::istream& in);
  static StopwordList load(const std::filesystem::path& path);

  bool contains(const std::string& token) const { return words_.contains(token); }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

struct WordLengthLimits {
  std::size_t min_len = 2;
  std::size_t max_len = 14;
  bool drop_repeated = true;  // tokens made of one codepoint repeated
};

/// Removes URLs, e-mail addresses, @mentions, #tags, digits, punctuation,
/// symbols and zero-width joiners; collapses whitespace; trims.
std::string strip_noise(std::string_view text);

std::string map_characters(std::string_view text, const CharMapTable& table);

/// Drops every whitespace-delimited token holding a codepoint outside the
/// alphabet; survivors are joined by single spaces.
std::string filter_script(std::string_view text, const AlphabetSpec& alphabet);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const StopwordList& stops);

std::vector<std::string> filter_word_lengths(const std::vector<std::string>& tokens,
                                             const WordLengthLimits& limits = {});

/// Drops empty documents and later byte-identical duplicates.
Corpus dedupe_and_drop_empty(const Corpus& corpus);

struct NormalizeConfig {
  std::optional<std::filesystem::path> charmap;
  std::optional<std::filesystem::path> alphabet;
  std::optional<std::filesystem::path> stopwords;
  WordLengthLimits limits;
};

/// Loaded and cross-validated resources for the cleaning pipeline.
struct Normalizer {
  CharMapTable charmap;
  AlphabetSpec alphabet;
  StopwordList stopwords;
  WordLengthLimits limits;

  /// Loads files named by `cfg`, falling back to the bundled defaults.
  static Normalizer from_config(const NormalizeConfig& cfg);

  std::string normalize_text(std::string_view text) const;
};

Corpus normalize_corpus(const Corpus& corpus, const Normalizer& normalizer);
Corpus normalize_corpus(const Corpus& corpus, const NormalizeConfig& cfg);

}  // namespace textclf
