#include "textclf/normalize.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <unordered_set>

#include "textclf/error.hpp"
#include "textclf/utf8.hpp"

#ifndef TEXTCLF_DEFAULT_DATA_DIR
#define TEXTCLF_DEFAULT_DATA_DIR "data/hawrami"
#endif

namespace textclf {

namespace {

bool in_range(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

bool is_unicode_space(char32_t cp) {
  return cp == U' ' || in_range(cp, 0x09, 0x0D) || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
         in_range(cp, 0x2000, 0x200B) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
         cp == 0x3000;
}

// Invisible formatting characters: deleted without leaving a gap.
bool is_format_char(char32_t cp) {
  return cp == 0xAD || cp == 0x061C || in_range(cp, 0x200C, 0x200F) || in_range(cp, 0x202A, 0x202E) ||
         in_range(cp, 0x2060, 0x206F) || in_range(cp, 0xFE00, 0xFE0F) || cp == 0xFEFF;
}

bool is_digit(char32_t cp) {
  return in_range(cp, U'0', U'9') || in_range(cp, 0x0660, 0x0669) || in_range(cp, 0x06F0, 0x06F9) ||
         in_range(cp, 0x07C0, 0x07C9) || in_range(cp, 0x0966, 0x096F) || in_range(cp, 0xFF10, 0xFF19);
}

bool is_punct_or_symbol(char32_t cp) {
  if (cp < 0x80) {
    return in_range(cp, 0x00, 0x08) || in_range(cp, 0x0E, 0x1F) || in_range(cp, 0x21, 0x2F) ||
           in_range(cp, 0x3A, 0x40) || in_range(cp, 0x5B, 0x60) || in_range(cp, 0x7B, 0x7F);
  }
  if (in_range(cp, 0x80, 0x9F) && cp != 0x85) return true;
  if (in_range(cp, 0xA1, 0xBF)) return cp != 0xAA && cp != 0xB5 && cp != 0xBA && cp != 0xAD;
  if (cp == 0xD7 || cp == 0xF7) return true;
  // Arabic-script punctuation and signs.
  if (in_range(cp, 0x0600, 0x060F) || cp == 0x061B || in_range(cp, 0x061D, 0x061F) ||
      in_range(cp, 0x066A, 0x066D) || cp == 0x06D4 || cp == 0x06DD || cp == 0x06DE || cp == 0x06E9 ||
      cp == 0x06FD || cp == 0x06FE) {
    return true;
  }
  return in_range(cp, 0x2010, 0x2027) || in_range(cp, 0x2030, 0x205E) || in_range(cp, 0x2070, 0x2BFF) ||
         in_range(cp, 0x2E00, 0x2E7F) || in_range(cp, 0x3001, 0x303F) || cp == 0xFD3E || cp == 0xFD3F ||
         cp == 0xFDFC || cp == 0xFDFD || in_range(cp, 0xFE10, 0xFE1F) || in_range(cp, 0xFE30, 0xFE6F) ||
         in_range(cp, 0xFF01, 0xFF0F) || in_range(cp, 0xFF1A, 0xFF20) || in_range(cp, 0xFF3B, 0xFF40) ||
         in_range(cp, 0xFF5B, 0xFF65) || in_range(cp, 0xFFE0, 0xFFEE) || in_range(cp, 0xFFF9, 0xFFFD) ||
         in_range(cp, 0x1D100, 0x1D1FF) || in_range(cp, 0x1F000, 0x1FAFF);
}

char32_t ascii_lower(char32_t cp) { return in_range(cp, U'A', U'Z') ? cp + 32 : cp; }

bool starts_with_ci(std::u32string_view token, std::u32string_view prefix) {
  if (token.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (ascii_lower(token[i]) != prefix[i]) return false;
  }
  return true;
}

// URL, e-mail, @mention and #tag recognition on a raw whitespace token.
bool is_web_token(std::u32string_view token) {
  if (token.find(U"://") != std::u32string_view::npos) return true;
  if (token.find(U'@') != std::u32string_view::npos || token.find(char32_t{0xFF20}) != std::u32string_view::npos) {
    return true;
  }
  std::size_t i = 0;
  while (i < token.size() && token[i] != U'#' && token[i] != 0xFF03 && is_punct_or_symbol(token[i])) ++i;
  const auto rest = token.substr(i);
  if (!rest.empty() && (rest[0] == U'#' || rest[0] == 0xFF03)) return true;
  return starts_with_ci(rest, U"www.");
}

bool is_repeated_codepoint(std::string_view token) {
  const auto cps = utf8::decode(token);
  if (cps.size() < 2) return false;
  return std::all_of(cps.begin(), cps.end(), [&](char32_t c) { return c == cps.front(); });
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    fn(line, line_no);
  }
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::ifstream open_or_throw(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(std::string("cannot open ") + what + " file " + path.string());
  return in;
}

}  // namespace

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("TEXTCLF_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return TEXTCLF_DEFAULT_DATA_DIR;
}

AlphabetSpec::AlphabetSpec(std::string name, std::set<char32_t> allowed)
    : name_(std::move(name)), allowed_(std::move(allowed)) {
  if (allowed_.empty()) throw DataError("alphabet '" + name_ + "' is empty");
  for (char32_t cp : allowed_) {
    if (is_unicode_space(cp)) throw DataError("alphabet '" + name_ + "' lists whitespace " + utf8::format_codepoint(cp));
  }
}

AlphabetSpec AlphabetSpec::read(std::istream& in, std::string name) {
  std::set<char32_t> allowed;
  for_each_line(in, [&](const std::string& raw, std::size_t line_no) {
    auto line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) return;
    try {
      if (!allowed.insert(utf8::parse_codepoint(line)).second) {
        throw DataError("codepoint " + line + " listed twice");
      }
    } catch (const DataError& e) {
      throw DataError("alphabet line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return AlphabetSpec(std::move(name), std::move(allowed));
}

AlphabetSpec AlphabetSpec::load(const std::filesystem::path& path) {
  auto in = open_or_throw(path, "alphabet");
  return read(in, path.stem().string());
}

void CharMapTable::add(char32_t source, std::u32string replacement) {
  if (index_.contains(source)) {
    throw DataError("character table maps " + utf8::format_codepoint(source) + " twice");
  }
  index_.emplace(source, entries_.size());
  entries_.emplace_back(source, std::move(replacement));
}

const std::u32string* CharMapTable::find(char32_t cp) const {
  auto it = index_.find(cp);
  return it == index_.end() ? nullptr : &entries_[it->second].second;
}

CharMapTable CharMapTable::read(std::istream& in) {
  CharMapTable table;
  for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    if (trim(line).empty() || line.front() == '#') return;
    const auto tab = line.find('\t');
    const std::string source = trim(line.substr(0, tab));
    const std::string replacement = tab == std::string::npos ? std::string{} : line.substr(tab + 1);
    try {
      table.add(utf8::parse_codepoint(source), utf8::decode(replacement));
    } catch (const DataError& e) {
      throw DataError("character table line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return table;
}

CharMapTable CharMapTable::load(const std::filesystem::path& path) {
  auto in = open_or_throw(path, "character table");
  return read(in);
}

void CharMapTable::validate(const AlphabetSpec& alphabet) const {
  for (const auto& [source, replacement] : entries_) {
    for (char32_t cp : replacement) {
      if (!alphabet.contains(cp) && cp != U' ') {
        throw DataError("character table maps " + utf8::format_codepoint(source) + " to " +
                        utf8::format_codepoint(cp) + ", which is outside alphabet '" + alphabet.name() + "'");
      }
      if (index_.contains(cp)) {
        throw DataError("character table replacement " + utf8::format_codepoint(cp) + " is itself mapped");
      }
    }
  }
}

StopwordList::StopwordList(std::unordered_set<std::string> words) : words_(std::move(words)) {
  if (words_.contains("")) throw DataError("stopword list contains an empty entry");
}

StopwordList StopwordList::read(std::istream& in) {
  std::unordered_set<std::string> words;
  for_each_line(in, [&](const std::string& raw, std::size_t) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') return;
    words.insert(std::move(line));
  });
  return StopwordList(std::move(words));
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  auto in = open_or_throw(path, "stopword");
  return read(in);
}

std::string strip_noise(std::string_view text) {
  const auto cps = utf8::decode(text);
  std::u32string kept;
  kept.reserve(cps.size());

  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_unicode_space(cps[i])) ++i;
    const std::size_t start = i;
    while (i < cps.size() && !is_unicode_space(cps[i])) ++i;
    if (i == start) break;
    const std::u32string_view token(cps.data() + start, i - start);
    if (is_web_token(token)) continue;
    kept.push_back(U' ');
    for (char32_t cp : token) {
      if (is_format_char(cp)) continue;
      kept.push_back(is_digit(cp) || is_punct_or_symbol(cp) ? U' ' : cp);
    }
  }

  std::string out;
  out.reserve(kept.size());
  bool pending_space = false;
  for (char32_t cp : kept) {
    if (cp == U' ') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    utf8::append(out, cp);
  }
  return out;
}

std::string map_characters(std::string_view text, const CharMapTable& table) {
  if (table.empty()) return std::string(text);
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : utf8::decode(text)) {
    if (const auto* replacement = table.find(cp)) {
      for (char32_t r : *replacement) utf8::append(out, r);
    } else {
      utf8::append(out, cp);
    }
  }
  return out;
}

std::string filter_script(std::string_view text, const AlphabetSpec& alphabet) {
  std::vector<std::string> kept;
  for (auto& token : tokenize(text)) {
    const auto cps = utf8::decode(token);
    if (std::all_of(cps.begin(), cps.end(), [&](char32_t cp) { return alphabet.contains(cp); })) {
      kept.push_back(std::move(token));
    }
  }
  return join_tokens(kept);
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const StopwordList& stops) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stops.contains(t)) out.push_back(t);
  }
  return out;
}

std::vector<std::string> filter_word_lengths(const std::vector<std::string>& tokens, const WordLengthLimits& limits) {
  if (limits.min_len < 1 || limits.max_len < limits.min_len) {
    throw ConfigError("word length limits require 1 <= min_len <= max_len");
  }
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    const auto len = utf8::length(t);
    if (len < limits.min_len || len > limits.max_len) continue;
    if (limits.drop_repeated && is_repeated_codepoint(t)) continue;
    out.push_back(t);
  }
  return out;
}

Corpus dedupe_and_drop_empty(const Corpus& corpus) {
  std::vector<Document> kept;
  std::unordered_set<std::string_view> seen;
  for (const auto& doc : corpus) {
    if (word_count(doc.text) == 0) continue;
    if (!seen.insert(doc.text).second) continue;
    kept.push_back(doc);
  }
  return Corpus(std::move(kept));
}

Normalizer Normalizer::from_config(const NormalizeConfig& cfg) {
  const auto dir = default_data_dir();
  auto alphabet = AlphabetSpec::load(cfg.alphabet.value_or(dir / "alphabet.txt"));
  auto charmap = CharMapTable::load(cfg.charmap.value_or(dir / "charmap.tsv"));
  auto stopwords = StopwordList::load(cfg.stopwords.value_or(dir / "stopwords.txt"));
  charmap.validate(alphabet);
  if (cfg.limits.min_len < 1 || cfg.limits.max_len < cfg.limits.min_len) {
    throw ConfigError("word length limits require 1 <= min_len <= max_len");
  }
  return Normalizer{std::move(charmap), std::move(alphabet), std::move(stopwords), cfg.limits};
}

std::string Normalizer::normalize_text(std::string_view text) const {
  auto cleaned = filter_script(map_characters(strip_noise(text), charmap), alphabet);
  auto tokens = filter_word_lengths(remove_stopwords(tokenize(cleaned), stopwords), limits);
  return join_tokens(tokens);
}

Corpus normalize_corpus(const Corpus& corpus, const Normalizer& normalizer) {
  std::vector<Document> docs;
  docs.reserve(corpus.size());
  for (const auto& doc : corpus) {
    Document cleaned = doc;
    cleaned.text = normalizer.normalize_text(doc.text);
    docs.push_back(std::move(cleaned));
  }
  return dedupe_and_drop_empty(Corpus(std::move(docs)));
}

Corpus normalize_corpus(const Corpus& corpus, const NormalizeConfig& cfg) {
  return normalize_corpus(corpus, Normalizer::from_config(cfg));
}

}  // namespace textclf
