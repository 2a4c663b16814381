#include "textclf/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "textclf/error.hpp"

namespace textclf {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

void check_document(const Document& doc, std::size_t line) {
  if (doc.id.empty()) throw DataError("line " + std::to_string(line) + ": empty document id");
  if (doc.category.empty()) {
    throw DataError("line " + std::to_string(line) + ": document '" + doc.id + "' has no category");
  }
}

std::string json_field(const nlohmann::json& row, const char* key, bool required, std::size_t line) {
  auto it = row.find(key);
  if (it == row.end() || it->is_null()) {
    if (required) {
      throw DataError("line " + std::to_string(line) + ": missing required field '" + key + "'");
    }
    return {};
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return it->dump();
  throw DataError("line " + std::to_string(line) + ": field '" + key + "' must be a string");
}

Corpus read_jsonl(std::istream& in) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::all_of(line.begin(), line.end(), is_space)) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError("line " + std::to_string(line_no) + ": JSON parse error: " + e.what());
    }
    if (!row.is_object()) throw DataError("line " + std::to_string(line_no) + ": expected a JSON object");
    Document doc{json_field(row, "id", true, line_no), json_field(row, "text", true, line_no),
                 json_field(row, "category", true, line_no), json_field(row, "source", false, line_no)};
    check_document(doc, line_no);
    if (!seen.insert(doc.id).second) {
      throw DataError("line " + std::to_string(line_no) + ": duplicate document id '" + doc.id + "'");
    }
    docs.push_back(std::move(doc));
  }
  return Corpus(std::move(docs));
}

// RFC-4180 reader. Returns false at end of input. `line_no` is advanced past
// every physical line consumed, so quoted fields spanning lines are counted.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no,
                     std::size_t& record_line) {
  fields.clear();
  int c = in.get();
  if (c == std::char_traits<char>::eof()) return false;
  ++line_no;
  record_line = line_no;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (;; c = in.get()) {
    if (c == std::char_traits<char>::eof()) {
      if (quoted) throw DataError("line " + std::to_string(record_line) + ": unterminated quoted field");
      fields.push_back(std::move(field));
      return true;
    }
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_no;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (ch == '\r' && in.peek() == '\n') {
      // CRLF terminator, handled on '\n'
    } else if (ch == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else if (ch == '"') {
      throw DataError("line " + std::to_string(line_no) + ": stray quote inside unquoted field");
    } else {
      field.push_back(ch);
      field_started = true;
    }
  }
}

Corpus read_csv(std::istream& in) {
  std::vector<std::string> fields;
  std::size_t line_no = 0;
  std::size_t record_line = 0;
  if (!read_csv_record(in, fields, line_no, record_line)) throw DataError("line 1: missing CSV header");
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < fields.size(); ++i) column[fields[i]] = i;
  for (const char* key : {"id", "text", "category"}) {
    if (!column.contains(key)) throw DataError("line 1: CSV header lacks required column '" + std::string(key) + "'");
  }
  const auto source_col = column.find("source");

  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  while (read_csv_record(in, fields, line_no, record_line)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != column.size()) {
      throw DataError("line " + std::to_string(record_line) + ": expected " + std::to_string(column.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    Document doc{fields[column["id"]], fields[column["text"]], fields[column["category"]],
                 source_col == column.end() ? std::string{} : fields[source_col->second]};
    check_document(doc, record_line);
    if (!seen.insert(doc.id).second) {
      throw DataError("line " + std::to_string(record_line) + ": duplicate document id '" + doc.id + "'");
    }
    docs.push_back(std::move(doc));
  }
  return Corpus(std::move(docs));
}

void write_csv_field(std::ostream& out, const std::string& value) {
  const bool needs_quotes = value.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) {
    out << value;
    return;
  }
  out << '"';
  for (char c : value) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

Corpus::Corpus(std::vector<Document> documents) : documents_(std::move(documents)) {
  std::unordered_set<std::string_view> ids;
  for (const auto& doc : documents_) {
    if (doc.category.empty()) throw DataError("document '" + doc.id + "' has an empty category");
    if (!ids.insert(doc.id).second) throw DataError("duplicate document id '" + doc.id + "'");
  }
}

std::vector<std::string> Corpus::categories() const {
  std::vector<std::string> out;
  std::unordered_set<std::string_view> seen;
  for (const auto& doc : documents_) {
    if (seen.insert(doc.category).second) out.push_back(doc.category);
  }
  return out;
}

CorpusFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? CorpusFormat::csv : CorpusFormat::jsonl;
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::jsonl;
  if (name == "csv") return CorpusFormat::csv;
  throw ConfigError("unknown corpus format '" + std::string(name) + "' (expected jsonl or csv)");
}

Corpus read_corpus(std::istream& in, CorpusFormat format) {
  return format == CorpusFormat::csv ? read_csv(in) : read_jsonl(in);
}

void write_corpus(std::ostream& out, const Corpus& corpus, CorpusFormat format) {
  if (format == CorpusFormat::csv) {
    out << "id,text,category,source\n";
    for (const auto& doc : corpus) {
      write_csv_field(out, doc.id);
      out << ',';
      write_csv_field(out, doc.text);
      out << ',';
      write_csv_field(out, doc.category);
      out << ',';
      write_csv_field(out, doc.source);
      out << '\n';
    }
    return;
  }
  for (const auto& doc : corpus) {
    nlohmann::ordered_json row;
    row["id"] = doc.id;
    row["text"] = doc.text;
    row["category"] = doc.category;
    row["source"] = doc.source;
    out << row.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  try {
    return read_corpus(in, format);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file " + path.string());
  write_corpus(out, corpus, format);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    if (is_space(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& token : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw DataError("quantile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<CategoryStats> corpus_summary(const Corpus& corpus) {
  if (corpus.empty()) throw DataError("corpus summary requires a non-empty corpus");

  struct Accumulator {
    std::vector<double> counts;
    std::unordered_set<std::string> vocabulary;
  };
  std::vector<std::string> order = corpus.categories();
  std::unordered_map<std::string, Accumulator> acc;
  for (const auto& doc : corpus) {
    auto& a = acc[doc.category];
    auto tokens = tokenize(doc.text);
    a.counts.push_back(static_cast<double>(tokens.size()));
    for (auto& t : tokens) a.vocabulary.insert(std::move(t));
  }

  std::vector<CategoryStats> out;
  for (const auto& category : order) {
    const auto& a = acc[category];
    CategoryStats s;
    s.category = category;
    s.entries = a.counts.size();
    s.percent = 100.0 * static_cast<double>(s.entries) / static_cast<double>(corpus.size());
    double total = 0.0;
    for (double c : a.counts) total += c;
    s.total_words = static_cast<std::size_t>(total);
    s.min_words = static_cast<std::size_t>(*std::min_element(a.counts.begin(), a.counts.end()));
    s.max_words = static_cast<std::size_t>(*std::max_element(a.counts.begin(), a.counts.end()));
    s.avg_words = total / static_cast<double>(s.entries);
    s.unique_words = a.vocabulary.size();
    s.q1_words = quantile(a.counts, 0.25);
    s.q3_words = quantile(a.counts, 0.75);
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CategoryStats& a, const CategoryStats& b) { return a.entries > b.entries; });
  return out;
}

double percentage_difference(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw DataError("percentage difference requires non-negative values");
  if (a + b <= 0.0) throw DataError("percentage difference is undefined when both values are zero");
  return std::abs(a - b) / ((a + b) / 2.0) * 100.0;
}

double majority_imbalance(const Corpus& corpus) {
  const auto stats = corpus_summary(corpus);
  const double mean = static_cast<double>(corpus.size()) / static_cast<double>(stats.size());
  return percentage_difference(static_cast<double>(stats.front().entries), mean);
}

double sample_skewness(std::span<const double> values) {
  const auto n = static_cast<double>(values.size());
  if (values.size() < 3) throw DataError("skewness needs at least 3 values");
  double mean = 0.0;
  double scale = 0.0;
  for (double v : values) {
    mean += v;
    scale = std::max(scale, std::abs(v));
  }
  mean /= n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  if (m2 <= noise * noise) throw DataError("skewness is undefined for zero-variance data");
  const double g1 = m3 / std::pow(m2, 1.5);
  return g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
}

std::vector<double> word_counts(const Corpus& corpus) {
  std::vector<double> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus) out.push_back(static_cast<double>(word_count(doc.text)));
  return out;
}

}  // namespace textclf
