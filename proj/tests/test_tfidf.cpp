#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>

#include "textclf/error.hpp"
#include "textclf/rng.hpp"
#include "textclf/tfidf.hpp"

using namespace textclf;

namespace {

std::vector<Document> docs_of(const std::vector<std::string>& texts) {
  std::vector<Document> out;
  for (std::size_t i = 0; i < texts.size(); ++i) out.push_back({"d" + std::to_string(i), texts[i], "c", ""});
  return out;
}

std::filesystem::path temp_file(const char* name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_CASE("vocabulary and document frequency by hand") {
  const auto model = TfidfModel::fit(docs_of({"a b a", "b c"}));
  const auto& v = model.vocabulary();
  CHECK(v.terms() == std::vector<std::string>{"a", "b", "c"});
  CHECK(v.document_frequency() == std::vector<std::uint32_t>{1, 2, 1});
  CHECK(v.n_documents() == 2);
  CHECK(model.idf()[1] == doctest::Approx(std::log(3.0 / 3.0)));
}

TEST_CASE("weight of a term by hand") {
  const auto model = TfidfModel::fit(docs_of({"a b a", "b c"}));
  const auto x = model.transform("a b a");
  CHECK(model.idf()[0] == doctest::Approx(0.405465).epsilon(1e-6));
  CHECK(x.at(0) == doctest::Approx(0.270310).epsilon(1e-6));
  // b occurs everywhere, so it carries no weight and is not stored.
  CHECK(x.at(1) == 0.0);
  CHECK(x.nnz() == 1);
}

TEST_CASE("term in every document has zero idf") {
  const auto model = TfidfModel::fit(docs_of({"x y", "x z", "x"}));
  CHECK(model.idf()[0] == 0.0);
}

TEST_CASE("out of vocabulary only gives a zero vector") {
  const auto model = TfidfModel::fit(docs_of({"a b a", "b c"}));
  CHECK(model.transform("q r s").is_zero());
  CHECK(model.transform("").is_zero());
  // OOV tokens still count toward the length.
  CHECK(model.transform("a q").at(0) == doctest::Approx(0.5 * std::log(1.5)));
}

TEST_CASE("transform matches a naive recomputation") {
  Rng rng(100);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> texts(1 + rng.below(20));
    const auto n_terms = 1 + rng.below(50);
    for (auto& t : texts) {
      const auto len = rng.below(15);
      for (std::uint64_t i = 0; i < len; ++i) t += (i ? " " : "") + std::string("w") + std::to_string(rng.below(n_terms));
    }
    texts[0] += " w0";
    const auto docs = docs_of(texts);
    const auto model = TfidfModel::fit(docs);
    const auto& vocab = model.vocabulary();
    const double n = static_cast<double>(docs.size());
    for (const auto& d : docs) {
      const auto tokens = tokenize(d.text);
      const auto x = model.transform(d);
      for (std::uint32_t j = 0; j < vocab.size(); ++j) {
        const auto& term = vocab.term(j);
        double df = 0.0;
        for (const auto& other : docs) {
          const auto ot = tokenize(other.text);
          if (std::find(ot.begin(), ot.end(), term) != ot.end()) df += 1.0;
        }
        double count = 0.0;
        for (const auto& t : tokens) count += t == term ? 1.0 : 0.0;
        const double expect = tokens.empty() ? 0.0 : count / static_cast<double>(tokens.size()) * std::log((1 + n) / (1 + df));
        CHECK(std::abs(x.at(j) - expect) <= 1e-9);
      }
    }
  }
}

TEST_CASE("l2 option gives unit vectors") {
  const auto model = TfidfModel::fit(docs_of({"a b a", "b c", "b d e"}), TfidfOptions{true});
  CHECK(model.transform("a c d").norm() == doctest::Approx(1.0));
  CHECK(model.transform("b").is_zero());
}

TEST_CASE("transform corpus") {
  const auto model = TfidfModel::fit(docs_of({"a b a", "b c"}));
  CHECK(transform_corpus(model, Corpus{}).empty());
  const Corpus corpus({{"x", "b c", "q", ""}, {"y", "a b a", "p", ""}});
  const auto data = transform_corpus(model, corpus);
  REQUIRE(data.size() == 2);
  CHECK(data.labels == std::vector<std::string>{"q", "p"});
  CHECK(data.vectors[0] == model.transform(corpus[0]));
  CHECK(data.vectors[1] == model.transform(corpus[1]));
}

TEST_CASE("fit errors") {
  CHECK_THROWS_AS(TfidfModel::fit(docs_of({"", " "})), DataError);
  CHECK_THROWS_AS(Vocabulary({"a"}, {3}, 2), DataError);
  CHECK_THROWS_AS(Vocabulary({"a", "a"}, {1, 1}, 2), DataError);
}

TEST_CASE("persistence round trip") {
  const auto model = TfidfModel::fit(docs_of({"ماڵ کوڕ ماڵ", "کوڕ دەس", "a b c d"}), TfidfOptions{true});
  const auto path = temp_file("textclf_tfidf.json");
  model.save(path);
  const auto loaded = TfidfModel::load(path);
  CHECK(loaded.vocabulary().terms() == model.vocabulary().terms());
  CHECK(loaded.idf() == model.idf());
  CHECK(loaded.options().l2_normalize);
  for (const char* text : {"ماڵ دەس", "a a b", "zz"}) CHECK(loaded.transform(text) == model.transform(text));

  // Truncated file.
  std::string bytes;
  {
    std::ifstream in(path);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  {
    std::ofstream out(path);
    out << bytes.substr(0, bytes.size() / 2);
  }
  CHECK_THROWS_AS(TfidfModel::load(path), CorruptFileError);

  auto j = model.to_json();
  j["version"] = 99;
  CHECK_THROWS_AS(TfidfModel::from_json(j), VersionError);
  std::filesystem::remove(path);
}
