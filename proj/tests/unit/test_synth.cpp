#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <set>

#include "cuesplit/errors.hpp"
#include "cuesplit/synth.hpp"
#include "fixtures.hpp"

using namespace cuesplit;

TEST_CASE("generation is deterministic per seed") {
  GenConfig c;
  c.doc_count = 5;
  const Corpus a = generate_corpus(c);
  const Corpus b = generate_corpus(c);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].doc == b[i].doc);
    CHECK(a[i].labels == b[i].labels);
  }
  c.seed = 8;
  CHECK_FALSE(generate_corpus(c)[0].doc == a[0].doc);
}

TEST_CASE("a document depends only on the seed and its index") {
  GenConfig c;
  c.doc_count = 6;
  const Corpus all = generate_corpus(c);
  const LabeledDocument single = generate_document(c, 4);
  CHECK(single.doc == all[4].doc);
}

TEST_CASE("mean length is near the target") {
  GenConfig c;
  const CorpusStats s = corpus_stats(generate_corpus(c));
  CHECK(s.doc_count == 200);
  CHECK(s.mean_words > 0.85 * 9594);
  CHECK(s.mean_words < 1.15 * 9594);
  CHECK(s.min_words < s.max_words);
}

TEST_CASE("labels align with the document") {
  for (const auto& ld : fixtures::corpus()) {
    CHECK(ld.labels.doc_id == ld.doc.doc_id);
    CHECK(ld.labels.line_labels.size() == line_count(ld.doc));
    REQUIRE(ld.labels.governing_law);
    REQUIRE(ld.labels.expiration_date);
    CHECK(ld.labels.governing_law->first_token <= ld.labels.governing_law->last_token);
    CHECK(ld.labels.governing_law->last_token < token_count(ld.doc));
    const std::string gl = gold_span_text(ld.doc, ld.labels, *ld.labels.governing_law);
    CHECK(gl.find(" of ") != std::string::npos);
    for (std::size_t a = 0; a < 4; ++a) CHECK(ld.labels.evidence[a].has_value());
  }
}

TEST_CASE("labels JSON round-trips") {
  for (const auto& ld : fixtures::corpus()) {
    CHECK(parse_labels(labels_to_json(ld.labels)) == ld.labels);
  }
}

TEST_CASE("both yes/no attributes take both values") {
  std::set<bool> t4c, aa;
  for (const auto& ld : fixtures::corpus()) {
    t4c.insert(ld.labels.termination_for_convenience);
    aa.insert(ld.labels.anti_assignment);
  }
  CHECK(t4c.size() == 2);
  CHECK(aa.size() == 2);
}

TEST_CASE("split is 80/10/10, disjoint and seeded") {
  const CorpusSplit s = split_corpus(200, 7);
  CHECK(s.train.size() == 160);
  CHECK(s.dev.size() == 20);
  CHECK(s.test.size() == 20);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.dev.begin(), s.dev.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 200);
  CHECK(split_corpus(200, 7).test == s.test);
  CHECK_FALSE(split_corpus(200, 8).test == s.test);
}

TEST_CASE("broken spans straddle a page and skip the page furniture") {
  GenConfig c;
  c.doc_count = 15;
  c.broken_span_prob = 1.0;
  for (const auto& ld : generate_corpus(c)) {
    const auto& span = *ld.labels.governing_law;
    ReadingOrder ro(ld.doc);
    const std::size_t l0 = ro.line_of_token(span.first_token);
    const std::size_t l1 = ro.line_of_token(span.last_token);
    CHECK(ro[l0].ref.page_index + 1 == ro[l1].ref.page_index);
    bool crosses_furniture = false;
    for (std::size_t l = l0; l <= l1; ++l) {
      const SectionTag t = ld.labels.line_labels[l];
      if (t == SectionTag::B_footer || t == SectionTag::I_footer) crosses_furniture = true;
    }
    CHECK(crosses_furniture);
    const std::string text = gold_span_text(ld.doc, ld.labels, span);
    for (std::size_t p = 0; p < text.size();) {
      std::size_t q = text.find(' ', p);
      if (q == std::string::npos) q = text.size();
      const std::string word = text.substr(p, q - p);
      CHECK_FALSE(std::all_of(word.begin(), word.end(), [](unsigned char ch) { return std::isdigit(ch); }));
      p = q + 1;
    }
  }
}

TEST_CASE("configuration is validated") {
  GenConfig c;
  c.doc_count = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = GenConfig{};
  c.broken_span_prob = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = GenConfig{};
  c.page_width = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(corpus_stats(Corpus{}), EmptyCorpus);
}

TEST_CASE("corpus directory round-trips") {
  GenConfig c;
  c.doc_count = 10;
  const Corpus corpus = generate_corpus(c);
  const CorpusSplit split = split_corpus(corpus.size(), 7);
  const auto dir = std::filesystem::temp_directory_path() / "cuesplit_unit_corpus";
  std::filesystem::remove_all(dir);
  write_corpus(dir, corpus, split);
  const LoadedCorpus back = read_corpus(dir);
  REQUIRE(back.docs.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(back.docs[i].doc == corpus[i].doc);
    CHECK(back.docs[i].labels == corpus[i].labels);
  }
  CHECK(back.split.test == split.test);
  CHECK(back.split.train == split.train);
  std::filesystem::remove_all(dir);
}
