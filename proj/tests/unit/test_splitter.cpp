#include <doctest.h>

#include <json.hpp>

#include "cuesplit/errors.hpp"
#include "cuesplit/splitter.hpp"
#include "fixtures.hpp"

using namespace cuesplit;
using fixtures::line_of;
using fixtures::token;

namespace {

// A clause cut by a page break with a footer and a header in between.
Document broken_clause(const std::string& last_word_page1) {
  Document d;
  d.doc_id = "brk";
  Page p1{612, 792, {}};
  p1.blocks.push_back(Block{BlockKind::paragraph,
                            {line_of({token("1.", 72, 600), token("Term.", 90, 600),
                                      token(last_word_page1, 130, 600)})}});
  p1.blocks.push_back(Block{BlockKind::other, {line_of({token("3", 300, 740)})}});
  Page p2{612, 792, {}};
  p2.blocks.push_back(Block{BlockKind::other, {line_of({token("Confidential", 72, 40)})}});
  p2.blocks.push_back(Block{BlockKind::paragraph,
                            {line_of({token("until", 72, 80), token("2030.", 110, 80)})}});
  d.pages = {p1, p2};
  return d;
}

}  // namespace

TEST_CASE("assembly of gold tags reproduces the gold sections") {
  for (const auto& ld : fixtures::corpus()) {
    CHECK(section_spans(assemble_sections(ld.doc, ld.labels.line_labels)) == ld.labels.sections);
  }
}

TEST_CASE("a clause cut mid-sentence continues across the break") {
  const Document d = broken_clause("shall");
  const std::vector<SectionTag> tags = {SectionTag::B_clause, SectionTag::B_footer,
                                        SectionTag::B_header, SectionTag::I_clause};
  const auto s = assemble_sections(d, tags);
  REQUIRE(s.size() == 3);
  CHECK(s[0].type == SectionType::clause);
  CHECK(s[0].clean_text == "1. Term. shall until 2030.");
  CHECK(s[0].reading_lines == std::vector<std::size_t>{0, 3});
  CHECK(s[1].type == SectionType::footer);
  CHECK(s[2].type == SectionType::header);
  for (const auto& t : s[0].tokens) CHECK(t.text != "3");
}

TEST_CASE("a sentence ending before the break starts a new section") {
  const Document d = broken_clause("ends.");
  const std::vector<SectionTag> tags = {SectionTag::B_clause, SectionTag::B_footer,
                                        SectionTag::B_header, SectionTag::I_clause};
  const auto s = assemble_sections(d, tags);
  REQUIRE(s.size() == 4);
  CHECK(s[3].clean_text == "until 2030.");
}

TEST_CASE("continuation keys on terminal punctuation") {
  CHECK(continues_across_break(line_of({token("the", 0, 0)})));
  CHECK(continues_across_break(line_of({token("Party,", 0, 0)})));
  CHECK_FALSE(continues_across_break(line_of({token("Agreement.", 0, 0)})));
  CHECK_FALSE(continues_across_break(line_of({token("follows;", 0, 0)})));
}

TEST_CASE("tag count must match line count") {
  const Document d = broken_clause("shall");
  CHECK_THROWS_AS(assemble_sections(d, {SectionTag::O}), LengthMismatch);
}

TEST_CASE("sections JSON has the documented fields") {
  const Document d = broken_clause("shall");
  const auto s = assemble_sections(d, {SectionTag::B_clause, SectionTag::B_footer, SectionTag::O,
                                       SectionTag::B_clause});
  const auto j = nlohmann::json::parse(sections_to_json("brk", s));
  CHECK(j["doc_id"] == "brk");
  REQUIRE(j["sections"].size() == 3);
  CHECK(j["sections"][0]["type"] == "clause");
  CHECK(j["sections"][0]["first_line"] == 0);
  CHECK(j["sections"][0]["last_line"] == 0);
  CHECK(j["sections"][1]["type"] == "footer");
  CHECK(j["sections"][2]["first_line"] == 3);
  CHECK(j["sections"][2]["clean_text"] == "until 2030.");
}

TEST_CASE("a trained splitter checks its feature configuration") {
  const Corpus& corpus = fixtures::corpus();
  TrainConfig cfg;
  cfg.max_iterations = 15;
  const FeatureConfig fc = FeatureConfig::from_groups("page_layout");
  const CrfModel m = train_splitter(corpus, {0, 1, 2, 3}, fc, cfg);
  CHECK(m.feature_fingerprint() == fc.fingerprint());
  const auto tags = predict_tags(m, corpus[5].doc, fc);
  CHECK(tags.size() == line_count(corpus[5].doc));
  CHECK_THROWS_AS(predict_tags(m, corpus[5].doc, FeatureConfig::baseline_only()), ConfigMismatch);
  const CrfModel back = CrfModel::from_json(m.to_json());
  CHECK(predict_tags(back, corpus[5].doc, fc) == tags);
  CrfModel foreign(LabelSet({"x", "y"}), 0.1, fc.fingerprint());
  CHECK_THROWS_AS(predict_tags(foreign, corpus[5].doc, fc), ModelMismatch);
}

TEST_CASE("whitespace collapsing") {
  CHECK(collapse_whitespace("  a \t b\n\nc  ") == "a b c");
  CHECK(collapse_whitespace("") == "");
}
