#include <doctest.h>

#include "cuesplit/errors.hpp"
#include "cuesplit/rules.hpp"
#include "fixtures.hpp"

using namespace cuesplit;

namespace {

Document text_doc(const std::vector<std::string>& lines) {
  Document d;
  d.doc_id = "r";
  Page p{612, 792, {}};
  Block b;
  double y = 72;
  for (const auto& text : lines) {
    std::vector<Token> toks;
    double x = 72;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find(' ', pos);
      if (end == std::string::npos) end = text.size();
      toks.push_back(fixtures::token(text.substr(pos, end - pos), x, y));
      x = toks.back().bbox.x1 + 3;
      pos = end + 1;
    }
    b.lines.push_back(fixtures::line_of(toks));
    y += 14;
  }
  p.blocks.push_back(b);
  d.pages.push_back(p);
  return d;
}

const char* kRules = R"jsonl({"rule_id": "t1", "attribute": "termination_for_convenience", "pattern": "may terminate at will", "effect": {"answer": true}, "scope": "document"}
{"rule_id": "g1", "attribute": "governing_law", "pattern": "laws of the (State of [A-Za-z]+)", "effect": {"capture": 1}, "scope": "document"}

{"rule_id": "a0", "attribute": "anti_assignment", "pattern": "may freely assign", "effect": {"answer": false}, "scope": "clauses"}
{"rule_id": "a1", "attribute": "anti_assignment", "pattern": "shall not assign", "effect": {"answer": true}, "scope": "clauses"}
)jsonl";

}  // namespace

TEST_CASE("rule files parse and skip blank lines") {
  const RuleSet rs = parse_rules(kRules);
  REQUIRE(rs.size() == 4);
  CHECK(rs.rules()[1].attribute == Attribute::governing_law);
  CHECK(rs.rules()[2].scope == RuleScope::clauses);
  CHECK(parse_rules("").empty());
  CHECK(parse_rules("\n  \n").empty());
}

TEST_CASE("the at-will rule fires and others stay silent") {
  const RuleSet rs = parse_rules(kRules);
  const Document d = text_doc({"Either Party may terminate", "at will upon notice. This Agreement",
                               "is governed by the laws of the State of Ohio."});
  const auto t4c = apply_rules(rs, d, {}, Attribute::termination_for_convenience);
  REQUIRE(t4c.answer);
  CHECK(*t4c.answer);
  CHECK(t4c.confidence == 1.0);
  const auto gl = apply_rules(rs, d, {}, Attribute::governing_law);
  REQUIRE(gl.span);
  CHECK(gl.span->text == "State of Ohio");
  const auto ed = apply_rules(rs, d, {}, Attribute::expiration_date);
  CHECK_FALSE(ed.span);
  CHECK(ed.no_relevant_section);
  const auto aa = apply_rules(rs, d, {}, Attribute::anti_assignment);
  REQUIRE(aa.answer);
  CHECK_FALSE(*aa.answer);
  CHECK(aa.confidence == 0.5);
}

TEST_CASE("clause-scoped rules read clause text, first match or any yes") {
  const RuleSet rs = parse_rules(kRules);
  const Document d = text_doc({"1. Assignment. Supplier may freely assign its receivables.",
                               "Customer shall not assign this Agreement."});
  Section s1, s2;
  s1.type = SectionType::clause;
  s1.clean_text = "1. Assignment. Supplier may freely assign its receivables.";
  s2.type = SectionType::clause;
  s2.clean_text = "Customer shall not assign this Agreement.";
  const std::vector<Section> sections = {s1, s2};
  CHECK_FALSE(*apply_rules(rs, d, sections, Attribute::anti_assignment).answer);
  CHECK(*apply_rules(rs, d, sections, Attribute::anti_assignment, RuleOptions{true}).answer);
  Section header = s2;
  header.type = SectionType::header;
  CHECK(apply_rules(rs, d, {header}, Attribute::anti_assignment).confidence == 0.5);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_rules("\n{\"rule_id\": \"x\", \"attribute\": \"governing_law\", \"pattern\": \"(unclosed\", "
                "\"effect\": {\"capture\": 1}}");
    FAIL("expected RuleSyntaxError");
  } catch (const RuleSyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() >= 1);
  }
  try {
    parse_rules("{\"rule_id\": \"x\",, }");
    FAIL("expected RuleSyntaxError");
  } catch (const RuleSyntaxError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() > 1);
  }
  CHECK_THROWS_AS(parse_rules(R"({"rule_id": "x", "attribute": "governing_law", "pattern": "laws", "effect": {"capture": 1}})"),
                  RuleSyntaxError);
  CHECK_THROWS_AS(parse_rules(R"({"rule_id": "x", "attribute": "anti_assignment", "pattern": "a", "effect": {"capture": 1}})"),
                  RuleSyntaxError);
  CHECK_THROWS_AS(parse_rules(R"({"rule_id": "x", "attribute": "colour", "pattern": "a", "effect": {"answer": true}})"),
                  RuleSyntaxError);
  CHECK_THROWS_AS(parse_rules(R"({"rule_id": "x", "attribute": "anti_assignment", "pattern": "a", "effect": {"answer": true}, "scope": "page"})"),
                  RuleSyntaxError);
}

TEST_CASE("rule ids are unique") {
  const std::string line =
      R"({"rule_id": "dup", "attribute": "anti_assignment", "pattern": "a", "effect": {"answer": true}})";
  CHECK_THROWS_AS(parse_rules(line + "\n" + line), DuplicateId);
}

TEST_CASE("the shipped starter rules load") {
  const RuleSet rs = load_rules(std::filesystem::path(CUESPLIT_SOURCE_DIR) / "rules" / "starter.jsonl");
  CHECK(rs.size() >= 8);
  std::array<int, 4> per{};
  for (const auto& r : rs.rules()) ++per[index_of(r.attribute)];
  for (int n : per) CHECK(n > 0);
}

TEST_CASE("document text joins reading-order lines") {
  const Document d = text_doc({"a b", "c"});
  CHECK(document_text(d) == "a b c");
}
