#include <doctest.h>

#include "cuesplit/document.hpp"
#include "cuesplit/errors.hpp"
#include "fixtures.hpp"

using namespace cuesplit;

namespace {

Document two_line_doc() {
  Document d;
  d.doc_id = "d1";
  d.source_name = "d1.pdf";
  Page p;
  p.width = 612;
  p.height = 792;
  Block b;
  b.lines.push_back(fixtures::line_of({fixtures::token("second", 72, 200)}));
  b.lines.push_back(fixtures::line_of({fixtures::token("right", 300, 100), fixtures::token("x", 400, 100)}));
  b.lines.push_back(fixtures::line_of({fixtures::token("left", 72, 100)}));
  p.blocks.push_back(b);
  d.pages.push_back(p);
  return d;
}

}  // namespace

TEST_CASE("reading order sorts by page, then y, then x") {
  const Document d = two_line_doc();
  const auto order = lines_in_reading_order(d);
  REQUIRE(order.size() == 3);
  CHECK(line_text(*order[0].line) == "left");
  CHECK(line_text(*order[1].line) == "right x");
  CHECK(line_text(*order[2].line) == "second");
  CHECK(order[2].ref.line_index == 0);
}

TEST_CASE("reading order keeps token offsets") {
  const Document d = two_line_doc();
  ReadingOrder ro(d);
  CHECK(ro.total_tokens() == 4);
  CHECK(ro.first_token(1) == 1);
  CHECK(ro.line_of_token(2) == 1);
  CHECK(ro.line_of_token(3) == 2);
}

TEST_CASE("serialize then parse is the identity") {
  const Document d = two_line_doc();
  CHECK(parse_document(serialize_document(d)) == d);
}

TEST_CASE("generated documents survive the interchange format") {
  for (const auto& ld : fixtures::corpus()) {
    const std::string text = serialize_document(ld.doc);
    CHECK(parse_document(text) == ld.doc);
    CHECK(serialize_document(parse_document(text)) == text);
  }
}

TEST_CASE("schema violations name the offending path") {
  Document d = two_line_doc();
  std::string text = serialize_document(d);
  const auto pos = text.find("\"font_size\"");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 11, "\"font_sise\"");
  try {
    parse_document(text);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.path().find("pages[0].blocks[0].lines[0].tokens[0]") == 0);
  }
  CHECK_THROWS_AS(parse_document("{not json"), SchemaError);
}

TEST_CASE("validation rejects bad geometry and empty parts") {
  Document d = two_line_doc();
  d.pages[0].blocks[0].lines[0].tokens[0].bbox.x1 = 10;  // x1 < x0
  CHECK_THROWS_AS(validate_document(d), GeometryError);

  Document empty = two_line_doc();
  empty.pages.clear();
  CHECK_THROWS_AS(validate_document(empty), EmptyError);

  Document no_tokens = two_line_doc();
  no_tokens.pages[0].blocks[0].lines[0].tokens.clear();
  CHECK_THROWS_AS(validate_document(no_tokens), EmptyError);

  Document spaced = two_line_doc();
  spaced.pages[0].blocks[0].lines[0].tokens[0].text = "a b";
  CHECK_THROWS_AS(validate_document(spaced), SchemaError);
}

TEST_CASE("line_at checks its reference") {
  const Document d = two_line_doc();
  CHECK(line_text(line_at(d, LineRef{0, 0, 2})) == "left");
  CHECK_THROWS_AS(line_at(d, LineRef{0, 0, 3}), InvalidRef);
  CHECK_THROWS_AS(line_at(d, LineRef{1, 0, 0}), InvalidRef);
}

TEST_CASE("block kinds round-trip through their names") {
  for (BlockKind k : {BlockKind::paragraph, BlockKind::list, BlockKind::table, BlockKind::other}) {
    CHECK(block_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(block_kind_from_string("figure"), SchemaError);
}
