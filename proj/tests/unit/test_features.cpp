#include <doctest.h>

#include <set>

#include "cuesplit/errors.hpp"
#include "cuesplit/features.hpp"
#include "fixtures.hpp"

using namespace cuesplit;

namespace {

Document sized_doc(std::vector<double> sizes) {
  Document d;
  d.doc_id = "fonts";
  Page p;
  p.width = 612;
  p.height = 792;
  Block b;
  double y = 72;
  for (double s : sizes) {
    b.lines.push_back(fixtures::line_of({fixtures::token("word", 72, y, s)}));
    y += 20;
  }
  p.blocks.push_back(b);
  d.pages.push_back(p);
  return d;
}

std::set<std::string> prefixes(const Document& doc, const FeatureConfig& c) {
  std::set<std::string> out;
  DocumentFeaturizer f(doc, c);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const FeatureVector v = f.line(i);
    for (const auto& [name, w] : v.entries()) out.insert(name.substr(0, name.find(':')));
  }
  return out;
}

}  // namespace

TEST_CASE("body font is the modal size, ties going to the smaller") {
  CHECK(estimate_body_font(sized_doc({10, 10, 12})).body_font_size == doctest::Approx(10));
  CHECK(estimate_body_font(sized_doc({12, 10, 12, 10})).body_font_size == doctest::Approx(10));
  CHECK(estimate_body_font(sized_doc({11.1, 11.2, 9})).body_font_size == doctest::Approx(11.0));
  Document empty;
  CHECK_THROWS_AS(estimate_body_font(empty), EmptyDocument);
}

TEST_CASE("disabled groups contribute no features") {
  const Document& doc = fixtures::corpus()[0].doc;
  CHECK(prefixes(doc, FeatureConfig::baseline_only()) == std::set<std::string>{"baseline"});
  CHECK(prefixes(doc, FeatureConfig::from_groups("style")) == std::set<std::string>{"baseline", "style"});
  CHECK(prefixes(doc, FeatureConfig::all_groups()) ==
        std::set<std::string>{"baseline", "page_layout", "text_placement", "visual_grouping", "style"});
}

TEST_CASE("exactly one line per page is last on its page") {
  for (std::size_t d = 0; d < 5; ++d) {
    const Document& doc = fixtures::corpus()[d].doc;
    DocumentFeaturizer f(doc, FeatureConfig::from_groups("page_layout"));
    std::size_t last = 0, first = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const FeatureVector v = f.line(i);
      last += v.contains("page_layout:last_on_page");
      first += v.contains("page_layout:first_on_page");
    }
    CHECK(last == doc.pages.size());
    CHECK(first == doc.pages.size());
  }
}

TEST_CASE("the featurizer agrees with single-line featurization") {
  const Document& doc = fixtures::corpus()[1].doc;
  const FeatureConfig c = FeatureConfig::all_groups();
  DocumentFeaturizer f(doc, c);
  const BodyFontEstimate body = estimate_body_font(doc);
  for (std::size_t i = 0; i < f.size(); i += 37) {
    CHECK(f.line(i) == line_features(doc, f.order()[i].ref, c, body));
  }
  CHECK_THROWS_AS(line_features(doc, LineRef{999, 0, 0}, c, body), InvalidRef);
}

TEST_CASE("group specs and fingerprints") {
  CHECK(FeatureConfig::from_groups("all").enabled == FeatureConfig::all_groups().enabled);
  CHECK(FeatureConfig::from_groups("baseline").groups_string() == "baseline");
  CHECK(FeatureConfig::from_groups("style, page_layout").groups_string() == "baseline+page_layout+style");
  CHECK(FeatureConfig::from_groups("baseline+style").groups_string() == "baseline+style");
  CHECK_THROWS_AS(FeatureConfig::from_groups("colour"), ConfigError);
  FeatureConfig c = FeatureConfig::from_groups("text_placement");
  c.indent_quantum = 12.5;
  const FeatureConfig back = FeatureConfig::from_fingerprint(c.fingerprint());
  CHECK(back.fingerprint() == c.fingerprint());
  CHECK(back.enabled == c.enabled);
  CHECK_THROWS_AS(FeatureConfig::from_fingerprint("tokens/v1:style"), ConfigError);
  FeatureConfig off;
  off.enabled[0] = false;
  CHECK_THROWS_AS(off.validate(), ConfigError);
}

TEST_CASE("feature vectors merge duplicates and drop zeros") {
  FeatureVector v;
  v.add("b", 1);
  v.add("a", 2);
  v.add("b", 0.5);
  v.add("z", 1);
  v.add("z", -1);
  v.finalize();
  REQUIRE(v.size() == 2);
  CHECK(v.entries()[0].first == "a");
  CHECK(v.get("b") == doctest::Approx(1.5));
  CHECK_FALSE(v.contains("z"));
  CHECK(v.get("missing") == 0);
}

TEST_CASE("shapes") {
  CHECK(token_shape("Massachusetts") == "Xx");
  CHECK(token_shape("4") == "d");
  CHECK(token_shape("(a)") == "(x)");
  CHECK(token_shape("2030.") == "d.");
  CHECK(lead_shape("2.1") == "d.d");
  CHECK(lead_shape("(iv)") == "(a)");
  CHECK(lead_shape("ARTICLE") == "XX");
}

TEST_CASE("token features keep style behind its group") {
  std::vector<TokenView> toks = {{"Governing", true, false}, {"Law", true, true}, {"1", false, false}};
  const FeatureVector plain = token_features(toks, 1, FeatureConfig::baseline_only());
  CHECK(plain.contains("tok:lower=law"));
  CHECK(plain.contains("tok:prev1=governing"));
  CHECK_FALSE(plain.contains("style:tok_bold"));
  const FeatureVector styled = token_features(toks, 1, FeatureConfig::from_groups("style"));
  CHECK(styled.contains("style:tok_bold"));
  CHECK(styled.contains("style:tok_underline"));
  CHECK(token_features(toks, 2, FeatureConfig::baseline_only()).contains("tok:isdigit"));
}
