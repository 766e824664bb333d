#include <doctest.h>

#include <json.hpp>

#include "cuesplit/errors.hpp"
#include "cuesplit/extractors.hpp"
#include "fixtures.hpp"

using namespace cuesplit;

namespace {

std::vector<std::size_t> range(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> out;
  for (std::size_t i = lo; i < hi; ++i) out.push_back(i);
  return out;
}

const ExtractorBundle& bundle() {
  static const ExtractorBundle b = train_extractors(fixtures::corpus(), range(0, 30), ExtractorConfig{});
  return b;
}

}  // namespace

TEST_CASE("entity answers come from clause text") {
  for (std::size_t i = 30; i < 40; ++i) {
    const auto sections = gold_sections(fixtures::corpus()[i]);
    const auto preds = predict_document(bundle(), sections);
    REQUIRE(preds.size() == 4);
    for (std::size_t a = 0; a < 4; ++a) CHECK(preds[a].attribute == kAttributes[a]);
    for (const auto& p : preds) {
      if (!p.span) continue;
      REQUIRE(p.span->section < sections.size());
      const Section& s = sections[p.span->section];
      CHECK(is_content(s.type));
      CHECK(s.clean_text.find(p.span->text) != std::string::npos);
    }
  }
}

TEST_CASE("held-out documents are mostly answered correctly") {
  std::size_t right = 0, total = 0;
  for (std::size_t i = 30; i < 40; ++i) {
    const auto& ld = fixtures::corpus()[i];
    const auto preds = predict_document(bundle(), gold_sections(ld));
    const std::string gl = gold_span_text(ld.doc, ld.labels, *ld.labels.governing_law);
    if (preds[1].span && normalize_answer(preds[1].span->text) == normalize_answer(gl)) ++right;
    if (preds[3].answer && *preds[3].answer == ld.labels.anti_assignment) ++right;
    total += 2;
  }
  CHECK(right >= total * 8 / 10);
}

TEST_CASE("relevant sections are content sections, at most three, by probability") {
  const auto& ld = fixtures::corpus()[31];
  const auto sections = gold_sections(ld);
  for (Attribute a : kAttributes) {
    const auto rel = select_relevant_sections(bundle().relevance, sections, a);
    CHECK(rel.size() <= kMaxRelevantSections);
    for (std::size_t r : rel) CHECK(is_content(sections[r].type));
  }
}

TEST_CASE("without relevant sections nothing is extracted") {
  const auto& c = bundle().classifier_for(Attribute::anti_assignment);
  const auto p = classify(c, {}, {}, bundle().features);
  CHECK(p.no_relevant_section);
  REQUIRE(p.answer);
  CHECK_FALSE(*p.answer);
  const auto e = extract_entity(bundle().entity_for(Attribute::governing_law), {}, {}, bundle().features);
  CHECK(e.no_relevant_section);
  CHECK_FALSE(e.span);
}

TEST_CASE("the bundle round-trips through JSON") {
  const std::string text = bundle().to_json();
  const ExtractorBundle back = ExtractorBundle::from_json(text);
  CHECK(back.to_json() == text);
  const auto sections = gold_sections(fixtures::corpus()[35]);
  const auto a = predict_document(bundle(), sections);
  const auto b = predict_document(back, sections);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(prediction_to_json("d", a[i]) == prediction_to_json("d", b[i]));
  }
  CHECK_THROWS_AS(ExtractorBundle::from_json("{}"), FormatError);
}

TEST_CASE("prediction records carry the documented fields") {
  AttributePrediction p;
  p.attribute = Attribute::termination_for_convenience;
  p.answer = true;
  p.confidence = 0.75;
  const auto j = nlohmann::json::parse(prediction_to_json("doc_1", p));
  CHECK(j["doc_id"] == "doc_1");
  CHECK(j["attribute"] == "termination_for_convenience");
  CHECK(j["span_text"].is_null());
  CHECK(j["answer"] == true);
  CHECK(j["confidence"] == 0.75);
  CHECK(j["no_relevant_section"] == false);
}

TEST_CASE("entity extractors check their model") {
  EntityExtractor bad{Attribute::governing_law, CrfModel(LabelSet({"O", "X"}), 0.1, "tokens/v1:plain")};
  const auto sections = gold_sections(fixtures::corpus()[0]);
  CHECK_THROWS_AS(extract_entity(bad, sections, {0}, FeatureConfig::baseline_only()), ModelMismatch);
  const auto& good = bundle().entity_for(Attribute::governing_law);
  CHECK_THROWS_AS(extract_entity(good, sections, {0}, FeatureConfig::baseline_only()), ConfigMismatch);
}

TEST_CASE("gold relevant sections overlap the evidence") {
  const auto& ld = fixtures::corpus()[2];
  const auto sections = gold_sections(ld);
  for (Attribute a : kAttributes) {
    const auto rel = gold_relevant_sections(ld, sections, a);
    CHECK_FALSE(rel.empty());
    const auto& ev = *ld.labels.evidence[index_of(a)];
    for (std::size_t r : rel) {
      CHECK(sections[r].first_line() <= ev.last_line);
      CHECK(sections[r].last_line() >= ev.first_line);
    }
  }
}

TEST_CASE("answer normalisation") {
  CHECK(normalize_answer("  State of  Delaware, ") == "state of delaware");
  CHECK(normalize_answer("(the Commonwealth of Virginia).") == "the commonwealth of virginia");
  CHECK(normalize_answer("") == "");
}
