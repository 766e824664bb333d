#pragma once

// Downstream attribute extraction over split sections: per-attribute section
// relevance, a token CRF for entity answers and a logistic classifier for
// yes/no answers.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cuesplit/attributes.hpp"
#include "cuesplit/crf.hpp"
#include "cuesplit/features.hpp"
#include "cuesplit/logistic.hpp"
#include "cuesplit/sections.hpp"
#include "cuesplit/synth.hpp"

namespace cuesplit {

inline constexpr std::size_t kMaxRelevantSections = 3;

struct PredictedSpan {
  std::size_t section = 0;      // index into the section list
  std::size_t token_start = 0;  // section token indices, inclusive
  std::size_t token_end = 0;
  std::size_t doc_first_token = 0;
  std::size_t doc_last_token = 0;
  std::string text;
};

struct AttributePrediction {
  Attribute attribute = Attribute::governing_law;
  std::optional<PredictedSpan> span;
  std::optional<bool> answer;
  double confidence = 0;
  bool no_relevant_section = false;
};

// One JSONL line in the prediction output format.
std::string prediction_to_json(const std::string& doc_id, const AttributePrediction& p);

struct RelevanceModel {
  std::array<LogisticModel, 4> per_attribute;
};

struct EntityExtractor {
  Attribute attribute = Attribute::governing_law;
  CrfModel model;
};

struct AttributeClassifier {
  Attribute attribute = Attribute::anti_assignment;
  LogisticModel model;
};

// Bag of lowercase words, heading words among the first tokens, and the
// section type.
FeatureVector relevance_features(const Section& section);

// Indices into `sections` ranked by descending score (ties in document
// order), keeping scores >= 0.5 up to kMaxRelevantSections.
std::vector<std::size_t> select_relevant_sections(const RelevanceModel& model,
                                                  const std::vector<Section>& sections,
                                                  Attribute attribute);

LabelSet entity_label_set();  // O, B-ans, I-ans

// `relevant` indexes `sections`. Throws ModelMismatch for a non-entity
// attribute or a foreign label set.
AttributePrediction extract_entity(const EntityExtractor& extractor,
                                   const std::vector<Section>& sections,
                                   const std::vector<std::size_t>& relevant,
                                   const FeatureConfig& features);

// Unigrams, bigrams and section types of the relevant sections in document
// order, plus styled-word features when the style group is on.
FeatureVector classifier_features(const std::vector<Section>& sections,
                                  const std::vector<std::size_t>& relevant,
                                  const FeatureConfig& features);

AttributePrediction classify(const AttributeClassifier& classifier,
                             const std::vector<Section>& sections,
                             const std::vector<std::size_t>& relevant,
                             const FeatureConfig& features);

struct ExtractorConfig {
  FeatureConfig features = FeatureConfig::all_groups();
  LogisticConfig relevance;
  LogisticConfig classifier;
  TrainConfig entity{0.1, 100, 1e-4, 0, 1};

  void validate() const;
};

// Everything the predict stage needs, serialisable as one JSON file.
struct ExtractorBundle {
  static constexpr int kVersion = 1;

  FeatureConfig features;
  RelevanceModel relevance;
  std::array<EntityExtractor, 2> entity;          // expiration_date, governing_law
  std::array<AttributeClassifier, 2> classifier;  // t4c, anti_assignment

  std::string to_json() const;
  static ExtractorBundle from_json(std::string_view text);  // FormatError

  const EntityExtractor& entity_for(Attribute a) const;
  const AttributeClassifier& classifier_for(Attribute a) const;
};

// Gold sections of a labeled document (assembled from its gold tags).
std::vector<Section> gold_sections(const LabeledDocument& ld);

// Content sections overlapping the attribute's evidence lines.
std::vector<std::size_t> gold_relevant_sections(const LabeledDocument& ld,
                                                const std::vector<Section>& sections,
                                                Attribute attribute);

RelevanceModel train_relevance(const Corpus& corpus, const std::vector<std::size_t>& indices,
                               const LogisticConfig& config);
EntityExtractor train_entity(const Corpus& corpus, const std::vector<std::size_t>& indices,
                             Attribute attribute, const FeatureConfig& features,
                             const TrainConfig& config);
AttributeClassifier train_classifier(const Corpus& corpus, const std::vector<std::size_t>& indices,
                                     Attribute attribute, const FeatureConfig& features,
                                     const LogisticConfig& config);

ExtractorBundle train_extractors(const Corpus& corpus, const std::vector<std::size_t>& indices,
                                 const ExtractorConfig& config);

// All four attributes in kAttributes order.
std::vector<AttributePrediction> predict_document(const ExtractorBundle& bundle,
                                                  const std::vector<Section>& sections);

// Whitespace-collapsed, case-folded, surrounding punctuation stripped.
std::string normalize_answer(std::string_view text);

}  // namespace cuesplit
