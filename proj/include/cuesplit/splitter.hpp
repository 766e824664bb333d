#pragma once

// Line-level BIO tagging with the CRF engine, and assembly of tagged lines
// into typed sections with page-break repair.

#include <cstddef>
#include <string>
#include <vector>

#include "cuesplit/crf.hpp"
#include "cuesplit/features.hpp"
#include "cuesplit/sections.hpp"
#include "cuesplit/synth.hpp"

namespace cuesplit {

LabelSet section_label_set();

// One sequence per document; `indices` selects the training documents.
CrfModel train_splitter(const Corpus& corpus, const std::vector<std::size_t>& indices,
                        const FeatureConfig& features, const TrainConfig& train,
                        TrainResult* result = nullptr);
CrfModel train_splitter(const Corpus& corpus, const FeatureConfig& features,
                        const TrainConfig& train, TrainResult* result = nullptr);

// Throws ConfigMismatch when the model was trained with other features,
// ModelMismatch for a foreign label set, InvalidDocument for no lines.
std::vector<SectionTag> predict_tags(const CrfModel& model, const Document& doc,
                                     const FeatureConfig& features);

// True when a same-type run interrupted by header/footer lines continues
// on the next page; keyed on the last line before the break.
bool continues_across_break(const Line& last_line_before_break);

// Throws LengthMismatch when tags and lines disagree.
std::vector<Section> assemble_sections(const Document& doc, const std::vector<SectionTag>& tags);

std::vector<Section> split_document(const CrfModel& model, const Document& doc,
                                    const FeatureConfig& features);

std::vector<SectionSpan> section_spans(const std::vector<Section>& sections);

std::string sections_to_json(const std::string& doc_id, const std::vector<Section>& sections);

// Collapses whitespace runs to single spaces and trims the ends.
std::string collapse_whitespace(const std::string& text);

}  // namespace cuesplit
