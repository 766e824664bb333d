#include "cuesplit/splitter.hpp"

#include <json.hpp>

#include "cuesplit/errors.hpp"

namespace cuesplit {

namespace {

bool is_furniture(SectionTag tag) {
  const auto type = tag_type(tag);
  return type && !is_content(*type);
}

}  // namespace

LabelSet section_label_set() { return LabelSet(section_tag_names()); }

CrfModel train_splitter(const Corpus& corpus, const std::vector<std::size_t>& indices,
                        const FeatureConfig& features, const TrainConfig& train,
                        TrainResult* result) {
  features.validate();
  if (indices.empty()) throw DataError("splitter training needs at least one document");
  CrfTrainer trainer(section_label_set(), features.fingerprint());
  for (std::size_t i : indices) {
    if (i >= corpus.size()) throw DataError("document index " + std::to_string(i) + " out of range");
    const LabeledDocument& ld = corpus[i];
    if (!ld.has_labels) throw DataError(ld.doc.doc_id + " has no gold labels");
    DocumentFeaturizer featurizer(ld.doc, features);
    if (ld.labels.line_labels.size() != featurizer.size()) {
      throw DataError(ld.doc.doc_id + ": gold labels are not aligned to the reading order");
    }
    std::vector<std::uint32_t> labels;
    labels.reserve(featurizer.size());
    for (SectionTag t : ld.labels.line_labels) labels.push_back(static_cast<std::uint32_t>(t));
    trainer.add(featurizer.all(), labels);
  }
  return trainer.train(train, result);
}

CrfModel train_splitter(const Corpus& corpus, const FeatureConfig& features,
                        const TrainConfig& train, TrainResult* result) {
  std::vector<std::size_t> all(corpus.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return train_splitter(corpus, all, features, train, result);
}

std::vector<SectionTag> predict_tags(const CrfModel& model, const Document& doc,
                                     const FeatureConfig& features) {
  if (model.labels() != section_label_set()) {
    throw ModelMismatch("model labels are not the section tag set");
  }
  if (model.feature_fingerprint() != features.fingerprint()) {
    throw ConfigMismatch("model was trained with features '" + model.feature_fingerprint() +
                         "' but '" + features.fingerprint() + "' were requested");
  }
  if (line_count(doc) == 0) throw InvalidDocument(doc.doc_id + " has no lines");
  DocumentFeaturizer featurizer(doc, features);
  const auto path = viterbi_decode(model, featurizer.all());
  std::vector<SectionTag> tags;
  tags.reserve(path.size());
  for (std::uint32_t y : path) tags.push_back(static_cast<SectionTag>(y));
  return tags;
}

bool continues_across_break(const Line& last_line_before_break) {
  const std::string& text = last_line_before_break.tokens.back().text;
  const char c = text.back();
  return c != '.' && c != ';';
}

std::vector<Section> assemble_sections(const Document& doc, const std::vector<SectionTag>& tags) {
  const ReadingOrder order(doc);
  if (tags.size() != order.size()) {
    throw LengthMismatch(std::to_string(tags.size()) + " tags for " +
                         std::to_string(order.size()) + " lines");
  }
  std::vector<Section> sections;
  // Section index owning each line, or -1.
  std::vector<std::ptrdiff_t> owner(tags.size(), -1);

  auto add_line = [&](Section& s, std::size_t i) {
    s.line_refs.push_back(order[i].ref);
    s.reading_lines.push_back(i);
    const Line& line = *order[i].line;
    for (std::size_t k = 0; k < line.tokens.size(); ++k) {
      const Token& t = line.tokens[k];
      s.tokens.push_back({t.text, t.bold, t.italic, t.underline,
                          TokenOrigin{order[i].ref, k, i, order.first_token(i) + k}});
    }
  };

  for (std::size_t i = 0; i < tags.size(); ++i) {
    const SectionTag tag = tags[i];
    const auto type = tag_type(tag);
    if (!type) continue;

    std::ptrdiff_t target = -1;
    if (is_inside(tag)) {
      if (i > 0 && owner[i - 1] >= 0 && sections[owner[i - 1]].type == *type) {
        target = owner[i - 1];
      } else if (is_content(*type)) {
        // Look back over header/footer lines for a same-type section that
        // was cut by a page break mid-sentence.
        std::size_t j = i;
        while (j > 0 && is_furniture(tags[j - 1])) --j;
        if (j < i && j > 0) {
          const std::size_t prev = j - 1;
          if (owner[prev] >= 0 && sections[owner[prev]].type == *type &&
              order[prev].ref.page_index != order[i].ref.page_index &&
              continues_across_break(*order[prev].line)) {
            target = owner[prev];
          }
        }
      }
      // Otherwise an orphan inside tag: treated as a begin tag.
    }
    if (target < 0) {
      Section s;
      s.type = *type;
      sections.push_back(std::move(s));
      target = static_cast<std::ptrdiff_t>(sections.size() - 1);
    }
    add_line(sections[target], i);
    owner[i] = target;
  }

  for (Section& s : sections) {
    std::string text;
    for (const auto& t : s.tokens) {
      if (!text.empty()) text += ' ';
      text += t.text;
    }
    s.clean_text = collapse_whitespace(text);
  }
  return sections;
}

std::vector<Section> split_document(const CrfModel& model, const Document& doc,
                                    const FeatureConfig& features) {
  return assemble_sections(doc, predict_tags(model, doc, features));
}

std::vector<SectionSpan> section_spans(const std::vector<Section>& sections) {
  std::vector<SectionSpan> out;
  out.reserve(sections.size());
  for (const auto& s : sections) out.push_back(s.span());
  return out;
}

std::string sections_to_json(const std::string& doc_id, const std::vector<Section>& sections) {
  nlohmann::json j;
  j["doc_id"] = doc_id;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : sections) {
    arr.push_back({{"type", std::string(to_string(s.type))},
                   {"first_line", s.first_line()},
                   {"last_line", s.last_line()},
                   {"clean_text", s.clean_text}});
  }
  j["sections"] = std::move(arr);
  return j.dump();
}

std::string collapse_whitespace(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool space = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

}  // namespace cuesplit
