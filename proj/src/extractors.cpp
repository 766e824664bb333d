#include "cuesplit/extractors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <json.hpp>

#include "cuesplit/errors.hpp"
#include "cuesplit/splitter.hpp"

namespace cuesplit {

using nlohmann::json;

namespace {

constexpr std::uint32_t kO = 0;
constexpr std::uint32_t kB = 1;
constexpr std::uint32_t kI = 2;
constexpr std::size_t kHeadingTokens = 12;

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Lowercased word with surrounding punctuation removed; empty if nothing
// alphanumeric remains.
std::string word_key(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && !is_alnum(text[b]) && static_cast<unsigned char>(text[b]) < 0x80) ++b;
  while (e > b && !is_alnum(text[e - 1]) && static_cast<unsigned char>(text[e - 1]) < 0x80) --e;
  return lowercase(text.substr(b, e - b));
}

std::string entity_fingerprint(const FeatureConfig& features) {
  return std::string("tokens/v1:") + (features.has(FeatureGroup::style) ? "style" : "plain");
}

std::vector<std::size_t> content_indices(const std::vector<Section>& sections) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    if (is_content(sections[i].type)) out.push_back(i);
  }
  return out;
}

std::string join_tokens(const Section& s, std::size_t a, std::size_t b) {
  std::string out;
  for (std::size_t k = a; k <= b; ++k) {
    if (k > a) out += ' ';
    out += s.tokens[k].text;
  }
  return out;
}

struct ScoredSpan {
  std::size_t section = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  double score = -1;
};

json parse_embedded(const std::string& text) { return json::parse(text); }

}  // namespace

std::string prediction_to_json(const std::string& doc_id, const AttributePrediction& p) {
  json j;
  j["doc_id"] = doc_id;
  j["attribute"] = std::string(to_string(p.attribute));
  j["span_text"] = p.span ? json(p.span->text) : json(nullptr);
  j["answer"] = p.answer ? json(*p.answer) : json(nullptr);
  j["confidence"] = p.confidence;
  j["no_relevant_section"] = p.no_relevant_section;
  return j.dump();
}

FeatureVector relevance_features(const Section& section) {
  FeatureVector fv;
  fv.add("type:" + std::string(to_string(section.type)));
  for (std::size_t k = 0; k < section.tokens.size(); ++k) {
    std::string w = word_key(section.tokens[k].text);
    if (w.empty()) continue;
    if (k < kHeadingTokens) fv.add("head:" + w);
    fv.add("bow:" + std::move(w));
  }
  fv.finalize();
  // Presence, not counts.
  FeatureVector binary;
  for (const auto& [name, value] : fv.entries()) binary.add(name, 1.0);
  binary.finalize();
  return binary;
}

std::vector<std::size_t> select_relevant_sections(const RelevanceModel& model,
                                                  const std::vector<Section>& sections,
                                                  Attribute attribute) {
  const LogisticModel& m = model.per_attribute[index_of(attribute)];
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i : content_indices(sections)) {
    const double p = m.probability(relevance_features(sections[i]));
    if (p >= 0.5) scored.emplace_back(p, i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < scored.size() && k < kMaxRelevantSections; ++k) {
    out.push_back(scored[k].second);
  }
  return out;
}

LabelSet entity_label_set() { return LabelSet({"O", "B-ans", "I-ans"}); }

AttributePrediction extract_entity(const EntityExtractor& extractor,
                                   const std::vector<Section>& sections,
                                   const std::vector<std::size_t>& relevant,
                                   const FeatureConfig& features) {
  if (kind_of(extractor.attribute) != AttributeKind::entity) {
    throw ModelMismatch(std::string(to_string(extractor.attribute)) + " is not an entity attribute");
  }
  if (extractor.model.labels() != entity_label_set()) {
    throw ModelMismatch("entity model labels must be O, B-ans, I-ans");
  }
  if (extractor.model.feature_fingerprint() != entity_fingerprint(features)) {
    throw ConfigMismatch("entity model was trained with '" + extractor.model.feature_fingerprint() +
                         "' features");
  }
  AttributePrediction pred;
  pred.attribute = extractor.attribute;
  if (relevant.empty()) {
    pred.no_relevant_section = true;
    return pred;
  }

  ScoredSpan best;
  ScoredSpan fallback;  // best single B position, used when nothing decodes
  for (std::size_t si : relevant) {
    const Section& s = sections.at(si);
    if (s.tokens.empty()) continue;
    const auto seq = extractor.model.compile(token_sequence_features(token_views(s), features));
    const auto path = viterbi_decode(extractor.model, seq);
    const auto marg = marginals(extractor.model, seq);
    const std::size_t n = path.size();
    for (std::size_t t = 0; t < n; ++t) {
      if (marg[t * 3 + kB] > fallback.score) fallback = {si, t, t, marg[t * 3 + kB]};
    }
    std::size_t t = 0;
    while (t < n) {
      if (path[t] == kO) {
        ++t;
        continue;
      }
      const std::size_t start = t;
      double sum = marg[t * 3 + path[t]];
      ++t;
      while (t < n && path[t] == kI) {
        sum += marg[t * 3 + kI];
        ++t;
      }
      const double score = sum / static_cast<double>(t - start);
      if (score > best.score) best = {si, start, t - 1, score};
    }
    if (fallback.section == si && fallback.score >= 0) {
      std::size_t e = fallback.start;
      while (e + 1 < n && marg[(e + 1) * 3 + kI] > 0.5) ++e;
      if (e > fallback.end) {
        double sum = 0;
        for (std::size_t k = fallback.start; k <= e; ++k) sum += marg[k * 3 + (k == fallback.start ? kB : kI)];
        fallback.end = e;
        fallback.score = sum / static_cast<double>(e - fallback.start + 1);
      }
    }
  }
  if (best.score < 0) best = fallback;
  if (best.score < 0) {
    pred.no_relevant_section = true;
    return pred;
  }
  const Section& s = sections[best.section];
  PredictedSpan span;
  span.section = best.section;
  span.token_start = best.start;
  span.token_end = best.end;
  span.doc_first_token = s.tokens[best.start].origin.doc_token;
  span.doc_last_token = s.tokens[best.end].origin.doc_token;
  span.text = join_tokens(s, best.start, best.end);
  pred.span = std::move(span);
  pred.confidence = std::clamp(best.score, 0.0, 1.0);
  return pred;
}

FeatureVector classifier_features(const std::vector<Section>& sections,
                                  const std::vector<std::size_t>& relevant,
                                  const FeatureConfig& features) {
  std::vector<std::size_t> ordered = relevant;
  std::sort(ordered.begin(), ordered.end(), [&](std::size_t a, std::size_t b) {
    return sections.at(a).first_line() < sections.at(b).first_line();
  });
  FeatureVector fv;
  const bool style = features.has(FeatureGroup::style);
  std::string prev = "<BOS>";
  for (std::size_t si : ordered) {
    const Section& s = sections[si];
    fv.add("type:" + std::string(to_string(s.type)));
    for (const auto& t : s.tokens) {
      std::string w = word_key(t.text);
      if (w.empty()) continue;
      fv.add("uni:" + w);
      fv.add("bi:" + prev + "_" + w);
      if (style && (t.bold || t.underline)) fv.add("style:word=" + w);
      prev = std::move(w);
    }
  }
  fv.finalize();
  FeatureVector binary;
  for (const auto& [name, value] : fv.entries()) binary.add(name, 1.0);
  binary.finalize();
  return binary;
}

AttributePrediction classify(const AttributeClassifier& classifier,
                             const std::vector<Section>& sections,
                             const std::vector<std::size_t>& relevant,
                             const FeatureConfig& features) {
  if (kind_of(classifier.attribute) != AttributeKind::boolean) {
    throw ModelMismatch(std::string(to_string(classifier.attribute)) + " is not a boolean attribute");
  }
  AttributePrediction pred;
  pred.attribute = classifier.attribute;
  if (relevant.empty()) {
    pred.answer = false;
    pred.no_relevant_section = true;
    return pred;
  }
  const double p = classifier.model.probability(classifier_features(sections, relevant, features));
  pred.answer = p >= 0.5;
  pred.confidence = p;
  return pred;
}

void ExtractorConfig::validate() const {
  features.validate();
  relevance.validate();
  classifier.validate();
  entity.validate();
}

std::string ExtractorBundle::to_json() const {
  json j;
  j["version"] = kVersion;
  j["features"] = features.groups_string();
  json rel = json::object();
  for (Attribute a : kAttributes) {
    rel[std::string(to_string(a))] = parse_embedded(relevance.per_attribute[index_of(a)].to_json());
  }
  j["relevance"] = std::move(rel);
  json ent = json::object();
  for (const auto& e : entity) ent[std::string(to_string(e.attribute))] = parse_embedded(e.model.to_json());
  j["entity"] = std::move(ent);
  json cls = json::object();
  for (const auto& c : classifier) cls[std::string(to_string(c.attribute))] = parse_embedded(c.model.to_json());
  j["classifier"] = std::move(cls);
  return j.dump();
}

ExtractorBundle ExtractorBundle::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("extractor bundle is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("version", -1) != kVersion) {
    throw FormatError("extractor bundle version must be " + std::to_string(kVersion));
  }
  for (const char* key : {"features", "relevance", "entity", "classifier"}) {
    if (!j.contains(key)) throw FormatError(std::string("extractor bundle is missing '") + key + "'");
  }
  ExtractorBundle b;
  try {
    b.features = FeatureConfig::from_groups(j["features"].get<std::string>());
  } catch (const ConfigError& e) {
    throw FormatError(e.what());
  }
  auto member = [&](const char* group, Attribute a) -> std::string {
    const json& g = j[group];
    const std::string name(to_string(a));
    if (!g.is_object() || !g.contains(name)) {
      throw FormatError(std::string("extractor bundle '") + group + "' lacks " + name);
    }
    return g[name].dump();
  };
  for (Attribute a : kAttributes) {
    b.relevance.per_attribute[index_of(a)] = LogisticModel::from_json(member("relevance", a));
  }
  b.entity = {EntityExtractor{Attribute::expiration_date, {}},
              EntityExtractor{Attribute::governing_law, {}}};
  for (auto& e : b.entity) e.model = CrfModel::from_json(member("entity", e.attribute));
  b.classifier = {AttributeClassifier{Attribute::termination_for_convenience, {}},
                  AttributeClassifier{Attribute::anti_assignment, {}}};
  for (auto& c : b.classifier) c.model = LogisticModel::from_json(member("classifier", c.attribute));
  return b;
}

const EntityExtractor& ExtractorBundle::entity_for(Attribute a) const {
  for (const auto& e : entity) {
    if (e.attribute == a) return e;
  }
  throw ModelMismatch(std::string(to_string(a)) + " has no entity extractor");
}

const AttributeClassifier& ExtractorBundle::classifier_for(Attribute a) const {
  for (const auto& c : classifier) {
    if (c.attribute == a) return c;
  }
  throw ModelMismatch(std::string(to_string(a)) + " has no classifier");
}

std::vector<Section> gold_sections(const LabeledDocument& ld) {
  if (!ld.has_labels) throw DataError(ld.doc.doc_id + " has no gold labels");
  return assemble_sections(ld.doc, ld.labels.line_labels);
}

std::vector<std::size_t> gold_relevant_sections(const LabeledDocument& ld,
                                                const std::vector<Section>& sections,
                                                Attribute attribute) {
  std::vector<std::size_t> out;
  const auto& ev = ld.labels.evidence[index_of(attribute)];
  if (!ev) return out;
  for (std::size_t i : content_indices(sections)) {
    const auto& s = sections[i];
    if (s.first_line() <= ev->last_line && s.last_line() >= ev->first_line) out.push_back(i);
  }
  return out;
}

RelevanceModel train_relevance(const Corpus& corpus, const std::vector<std::size_t>& indices,
                               const LogisticConfig& config) {
  std::vector<FeatureVector> x;
  std::array<std::vector<bool>, 4> y;
  for (std::size_t di : indices) {
    const LabeledDocument& ld = corpus.at(di);
    const auto sections = gold_sections(ld);
    std::array<std::vector<std::size_t>, 4> positives;
    for (Attribute a : kAttributes) positives[index_of(a)] = gold_relevant_sections(ld, sections, a);
    for (std::size_t i : content_indices(sections)) {
      x.push_back(relevance_features(sections[i]));
      for (Attribute a : kAttributes) {
        const auto& pos = positives[index_of(a)];
        y[index_of(a)].push_back(std::find(pos.begin(), pos.end(), i) != pos.end());
      }
    }
  }
  if (x.empty()) throw DataError("no clause or sub-clause sections to train relevance on");
  RelevanceModel m;
  for (Attribute a : kAttributes) m.per_attribute[index_of(a)] = train_logistic(x, y[index_of(a)], config);
  return m;
}

EntityExtractor train_entity(const Corpus& corpus, const std::vector<std::size_t>& indices,
                             Attribute attribute, const FeatureConfig& features,
                             const TrainConfig& config) {
  if (kind_of(attribute) != AttributeKind::entity) {
    throw ModelMismatch(std::string(to_string(attribute)) + " is not an entity attribute");
  }
  CrfTrainer trainer(entity_label_set(), entity_fingerprint(features));
  for (std::size_t di : indices) {
    const LabeledDocument& ld = corpus.at(di);
    const auto& gold = ld.labels.entity_span(attribute);
    if (!gold) continue;
    const auto sections = gold_sections(ld);
    const auto relevant = gold_relevant_sections(ld, sections, attribute);
    bool found = false;
    for (std::size_t si : relevant) {
      const Section& s = sections[si];
      std::vector<std::uint32_t> labels(s.tokens.size(), kO);
      bool inside = false;
      for (std::size_t k = 0; k < s.tokens.size(); ++k) {
        const std::size_t t = s.tokens[k].origin.doc_token;
        if (t >= gold->first_token && t <= gold->last_token) {
          labels[k] = inside ? kI : kB;
          inside = true;
          found = true;
        }
      }
      if (!s.tokens.empty()) trainer.add(token_sequence_features(token_views(s), features), labels);
    }
    if (!found) {
      throw DataError(ld.doc.doc_id + ": " + std::string(to_string(attribute)) +
                      " span does not fall inside a relevant section");
    }
  }
  EntityExtractor e;
  e.attribute = attribute;
  e.model = trainer.train(config);
  return e;
}

AttributeClassifier train_classifier(const Corpus& corpus, const std::vector<std::size_t>& indices,
                                     Attribute attribute, const FeatureConfig& features,
                                     const LogisticConfig& config) {
  if (kind_of(attribute) != AttributeKind::boolean) {
    throw ModelMismatch(std::string(to_string(attribute)) + " is not a boolean attribute");
  }
  std::vector<FeatureVector> x;
  std::vector<bool> y;
  for (std::size_t di : indices) {
    const LabeledDocument& ld = corpus.at(di);
    const auto sections = gold_sections(ld);
    const auto relevant = gold_relevant_sections(ld, sections, attribute);
    if (relevant.empty()) continue;
    x.push_back(classifier_features(sections, relevant, features));
    y.push_back(ld.labels.boolean_value(attribute));
  }
  AttributeClassifier c;
  c.attribute = attribute;
  c.model = train_logistic(x, y, config);
  return c;
}

ExtractorBundle train_extractors(const Corpus& corpus, const std::vector<std::size_t>& indices,
                                 const ExtractorConfig& config) {
  config.validate();
  ExtractorBundle b;
  b.features = config.features;
  b.relevance = train_relevance(corpus, indices, config.relevance);
  b.entity = {train_entity(corpus, indices, Attribute::expiration_date, config.features, config.entity),
              train_entity(corpus, indices, Attribute::governing_law, config.features, config.entity)};
  b.classifier = {
      train_classifier(corpus, indices, Attribute::termination_for_convenience, config.features,
                       config.classifier),
      train_classifier(corpus, indices, Attribute::anti_assignment, config.features,
                       config.classifier)};
  return b;
}

std::vector<AttributePrediction> predict_document(const ExtractorBundle& bundle,
                                                  const std::vector<Section>& sections) {
  std::vector<AttributePrediction> out;
  for (Attribute a : kAttributes) {
    const auto relevant = select_relevant_sections(bundle.relevance, sections, a);
    if (kind_of(a) == AttributeKind::entity) {
      out.push_back(extract_entity(bundle.entity_for(a), sections, relevant, bundle.features));
    } else {
      out.push_back(classify(bundle.classifier_for(a), sections, relevant, bundle.features));
    }
  }
  return out;
}

std::string normalize_answer(std::string_view text) {
  std::string collapsed;
  bool space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !collapsed.empty()) collapsed += ' ';
    space = false;
    collapsed += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  std::size_t b = 0;
  std::size_t e = collapsed.size();
  while (b < e && std::ispunct(static_cast<unsigned char>(collapsed[b]))) ++b;
  while (e > b && std::ispunct(static_cast<unsigned char>(collapsed[e - 1]))) --e;
  std::string out = collapsed.substr(b, e - b);
  while (!out.empty() && out.back() == ' ') out.pop_back();
  while (!out.empty() && out.front() == ' ') out.erase(out.begin());
  return out;
}

}  // namespace cuesplit
