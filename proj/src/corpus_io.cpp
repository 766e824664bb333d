#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "cuesplit/errors.hpp"
#include "cuesplit/rng.hpp"
#include "cuesplit/synth.hpp"
#include "cuesplit/io.hpp"

namespace cuesplit {

using nlohmann::json;

namespace {

json span_json(const std::optional<TokenSpan>& span) {
  if (!span) return nullptr;
  return {{"first_token", span->first_token}, {"last_token", span->last_token}};
}

std::size_t get_index(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(path + "." + key, "missing field");
  }
  const json& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw SchemaError(path + "." + key, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::optional<TokenSpan> parse_span(const json& j, const std::string& path) {
  if (j.is_null()) return std::nullopt;
  TokenSpan s{get_index(j, "first_token", path), get_index(j, "last_token", path)};
  if (s.last_token < s.first_token) throw SchemaError(path, "last_token before first_token");
  return s;
}

}  // namespace

std::string labels_to_json(const GoldLabels& labels) {
  json j;
  j["doc_id"] = labels.doc_id;
  json tags = json::array();
  for (SectionTag t : labels.line_labels) tags.push_back(std::string(to_string(t)));
  j["line_labels"] = std::move(tags);
  json sections = json::array();
  for (const auto& s : labels.sections) {
    sections.push_back({{"type", std::string(to_string(s.type))},
                        {"first_line", s.first_line},
                        {"last_line", s.last_line}});
  }
  j["sections"] = std::move(sections);
  j["attributes"] = {
      {"expiration_date", span_json(labels.expiration_date)},
      {"governing_law", span_json(labels.governing_law)},
      {"termination_for_convenience", labels.termination_for_convenience},
      {"anti_assignment", labels.anti_assignment}};
  json evidence = json::object();
  for (Attribute a : kAttributes) {
    const auto& e = labels.evidence[index_of(a)];
    evidence[std::string(to_string(a))] =
        e ? json{{"first_line", e->first_line}, {"last_line", e->last_line}}
          : json(nullptr);
  }
  j["evidence"] = std::move(evidence);
  return j.dump();
}

GoldLabels parse_labels(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", e.what());
  }
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  GoldLabels out;
  if (!j.contains("doc_id") || !j["doc_id"].is_string()) {
    throw SchemaError("doc_id", "expected a string");
  }
  out.doc_id = j["doc_id"].get<std::string>();
  if (!j.contains("line_labels") || !j["line_labels"].is_array()) {
    throw SchemaError("line_labels", "expected an array");
  }
  for (std::size_t i = 0; i < j["line_labels"].size(); ++i) {
    const json& t = j["line_labels"][i];
    if (!t.is_string()) throw SchemaError("line_labels[" + std::to_string(i) + "]", "expected a string");
    try {
      out.line_labels.push_back(section_tag_from_string(t.get<std::string>()));
    } catch (const FormatError& e) {
      throw SchemaError("line_labels[" + std::to_string(i) + "]", e.what());
    }
  }
  if (!j.contains("sections") || !j["sections"].is_array()) {
    throw SchemaError("sections", "expected an array");
  }
  for (std::size_t i = 0; i < j["sections"].size(); ++i) {
    const std::string path = "sections[" + std::to_string(i) + "]";
    const json& s = j["sections"][i];
    if (!s.is_object() || !s.contains("type") || !s["type"].is_string()) {
      throw SchemaError(path + ".type", "expected a string");
    }
    SectionSpan span;
    try {
      span.type = section_type_from_string(s["type"].get<std::string>());
    } catch (const FormatError& e) {
      throw SchemaError(path + ".type", e.what());
    }
    span.first_line = get_index(s, "first_line", path);
    span.last_line = get_index(s, "last_line", path);
    out.sections.push_back(span);
  }
  if (!j.contains("attributes") || !j["attributes"].is_object()) {
    throw SchemaError("attributes", "expected an object");
  }
  const json& attrs = j["attributes"];
  for (const char* key : {"expiration_date", "governing_law"}) {
    if (!attrs.contains(key)) throw SchemaError(std::string("attributes.") + key, "missing field");
  }
  out.expiration_date = parse_span(attrs["expiration_date"], "attributes.expiration_date");
  out.governing_law = parse_span(attrs["governing_law"], "attributes.governing_law");
  for (const char* key : {"termination_for_convenience", "anti_assignment"}) {
    if (!attrs.contains(key) || !attrs[key].is_boolean()) {
      throw SchemaError(std::string("attributes.") + key, "expected a boolean");
    }
  }
  out.termination_for_convenience = attrs["termination_for_convenience"].get<bool>();
  out.anti_assignment = attrs["anti_assignment"].get<bool>();
  if (j.contains("evidence") && j["evidence"].is_object()) {
    for (Attribute a : kAttributes) {
      const std::string key(to_string(a));
      if (!j["evidence"].contains(key) || j["evidence"][key].is_null()) continue;
      const std::string path = "evidence." + key;
      out.evidence[index_of(a)] = LineSpan{get_index(j["evidence"][key], "first_line", path),
                                           get_index(j["evidence"][key], "last_line", path)};
    }
  }
  return out;
}

CorpusSplit split_corpus(std::size_t doc_count, std::uint64_t seed) {
  std::vector<std::size_t> order(doc_count);
  for (std::size_t i = 0; i < doc_count; ++i) order[i] = i;
  Rng rng(derive_seed(seed, 0x5eed5eedULL));
  rng.shuffle(order);
  const std::size_t n_train = doc_count * 8 / 10;
  const std::size_t n_dev = doc_count / 10;
  CorpusSplit split;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.dev.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                   order.begin() + static_cast<std::ptrdiff_t>(n_train + n_dev));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_dev), order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.dev.begin(), split.dev.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.empty()) throw EmptyCorpus("corpus has no documents");
  CorpusStats s;
  s.doc_count = corpus.size();
  s.min_words = std::numeric_limits<std::size_t>::max();
  for (const auto& ld : corpus) {
    const std::size_t words = token_count(ld.doc);
    s.total_words += words;
    s.min_words = std::min(s.min_words, words);
    s.max_words = std::max(s.max_words, words);
    s.total_lines += line_count(ld.doc);
    s.total_pages += ld.doc.pages.size();
    if (!ld.has_labels) continue;
    for (SectionTag t : ld.labels.line_labels) ++s.label_distribution[std::string(to_string(t))];
    if (ld.labels.termination_for_convenience) ++s.label_distribution["termination_for_convenience=yes"];
    if (ld.labels.anti_assignment) ++s.label_distribution["anti_assignment=yes"];
  }
  s.mean_words = static_cast<double>(s.total_words) / static_cast<double>(s.doc_count);
  return s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

const char* split_name(const CorpusSplit& split, std::size_t i) {
  if (std::binary_search(split.dev.begin(), split.dev.end(), i)) return "dev";
  if (std::binary_search(split.test.begin(), split.test.end(), i)) return "test";
  return "train";
}

}  // namespace

void write_corpus(const std::filesystem::path& dir, const Corpus& corpus,
                  const CorpusSplit& split) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::string manifest;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& ld = corpus[i];
    const std::string doc_name = ld.doc.doc_id + ".json";
    write_file_atomic(dir / doc_name, serialize_document(ld.doc) + "\n");
    json rec = {{"doc", doc_name}, {"labels", nullptr}, {"split", split_name(split, i)}};
    if (ld.has_labels) {
      const std::string labels_name = ld.doc.doc_id + ".labels.json";
      write_file_atomic(dir / labels_name, labels_to_json(ld.labels) + "\n");
      rec["labels"] = labels_name;
    }
    manifest += rec.dump() + "\n";
  }
  write_file_atomic(dir / "manifest.jsonl", manifest);
}

LoadedCorpus read_corpus(const std::filesystem::path& dir) {
  const std::string manifest = read_file(dir / "manifest.jsonl");
  LoadedCorpus out;
  std::istringstream in(manifest);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> ids;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string path = "manifest.jsonl:" + std::to_string(lineno);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(path, e.what());
    }
    if (!rec.is_object() || !rec.contains("doc") || !rec["doc"].is_string()) {
      throw SchemaError(path + ".doc", "expected a string");
    }
    LabeledDocument ld;
    ld.doc = parse_document(read_file(dir / rec["doc"].get<std::string>()));
    ld.has_labels = rec.contains("labels") && rec["labels"].is_string();
    if (ld.has_labels) {
      ld.labels = parse_labels(read_file(dir / rec["labels"].get<std::string>()));
      if (ld.labels.doc_id != ld.doc.doc_id) {
        throw AlignmentError("labels for " + ld.labels.doc_id + " paired with " + ld.doc.doc_id);
      }
      if (ld.labels.line_labels.size() != line_count(ld.doc)) {
        throw LengthMismatch(ld.doc.doc_id + ": " + std::to_string(ld.labels.line_labels.size()) +
                             " labels for " + std::to_string(line_count(ld.doc)) + " lines");
      }
    }
    if (std::find(ids.begin(), ids.end(), ld.doc.doc_id) != ids.end()) {
      throw DuplicateId("doc_id " + ld.doc.doc_id + " appears twice in the corpus");
    }
    ids.push_back(ld.doc.doc_id);
    const std::size_t index = out.docs.size();
    const std::string split = rec.contains("split") && rec["split"].is_string()
                                  ? rec["split"].get<std::string>()
                                  : "train";
    if (split == "dev") {
      out.split.dev.push_back(index);
    } else if (split == "test") {
      out.split.test.push_back(index);
    } else {
      out.split.train.push_back(index);
    }
    out.docs.push_back(std::move(ld));
  }
  return out;
}

}  // namespace cuesplit
