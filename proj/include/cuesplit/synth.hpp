#pragma once

// Seeded synthetic contract generator with full ground truth, plus the
// corpus-level plumbing around it (labels files, splits, statistics).

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cuesplit/attributes.hpp"
#include "cuesplit/document.hpp"
#include "cuesplit/sections.hpp"

namespace cuesplit {

struct GenConfig {
  std::uint64_t seed = 7;
  std::size_t doc_count = 200;
  std::size_t mean_words_per_doc = 9594;
  double page_width = 612;
  double page_height = 792;
  double header_prob = 0.5;
  double footer_prob = 0.9;
  double broken_span_prob = 0.1;
  double style_noise = 0.03;

  void validate() const;  // throws ConfigError
};

// Inclusive range of reading-order document token indices.
struct TokenSpan {
  std::size_t first_token = 0;
  std::size_t last_token = 0;
  bool operator==(const TokenSpan&) const = default;
};

// Inclusive range of reading-order line indices.
struct LineSpan {
  std::size_t first_line = 0;
  std::size_t last_line = 0;
  bool operator==(const LineSpan&) const = default;
};

struct GoldLabels {
  std::string doc_id;
  std::vector<SectionTag> line_labels;
  std::vector<SectionSpan> sections;
  std::optional<TokenSpan> expiration_date;
  std::optional<TokenSpan> governing_law;
  bool termination_for_convenience = false;
  bool anti_assignment = false;
  // Lines of the clause (with its sub-clauses) carrying each attribute's
  // evidence; used to label section relevance.
  std::array<std::optional<LineSpan>, 4> evidence;

  const std::optional<TokenSpan>& entity_span(Attribute a) const;
  bool boolean_value(Attribute a) const;
  bool operator==(const GoldLabels&) const = default;
};

struct LabeledDocument {
  Document doc;
  GoldLabels labels;
  bool has_labels = true;
};

using Corpus = std::vector<LabeledDocument>;

Corpus generate_corpus(const GenConfig& config);
LabeledDocument generate_document(const GenConfig& config, std::size_t index);

// Gold entity answer text: the span's tokens that sit on content lines,
// joined by single spaces (interrupting header/footer lines are skipped).
std::string gold_span_text(const Document& doc, const GoldLabels& labels,
                           const TokenSpan& span);

struct CorpusSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> dev;
  std::vector<std::size_t> test;
};

// 80/10/10 split by document, deterministic given the seed.
CorpusSplit split_corpus(std::size_t doc_count, std::uint64_t seed);

struct CorpusStats {
  std::size_t doc_count = 0;
  double mean_words = 0;
  std::size_t min_words = 0;
  std::size_t max_words = 0;
  std::size_t total_words = 0;
  std::size_t total_lines = 0;
  std::size_t total_pages = 0;
  std::map<std::string, std::size_t> label_distribution;
};

CorpusStats corpus_stats(const Corpus& corpus);  // throws EmptyCorpus

// Reference statistics of the 510-contract CUAD corpus, for reports.
struct ReferenceCorpusStats {
  static constexpr std::size_t documents = 510;
  static constexpr std::size_t train_documents = 408;
  static constexpr std::size_t dev_test_documents = 51;
  static constexpr std::size_t mean_words = 9594;
  static constexpr std::size_t min_words = 109;
  static constexpr std::size_t max_words = 103923;
};

std::string labels_to_json(const GoldLabels& labels);
GoldLabels parse_labels(std::string_view json_text);  // throws SchemaError

// On-disk corpus: doc_NNN.json + doc_NNN.labels.json + manifest.jsonl.
void write_corpus(const std::filesystem::path& dir, const Corpus& corpus,
                  const CorpusSplit& split);

struct LoadedCorpus {
  Corpus docs;
  CorpusSplit split;
};

LoadedCorpus read_corpus(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);  // throws IoError

}  // namespace cuesplit
