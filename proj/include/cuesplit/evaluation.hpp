#pragma once

// Metrics and the experiment drivers: section splitting ablation, the
// document-length curve and the end-to-end pipeline comparison.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cuesplit/crf.hpp"
#include "cuesplit/extractors.hpp"
#include "cuesplit/features.hpp"
#include "cuesplit/rules.hpp"
#include "cuesplit/sections.hpp"
#include "cuesplit/synth.hpp"

namespace cuesplit {

struct Metrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;       // only meaningful for yes/no attributes
  std::size_t support = 0;  // gold positives, tp + fn

  // Precision is 1 when nothing was predicted and nothing was missed, and 0
  // when nothing was predicted but something was; recall likewise.
  static Metrics from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn = 0);
  double accuracy() const;
  bool operator==(const Metrics&) const = default;
};

// x / baseline - 1.
double relative_delta(double value, double baseline);
// Signed percentage to one decimal: format_delta(.919, .904) == "+1.7%".
std::string format_delta(double value, double baseline);

enum class MatchMode : std::uint8_t { exact, overlap };

double line_jaccard(const SectionSpan& a, const SectionSpan& b);

// Greedy one-to-one matching of same-type spans by descending Jaccard
// (ties by predicted then gold position) keeping pairs with Jaccard >= 0.5.
std::size_t overlap_match_count(const std::vector<SectionSpan>& predicted,
                                const std::vector<SectionSpan>& gold);

// Per-document span lists, summed per section type (indexed by SectionType).
std::array<Metrics, 4> section_prf(const std::vector<std::vector<SectionSpan>>& predicted,
                                   const std::vector<std::vector<SectionSpan>>& gold,
                                   MatchMode mode);

struct DocPrediction {
  std::string doc_id;
  AttributePrediction prediction;
};

struct GoldAttribute {
  std::string doc_id;
  std::optional<std::string> span_text;
  std::optional<bool> answer;
};

GoldAttribute gold_attribute(const LabeledDocument& ld, Attribute attribute);

// Yes is the positive class for boolean attributes. An entity is a true
// positive when the normalised texts agree; a wrong span counts as both a
// false positive and a false negative. Throws AlignmentError when the
// doc_id sets differ or repeat.
Metrics attribute_prf(const std::vector<DocPrediction>& predictions,
                      const std::vector<GoldAttribute>& golds, Attribute attribute);

// Reference values from the published results, shown next to ours.
struct PaperReference {
  static constexpr double clause_baseline_p = 0.904;
  static constexpr double clause_baseline_r = 0.897;
  static constexpr double clause_baseline_f1 = 0.900;
  static constexpr double footer_all_groups_f1 = 0.872;
};

// Rows of the ablation in report order.
struct AblationRun {
  std::string name;
  FeatureConfig features;
};
std::vector<AblationRun> ablation_runs();

struct AblationReport {
  std::vector<std::string> names;
  std::vector<std::array<Metrics, 4>> exact;
  std::vector<std::array<Metrics, 4>> overlap;
};

AblationReport run_ablation(const Corpus& corpus, const CorpusSplit& split,
                            const TrainConfig& train, std::size_t jobs = 1);
std::string ablation_csv(const AblationReport& report);

struct LengthPoint {
  std::size_t window_tokens = 0;
  Metrics metrics;
  std::size_t skipped = 0;  // documents shorter than the window or span
};

struct LengthCurve {
  std::uint64_t seed = 0;
  std::vector<LengthPoint> points;
};

// A window of exactly `window` tokens from the document's text stream (every
// line except headers and footers) containing the gold span at a uniformly
// drawn offset. Returns nullopt when the document cannot host the window.
struct TokenWindow {
  std::vector<std::string> tokens;
  std::vector<std::uint32_t> labels;  // O / B-ans / I-ans
  std::size_t span_first = 0;         // within the window
  std::size_t span_last = 0;
};
std::optional<TokenWindow> governing_law_window(const LabeledDocument& ld, std::size_t window,
                                                std::uint64_t seed);

// Throws ConfigError for unsorted windows or when a window fits no document.
LengthCurve run_length_experiment(const Corpus& corpus, const CorpusSplit& split,
                                  const std::vector<std::size_t>& windows, std::uint64_t seed,
                                  const TrainConfig& train, std::size_t jobs = 1);
std::string length_csv(const LengthCurve& curve);
std::string length_plot_data(const LengthCurve& curve);

struct EndToEndConfig {
  TrainConfig splitter{0.1, 100, 1e-4, 0, 1};
  ExtractorConfig extractors;
  RuleOptions rule_options;
};

struct ComparisonRow {
  std::string pipeline;  // rules, model, model+visual
  Attribute attribute = Attribute::governing_law;
  Metrics metrics;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  const Metrics& get(const std::string& pipeline, Attribute attribute) const;
};

// Trains baseline and all-groups splitters plus matching extractors on the
// train split and scores every pipeline on the test split. The rules
// pipeline reads the baseline-split sections for clause-scoped rules.
ComparisonReport run_endtoend_comparison(const Corpus& corpus, const CorpusSplit& split,
                                         const RuleSet& rules, const EndToEndConfig& config,
                                         std::size_t jobs = 1);
std::string comparison_csv(const ComparisonReport& report);

// Splits and predicts every listed document, preserving order.
std::vector<std::vector<Section>> split_documents(const CrfModel& model, const Corpus& corpus,
                                                  const std::vector<std::size_t>& indices,
                                                  const FeatureConfig& features, std::size_t jobs);

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace cuesplit
