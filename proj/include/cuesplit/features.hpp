#pragma once

// Sparse, namespaced line and token features. Line features come in five
// groups that can be toggled independently for ablations.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cuesplit/document.hpp"
#include "cuesplit/sections.hpp"

namespace cuesplit {

enum class FeatureGroup : std::uint8_t {
  baseline,
  page_layout,
  text_placement,
  visual_grouping,
  style,
};

inline constexpr std::array<FeatureGroup, 5> kFeatureGroups = {
    FeatureGroup::baseline, FeatureGroup::page_layout,
    FeatureGroup::text_placement, FeatureGroup::visual_grouping,
    FeatureGroup::style};

std::string_view to_string(FeatureGroup group);
FeatureGroup feature_group_from_string(std::string_view name);  // ConfigError

struct FeatureConfig {
  std::array<bool, 5> enabled = {true, false, false, false, false};
  double indent_quantum = 18.0;  // points per indentation level
  double margin_fraction = 0.08;

  static FeatureConfig baseline_only();
  static FeatureConfig all_groups();
  // "all", "baseline", or a list such as "page_layout,style" (commas or
  // plus signs);
  // baseline is always added.
  static FeatureConfig from_groups(std::string_view spec);

  FeatureConfig with(FeatureGroup group) const;
  bool has(FeatureGroup group) const { return enabled[static_cast<std::size_t>(group)]; }
  std::string groups_string() const;
  // Stable identity stored in trained models.
  std::string fingerprint() const;
  // Inverse of fingerprint(); throws ConfigError for anything else.
  static FeatureConfig from_fingerprint(std::string_view fingerprint);
  void validate() const;  // throws ConfigError
};

// Sorted, duplicate-free name -> weight entries; zero weights are dropped.
class FeatureVector {
 public:
  void add(std::string name, double value = 1.0);
  // Sorts and merges; called by the producers before returning.
  void finalize();

  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(std::string_view name) const;
  double get(std::string_view name) const;
  bool operator==(const FeatureVector&) const = default;

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

struct BodyFontEstimate {
  double body_font_size = 0;
};

// Mode of font sizes rounded to 0.5pt, ties toward the smaller size.
BodyFontEstimate estimate_body_font(const Document& doc);  // EmptyDocument

// Precomputes per-page geometry so a whole document can be featurized in
// one pass. Output for a line equals line_features() for that line.
class DocumentFeaturizer {
 public:
  DocumentFeaturizer(const Document& doc, FeatureConfig config);
  DocumentFeaturizer(const Document& doc, FeatureConfig config, BodyFontEstimate body);

  std::size_t size() const { return order_.size(); }
  const ReadingOrder& order() const { return order_; }
  FeatureVector line(std::size_t reading_index) const;
  std::vector<FeatureVector> all() const;

 private:
  struct PageStats {
    double min_x0 = 0;
    double max_x1 = 0;
  };

  const Document& doc_;
  FeatureConfig config_;
  BodyFontEstimate body_;
  ReadingOrder order_;
  std::vector<PageStats> pages_;
  std::vector<std::size_t> first_on_page_;
  std::vector<std::size_t> last_on_page_;
};

FeatureVector line_features(const Document& doc, const LineRef& ref,
                            const FeatureConfig& config,
                            const BodyFontEstimate& body);  // InvalidRef

// Character-class shape with runs collapsed: "Massachusetts" -> "Xx",
// "4" -> "d", "(a)" -> "(x)".
std::string token_shape(std::string_view text);
// Line-level first-token shape: Xx, XX, dd, d.d, (a) or mixed.
std::string lead_shape(std::string_view text);

struct TokenView {
  std::string_view text;
  bool bold = false;
  bool underline = false;
};

FeatureVector token_features(const std::vector<TokenView>& tokens,
                             std::size_t index, const FeatureConfig& config);
FeatureVector token_features(const Document& doc, const Section& section,
                             std::size_t token_index,
                             const FeatureConfig& config);  // InvalidRef
std::vector<FeatureVector> token_sequence_features(const std::vector<TokenView>& tokens,
                                                   const FeatureConfig& config);
std::vector<TokenView> token_views(const Section& section);

std::string lowercase(std::string_view text);

}  // namespace cuesplit
