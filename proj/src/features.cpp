#include "cuesplit/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

#include "cuesplit/errors.hpp"

namespace cuesplit {

namespace {

constexpr std::array<std::string_view, 5> kGroupNames = {
    "baseline", "page_layout", "text_placement", "visual_grouping", "style"};

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return is_upper(c) || is_lower(c); }

bool all_caps_word(std::string_view s) {
  bool letters = false;
  for (char c : s) {
    if (is_lower(c)) return false;
    if (is_upper(c)) letters = true;
  }
  return letters;
}

bool is_roman(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c != 'i' && c != 'v' && c != 'x') return false;
  }
  return true;
}

// "2.1", "12.", "3.2.1"
bool is_decimal_number(std::string_view s) {
  if (s.empty() || !is_digit(s.front())) return false;
  bool prev_dot = false;
  for (char c : s) {
    if (is_digit(c)) {
      prev_dot = false;
    } else if (c == '.' && !prev_dot) {
      prev_dot = true;
    } else {
      return false;
    }
  }
  return s.find('.') != std::string_view::npos;
}

// "(a)", "(iv)", "(12)"
bool is_paren_number(std::string_view s) {
  if (s.size() < 3 || s.front() != '(' || s.back() != ')') return false;
  const std::string_view inner = s.substr(1, s.size() - 2);
  if (inner.size() == 1 && is_alpha(inner[0])) return true;
  bool digits = true;
  for (char c : inner) digits = digits && is_digit(c);
  if (digits) return true;
  std::string low;
  for (char c : inner) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return is_roman(low);
}

std::string length_bucket(std::size_t n) {
  if (n <= 1) return "1";
  if (n <= 5) return "2-5";
  if (n <= 15) return "6-15";
  return "16+";
}

std::string ratio_bucket(std::size_t hits, std::size_t total) {
  if (hits == 0) return "none";
  if (hits == total) return "all";
  return "some";
}

std::string position_bucket(std::size_t i) {
  if (i == 0) return "0";
  if (i < 5) return "1-4";
  if (i < 20) return "5-19";
  if (i < 100) return "20-99";
  return "100+";
}

}  // namespace

std::string lowercase(std::string_view text) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x80 || u <= 0x20) {
      out += '%';
      out += hex[u >> 4];
      out += hex[u & 15];
    } else {
      out += static_cast<char>(std::tolower(u));
    }
  }
  return out;
}

std::string_view to_string(FeatureGroup group) {
  return kGroupNames[static_cast<std::size_t>(group)];
}

FeatureGroup feature_group_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kGroupNames.size(); ++i) {
    if (kGroupNames[i] == name) return static_cast<FeatureGroup>(i);
  }
  throw ConfigError("unknown feature group '" + std::string(name) + "'");
}

FeatureConfig FeatureConfig::baseline_only() { return FeatureConfig{}; }

FeatureConfig FeatureConfig::all_groups() {
  FeatureConfig c;
  c.enabled.fill(true);
  return c;
}

FeatureConfig FeatureConfig::from_groups(std::string_view spec) {
  FeatureConfig c;
  if (spec == "all") return all_groups();
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t end = spec.find_first_of(",+", pos);
    if (end == std::string_view::npos) end = spec.size();
    std::string_view item = spec.substr(pos, end - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      if (item == "all") return all_groups();
      c.enabled[static_cast<std::size_t>(feature_group_from_string(item))] = true;
    }
    pos = end + 1;
  }
  return c;
}

FeatureConfig FeatureConfig::with(FeatureGroup group) const {
  FeatureConfig c = *this;
  c.enabled[static_cast<std::size_t>(group)] = true;
  return c;
}

std::string FeatureConfig::groups_string() const {
  std::string out;
  for (FeatureGroup g : kFeatureGroups) {
    if (!has(g)) continue;
    if (!out.empty()) out += '+';
    out += to_string(g);
  }
  return out;
}

std::string FeatureConfig::fingerprint() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, ";indent=%g;margin=%g", indent_quantum, margin_fraction);
  return "lines/v1:" + groups_string() + buf;
}

FeatureConfig FeatureConfig::from_fingerprint(std::string_view fp) {
  constexpr std::string_view prefix = "lines/v1:";
  const std::size_t indent_at = fp.find(";indent=");
  const std::size_t margin_at = fp.find(";margin=");
  if (fp.substr(0, prefix.size()) != prefix || indent_at == std::string_view::npos ||
      margin_at == std::string_view::npos || margin_at < indent_at) {
    throw ConfigError("not a line feature fingerprint: '" + std::string(fp) + "'");
  }
  FeatureConfig c = from_groups(fp.substr(prefix.size(), indent_at - prefix.size()));
  const std::string indent(fp.substr(indent_at + 8, margin_at - indent_at - 8));
  const std::string margin(fp.substr(margin_at + 8));
  char* end = nullptr;
  c.indent_quantum = std::strtod(indent.c_str(), &end);
  if (end == indent.c_str() || *end) throw ConfigError("bad indent in fingerprint");
  c.margin_fraction = std::strtod(margin.c_str(), &end);
  if (end == margin.c_str() || *end) throw ConfigError("bad margin in fingerprint");
  c.validate();
  if (c.fingerprint() != fp) throw ConfigError("fingerprint does not round-trip: '" + std::string(fp) + "'");
  return c;
}

void FeatureConfig::validate() const {
  if (!enabled[0]) throw ConfigError("the baseline group cannot be disabled");
  if (!(indent_quantum > 0)) throw ConfigError("indent_quantum must be positive");
  if (!(margin_fraction > 0 && margin_fraction < 0.5)) {
    throw ConfigError("margin_fraction must lie in (0, 0.5)");
  }
}

void FeatureVector::add(std::string name, double value) {
  entries_.emplace_back(std::move(name), value);
}

void FeatureVector::finalize() {
  std::sort(entries_.begin(), entries_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (out > 0 && entries_[out - 1].first == entries_[i].first) {
      entries_[out - 1].second += entries_[i].second;
    } else {
      if (out != i) entries_[out] = std::move(entries_[i]);
      ++out;
    }
  }
  entries_.resize(out);
  std::erase_if(entries_, [](const auto& e) { return e.second == 0.0; });
}

bool FeatureVector::contains(std::string_view name) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                             [](const auto& e, std::string_view n) { return e.first < n; });
  return it != entries_.end() && it->first == name;
}

double FeatureVector::get(std::string_view name) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                             [](const auto& e, std::string_view n) { return e.first < n; });
  return (it != entries_.end() && it->first == name) ? it->second : 0.0;
}

BodyFontEstimate estimate_body_font(const Document& doc) {
  std::map<double, std::size_t> counts;
  for (const auto& page : doc.pages) {
    for (const auto& block : page.blocks) {
      for (const auto& line : block.lines) {
        for (const auto& t : line.tokens) {
          ++counts[std::round(t.font_size * 2.0) / 2.0];
        }
      }
    }
  }
  if (counts.empty()) throw EmptyDocument(doc.doc_id + " has no tokens");
  double best = 0;
  std::size_t best_count = 0;
  for (const auto& [size, n] : counts) {
    if (n > best_count) {
      best = size;
      best_count = n;
    }
  }
  return {best};
}

std::string lead_shape(std::string_view s) {
  if (is_paren_number(s)) return "(a)";
  if (is_decimal_number(s)) return "d.d";
  if (!s.empty() && std::all_of(s.begin(), s.end(), is_digit)) return "dd";
  if (s.size() >= 2 && std::all_of(s.begin(), s.end(), [](char c) { return is_upper(c) || !is_alpha(c); }) &&
      std::any_of(s.begin(), s.end(), is_upper)) {
    return "XX";
  }
  if (!s.empty() && is_upper(s.front()) &&
      std::none_of(s.begin() + 1, s.end(), is_upper)) {
    return "Xx";
  }
  return "mixed";
}

std::string token_shape(std::string_view text) {
  std::string out;
  for (char c : text) {
    char k;
    if (is_upper(c)) {
      k = 'X';
    } else if (is_lower(c)) {
      k = 'x';
    } else if (is_digit(c)) {
      k = 'd';
    } else if (static_cast<unsigned char>(c) >= 0x80 || static_cast<unsigned char>(c) <= 0x20) {
      k = '?';
    } else {
      k = c;
    }
    if (out.empty() || out.back() != k) out += k;
  }
  return out;
}

DocumentFeaturizer::DocumentFeaturizer(const Document& doc, FeatureConfig config)
    : DocumentFeaturizer(doc, config,
                         config.has(FeatureGroup::style) ? estimate_body_font(doc)
                                                         : BodyFontEstimate{}) {}

DocumentFeaturizer::DocumentFeaturizer(const Document& doc, FeatureConfig config,
                                       BodyFontEstimate body)
    : doc_(doc), config_(config), body_(body), order_(doc) {
  config_.validate();
  pages_.resize(doc.pages.size());
  for (std::size_t p = 0; p < doc.pages.size(); ++p) {
    PageStats& s = pages_[p];
    s.min_x0 = doc.pages[p].width;
    s.max_x1 = 0;
    for (const auto& block : doc.pages[p].blocks) {
      for (const auto& line : block.lines) {
        s.min_x0 = std::min(s.min_x0, line.bbox.x0);
        s.max_x1 = std::max(s.max_x1, line.bbox.x1);
      }
    }
  }
  first_on_page_.assign(doc.pages.size(), 0);
  last_on_page_.assign(doc.pages.size(), 0);
  for (std::size_t i = order_.size(); i-- > 0;) {
    first_on_page_[order_[i].ref.page_index] = i;
  }
  for (std::size_t i = 0; i < order_.size(); ++i) {
    last_on_page_[order_[i].ref.page_index] = i;
  }
}

FeatureVector DocumentFeaturizer::line(std::size_t i) const {
  if (i >= order_.size()) throw InvalidRef("reading line " + std::to_string(i) + " out of range");
  const OrderedLine& ol = order_[i];
  const Line& line = *ol.line;
  const Page& page = doc_.pages[ol.ref.page_index];
  const auto& tokens = line.tokens;
  FeatureVector fv;

  // baseline
  for (std::size_t k = 0; k < 3 && k < tokens.size(); ++k) {
    fv.add("baseline:w" + std::to_string(k) + "=" + lowercase(tokens[k].text));
  }
  const std::string& first = tokens.front().text;
  fv.add("baseline:shape=" + lead_shape(first));
  fv.add("baseline:len=" + length_bucket(tokens.size()));
  if (is_decimal_number(first)) fv.add("baseline:num=decimal");
  if (is_paren_number(first)) fv.add("baseline:num=paren");
  const std::string first_lower = lowercase(first);
  if (first_lower == "section" || first_lower == "article") fv.add("baseline:num=keyword");
  if (tokens.back().text.back() == ':') fv.add("baseline:ends_colon");
  std::size_t caps = 0;
  bool digit = false;
  for (const auto& t : tokens) {
    if (all_caps_word(t.text)) ++caps;
    digit = digit || std::any_of(t.text.begin(), t.text.end(), is_digit);
  }
  fv.add("baseline:caps=" + ratio_bucket(caps, tokens.size()));
  if (digit) fv.add("baseline:has_digit");
  fv.add("baseline:prev_w0=" +
         (i > 0 ? lowercase(order_[i - 1].line->tokens.front().text) : std::string("<BOS>")));
  fv.add("baseline:next_w0=" + (i + 1 < order_.size()
                                     ? lowercase(order_[i + 1].line->tokens.front().text)
                                     : std::string("<EOS>")));

  if (config_.has(FeatureGroup::page_layout)) {
    const double yc = line.bbox.y_center() / page.height;
    const int dec = std::clamp(static_cast<int>(std::floor(yc * 10.0)), 0, 9);
    fv.add("page_layout:ydec=" + std::to_string(dec));
    if (first_on_page_[ol.ref.page_index] == i) fv.add("page_layout:first_on_page");
    if (last_on_page_[ol.ref.page_index] == i) fv.add("page_layout:last_on_page");
    if (line.bbox.y0 < 0.1 * page.height) fv.add("page_layout:near_top");
    if (page.height - line.bbox.y1 < 0.1 * page.height) fv.add("page_layout:near_bottom");
    if (line.bbox.x0 < config_.margin_fraction * page.width) fv.add("page_layout:left_margin");
  }

  if (config_.has(FeatureGroup::text_placement)) {
    const PageStats& ps = pages_[ol.ref.page_index];
    if (std::abs(0.5 * page.width - line.bbox.x_center()) < 0.05 * page.width) {
      fv.add("text_placement:centered");
    }
    if (line.bbox.x0 - ps.min_x0 < 2.0) fv.add("text_placement:left_aligned");
    if (ps.max_x1 - line.bbox.x1 < 2.0) fv.add("text_placement:right_aligned");
    const int level = std::min(
        6, static_cast<int>(std::floor((line.bbox.x0 - ps.min_x0) / config_.indent_quantum)));
    fv.add("text_placement:indent=" + std::to_string(std::max(0, level)));
  }

  if (config_.has(FeatureGroup::visual_grouping)) {
    const Block& block = page.blocks[ol.ref.block_index];
    fv.add("visual_grouping:block=" + std::string(to_string(block.kind)));
    if (i > 0) {
      const LineRef& prev = order_[i - 1].ref;
      if (prev.page_index == ol.ref.page_index && prev.block_index == ol.ref.block_index) {
        fv.add("visual_grouping:same_block_prev");
      }
    }
    if (ol.ref.line_index == 0) fv.add("visual_grouping:first_of_block");
    if (ol.ref.line_index + 1 == block.lines.size()) fv.add("visual_grouping:last_of_block");
  }

  if (config_.has(FeatureGroup::style)) {
    std::size_t bold = 0, italic = 0, underline = 0;
    double size = 0;
    for (const auto& t : tokens) {
      bold += t.bold;
      italic += t.italic;
      underline += t.underline;
      size += t.font_size;
    }
    fv.add("style:bold=" + ratio_bucket(bold, tokens.size()));
    fv.add("style:italic=" + ratio_bucket(italic, tokens.size()));
    fv.add("style:underline=" + ratio_bucket(underline, tokens.size()));
    const double ratio = size / static_cast<double>(tokens.size()) / body_.body_font_size;
    fv.add(std::string("style:size=") + (ratio > 1.15 ? "larger" : ratio < 0.9 ? "smaller" : "body"));
  }
  fv.finalize();
  return fv;
}

std::vector<FeatureVector> DocumentFeaturizer::all() const {
  std::vector<FeatureVector> out;
  out.reserve(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) out.push_back(line(i));
  return out;
}

FeatureVector line_features(const Document& doc, const LineRef& ref,
                            const FeatureConfig& config, const BodyFontEstimate& body) {
  line_at(doc, ref);
  DocumentFeaturizer f(doc, config, body);
  const auto& lines = f.order().lines();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].ref == ref) return f.line(i);
  }
  throw InvalidRef("line not found in reading order");
}

FeatureVector token_features(const std::vector<TokenView>& tokens, std::size_t i,
                             const FeatureConfig& config) {
  if (i >= tokens.size()) throw InvalidRef("token " + std::to_string(i) + " out of range");
  FeatureVector fv;
  const std::string_view text = tokens[i].text;
  fv.add("tok:lower=" + lowercase(text));
  fv.add("tok:shape=" + token_shape(text));
  if (!text.empty() && std::all_of(text.begin(), text.end(), is_digit)) fv.add("tok:isdigit");
  if (is_upper(text.front()) && std::none_of(text.begin() + 1, text.end(), is_upper)) {
    fv.add("tok:istitle");
  }
  auto neighbor = [&](std::ptrdiff_t off) -> std::string {
    const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + off;
    if (j < 0) return "<BOS>";
    if (j >= static_cast<std::ptrdiff_t>(tokens.size())) return "<EOS>";
    return lowercase(tokens[static_cast<std::size_t>(j)].text);
  };
  fv.add("tok:prev1=" + neighbor(-1));
  fv.add("tok:prev2=" + neighbor(-2));
  fv.add("tok:next1=" + neighbor(1));
  fv.add("tok:next2=" + neighbor(2));
  fv.add("tok:pos=" + position_bucket(i));
  if (config.has(FeatureGroup::style)) {
    if (tokens[i].bold) fv.add("style:tok_bold");
    if (tokens[i].underline) fv.add("style:tok_underline");
  }
  fv.finalize();
  return fv;
}

std::vector<TokenView> token_views(const Section& section) {
  std::vector<TokenView> out;
  out.reserve(section.tokens.size());
  for (const auto& t : section.tokens) out.push_back({t.text, t.bold, t.underline});
  return out;
}

FeatureVector token_features(const Document&, const Section& section, std::size_t token_index,
                             const FeatureConfig& config) {
  return token_features(token_views(section), token_index, config);
}

std::vector<FeatureVector> token_sequence_features(const std::vector<TokenView>& tokens,
                                                   const FeatureConfig& config) {
  std::vector<FeatureVector> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) out.push_back(token_features(tokens, i, config));
  return out;
}

}  // namespace cuesplit
