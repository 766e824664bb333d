#pragma once

// Section vocabulary shared by the corpus generator, the splitter and the
// evaluation harness.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cuesplit/document.hpp"

namespace cuesplit {

enum class SectionType : std::uint8_t { clause, subclause, header, footer };

inline constexpr std::array<SectionType, 4> kSectionTypes = {
    SectionType::clause, SectionType::subclause, SectionType::header,
    SectionType::footer};

std::string_view to_string(SectionType type);
SectionType section_type_from_string(std::string_view name);  // throws FormatError

// BIO tags over lines. The enumerator order is the label order of the
// splitter's CRF.
enum class SectionTag : std::uint8_t {
  O,
  B_clause,
  I_clause,
  B_subclause,
  I_subclause,
  B_header,
  I_header,
  B_footer,
  I_footer,
};

inline constexpr std::size_t kSectionTagCount = 9;

std::string_view to_string(SectionTag tag);
SectionTag section_tag_from_string(std::string_view name);  // throws FormatError
std::vector<std::string> section_tag_names();

std::optional<SectionType> tag_type(SectionTag tag);
bool is_begin(SectionTag tag);
bool is_inside(SectionTag tag);
SectionTag begin_tag(SectionType type);
SectionTag inside_tag(SectionType type);
bool is_content(SectionType type);  // clause or subclause

// Evaluation identity of a section: type plus reading-order line range.
struct SectionSpan {
  SectionType type = SectionType::clause;
  std::size_t first_line = 0;
  std::size_t last_line = 0;
  bool operator==(const SectionSpan&) const = default;
  auto operator<=>(const SectionSpan&) const = default;
};

struct TokenOrigin {
  LineRef line;
  std::size_t token_index = 0;   // within the line
  std::size_t reading_line = 0;  // reading-order line index
  std::size_t doc_token = 0;     // reading-order document token index
};

struct SectionToken {
  std::string text;
  bool bold = false;
  bool italic = false;
  bool underline = false;
  TokenOrigin origin;
};

struct Section {
  SectionType type = SectionType::clause;
  std::vector<LineRef> line_refs;
  std::vector<std::size_t> reading_lines;
  std::string clean_text;
  // One entry per clean-text token; doubles as the token provenance map.
  std::vector<SectionToken> tokens;

  std::size_t first_line() const { return reading_lines.front(); }
  std::size_t last_line() const { return reading_lines.back(); }
  SectionSpan span() const { return {type, first_line(), last_line()}; }
};

}  // namespace cuesplit
