#include "cuesplit/sections.hpp"

#include "cuesplit/attributes.hpp"
#include "cuesplit/errors.hpp"

namespace cuesplit {

namespace {

constexpr std::array<std::string_view, kSectionTagCount> kTagNames = {
    "O",         "B-clause", "I-clause", "B-subclause", "I-subclause",
    "B-header",  "I-header", "B-footer", "I-footer"};

constexpr std::array<std::string_view, 4> kAttributeNames = {
    "expiration_date", "governing_law", "termination_for_convenience",
    "anti_assignment"};

}  // namespace

std::string_view to_string(SectionType type) {
  switch (type) {
    case SectionType::clause: return "clause";
    case SectionType::subclause: return "subclause";
    case SectionType::header: return "header";
    case SectionType::footer: return "footer";
  }
  return "clause";
}

SectionType section_type_from_string(std::string_view name) {
  for (SectionType t : kSectionTypes) {
    if (to_string(t) == name) return t;
  }
  throw FormatError("unknown section type '" + std::string(name) + "'");
}

std::string_view to_string(SectionTag tag) {
  return kTagNames[static_cast<std::size_t>(tag)];
}

SectionTag section_tag_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kTagNames.size(); ++i) {
    if (kTagNames[i] == name) return static_cast<SectionTag>(i);
  }
  throw FormatError("unknown section tag '" + std::string(name) + "'");
}

std::vector<std::string> section_tag_names() {
  return {kTagNames.begin(), kTagNames.end()};
}

std::optional<SectionType> tag_type(SectionTag tag) {
  if (tag == SectionTag::O) return std::nullopt;
  return static_cast<SectionType>((static_cast<int>(tag) - 1) / 2);
}

bool is_begin(SectionTag tag) {
  return tag != SectionTag::O && (static_cast<int>(tag) % 2) == 1;
}

bool is_inside(SectionTag tag) {
  return tag != SectionTag::O && (static_cast<int>(tag) % 2) == 0;
}

SectionTag begin_tag(SectionType type) {
  return static_cast<SectionTag>(1 + 2 * static_cast<int>(type));
}

SectionTag inside_tag(SectionType type) {
  return static_cast<SectionTag>(2 + 2 * static_cast<int>(type));
}

bool is_content(SectionType type) {
  return type == SectionType::clause || type == SectionType::subclause;
}

std::string_view to_string(Attribute a) { return kAttributeNames[index_of(a)]; }

Attribute attribute_from_string(std::string_view name) {
  for (Attribute a : kAttributes) {
    if (to_string(a) == name) return a;
  }
  throw FormatError("unknown attribute '" + std::string(name) + "'");
}

}  // namespace cuesplit
