#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace cuesplit {

enum class Attribute : std::uint8_t {
  expiration_date,
  governing_law,
  termination_for_convenience,
  anti_assignment,
};

enum class AttributeKind : std::uint8_t { entity, boolean };

inline constexpr std::array<Attribute, 4> kAttributes = {
    Attribute::expiration_date, Attribute::governing_law,
    Attribute::termination_for_convenience, Attribute::anti_assignment};

inline constexpr AttributeKind kind_of(Attribute a) {
  return (a == Attribute::expiration_date || a == Attribute::governing_law)
             ? AttributeKind::entity
             : AttributeKind::boolean;
}

inline constexpr std::size_t index_of(Attribute a) {
  return static_cast<std::size_t>(a);
}

std::string_view to_string(Attribute a);
Attribute attribute_from_string(std::string_view name);  // throws FormatError

}  // namespace cuesplit
