#pragma once

// Hand-written pattern rules: case-insensitive regular expressions that
// either decide a yes/no attribute or capture an entity answer.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cuesplit/attributes.hpp"
#include "cuesplit/document.hpp"
#include "cuesplit/extractors.hpp"
#include "cuesplit/sections.hpp"

namespace cuesplit {

enum class RuleScope : std::uint8_t { document, clauses };

std::string_view to_string(RuleScope scope);

struct Rule {
  std::string rule_id;
  Attribute attribute = Attribute::governing_law;
  std::string pattern;
  std::optional<bool> answer;  // boolean effect; absent for capture rules
  RuleScope scope = RuleScope::document;

  bool matches(std::string_view text) const;
  // Text of capture group 1 of the first match.
  std::optional<std::string> capture(std::string_view text) const;

  std::shared_ptr<const void> compiled;  // boost::regex, type-erased
};

class RuleSet {
 public:
  const std::vector<Rule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  // Throws DuplicateId.
  void add(Rule rule);

 private:
  std::vector<Rule> rules_;
};

// Compiles a rule; throws RuleSyntaxError (line/column as given) for a bad
// pattern or an entity rule without exactly one capture group.
Rule compile_rule(std::string rule_id, Attribute attribute, std::string pattern,
                  std::optional<bool> answer, RuleScope scope, std::size_t line = 1);

// JSONL, one rule per line; blank lines are skipped.
RuleSet parse_rules(std::string_view text);
RuleSet load_rules(const std::filesystem::path& path);

struct RuleOptions {
  // Yes when any matching rule says yes, instead of first match wins.
  bool any_match = false;
};

// Reading-order text of all lines joined by single spaces.
std::string document_text(const Document& doc);

// Document-scope rules read the whole text; clause-scope rules read each
// clause/sub-clause clean_text in order. Unmatched boolean attributes answer
// No with confidence 0.5; unmatched entities have no span.
AttributePrediction apply_rules(const RuleSet& rules, const Document& doc,
                                const std::vector<Section>& sections, Attribute attribute,
                                const RuleOptions& options = {});

}  // namespace cuesplit
