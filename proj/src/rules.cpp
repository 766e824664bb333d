#include "cuesplit/rules.hpp"

#include <boost/regex.hpp>
#include <json.hpp>

#include "cuesplit/errors.hpp"
#include "cuesplit/synth.hpp"

namespace cuesplit {

using nlohmann::json;

namespace {

const boost::regex& regex_of(const Rule& rule) {
  return *static_cast<const boost::regex*>(rule.compiled.get());
}

// 1-based column of a byte offset in a single line.
std::size_t column_of(std::size_t offset) { return offset + 1; }

}  // namespace

std::string_view to_string(RuleScope scope) {
  return scope == RuleScope::document ? "document" : "clauses";
}

bool Rule::matches(std::string_view text) const {
  return boost::regex_search(text.begin(), text.end(), regex_of(*this));
}

std::optional<std::string> Rule::capture(std::string_view text) const {
  boost::match_results<std::string_view::const_iterator> m;
  if (!boost::regex_search(text.begin(), text.end(), m, regex_of(*this))) return std::nullopt;
  if (m.size() < 2 || !m[1].matched) return std::nullopt;
  return std::string(m[1].first, m[1].second);
}

void RuleSet::add(Rule rule) {
  for (const auto& r : rules_) {
    if (r.rule_id == rule.rule_id) throw DuplicateId("rule_id '" + rule.rule_id + "' appears twice");
  }
  rules_.push_back(std::move(rule));
}

Rule compile_rule(std::string rule_id, Attribute attribute, std::string pattern,
                  std::optional<bool> answer, RuleScope scope, std::size_t line) {
  Rule r;
  r.rule_id = std::move(rule_id);
  r.attribute = attribute;
  r.pattern = std::move(pattern);
  r.answer = answer;
  r.scope = scope;
  std::shared_ptr<boost::regex> re;
  try {
    re = std::make_shared<boost::regex>(r.pattern, boost::regex::perl | boost::regex::icase);
  } catch (const boost::regex_error& e) {
    throw RuleSyntaxError(line, column_of(static_cast<std::size_t>(std::max<std::ptrdiff_t>(e.position(), 0))),
                          "pattern of rule '" + r.rule_id + "': " + e.what());
  }
  const bool entity = kind_of(attribute) == AttributeKind::entity;
  if (entity && re->mark_count() != 1) {
    throw RuleSyntaxError(line, 1, "entity rule '" + r.rule_id + "' needs exactly one capture group");
  }
  if (entity == answer.has_value()) {
    throw RuleSyntaxError(line, 1,
                          "rule '" + r.rule_id + "': entity rules capture, boolean rules answer");
  }
  r.compiled = std::move(re);
  return r;
}

RuleSet parse_rules(std::string_view text) {
  RuleSet set;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw RuleSyntaxError(line_no, e.byte, "invalid JSON");
    }
    auto need = [&](const char* key) -> const json& {
      if (!j.is_object() || !j.contains(key)) {
        throw RuleSyntaxError(line_no, 1, std::string("missing '") + key + "'");
      }
      return j[key];
    };
    const json& id = need("rule_id");
    const json& attr = need("attribute");
    const json& pattern = need("pattern");
    const json& effect = need("effect");
    if (!id.is_string() || !attr.is_string() || !pattern.is_string() || !effect.is_object()) {
      throw RuleSyntaxError(line_no, 1, "rule fields have the wrong types");
    }
    Attribute attribute;
    try {
      attribute = attribute_from_string(attr.get<std::string>());
    } catch (const FormatError& e) {
      throw RuleSyntaxError(line_no, 1, e.what());
    }
    std::optional<bool> answer;
    if (effect.contains("answer")) {
      if (!effect["answer"].is_boolean()) throw RuleSyntaxError(line_no, 1, "effect.answer must be a boolean");
      answer = effect["answer"].get<bool>();
    } else if (!effect.contains("capture") || effect["capture"] != 1) {
      throw RuleSyntaxError(line_no, 1, "effect must be {\"answer\": bool} or {\"capture\": 1}");
    }
    RuleScope scope = RuleScope::document;
    if (j.contains("scope")) {
      const std::string s = j["scope"].is_string() ? j["scope"].get<std::string>() : "";
      if (s == "clauses") {
        scope = RuleScope::clauses;
      } else if (s != "document") {
        throw RuleSyntaxError(line_no, 1, "scope must be 'document' or 'clauses'");
      }
    }
    set.add(compile_rule(id.get<std::string>(), attribute, pattern.get<std::string>(), answer,
                         scope, line_no));
    if (end == text.size()) break;
  }
  return set;
}

RuleSet load_rules(const std::filesystem::path& path) { return parse_rules(read_file(path)); }

std::string document_text(const Document& doc) {
  std::string out;
  for (const auto& ol : lines_in_reading_order(doc)) {
    for (const auto& t : ol.line->tokens) {
      if (!out.empty()) out += ' ';
      out += t.text;
    }
  }
  return out;
}

AttributePrediction apply_rules(const RuleSet& rules, const Document& doc,
                                const std::vector<Section>& sections, Attribute attribute,
                                const RuleOptions& options) {
  AttributePrediction pred;
  pred.attribute = attribute;
  const bool entity = kind_of(attribute) == AttributeKind::entity;
  std::optional<std::string> doc_text;

  // Each candidate text in scope order.
  auto scan = [&](const Rule& rule, auto&& visit) {
    if (rule.scope == RuleScope::document) {
      if (!doc_text) doc_text = document_text(doc);
      return visit(*doc_text);
    }
    for (const auto& s : sections) {
      if (is_content(s.type) && visit(s.clean_text)) return true;
    }
    return false;
  };

  for (const Rule& rule : rules.rules()) {
    if (rule.attribute != attribute) continue;
    if (entity) {
      std::optional<std::string> captured;
      scan(rule, [&](const std::string& text) {
        captured = rule.capture(text);
        return captured.has_value();
      });
      if (captured) {
        PredictedSpan span;
        span.section = static_cast<std::size_t>(-1);
        span.text = *captured;
        pred.span = std::move(span);
        pred.confidence = 1.0;
        return pred;
      }
      continue;
    }
    if (!scan(rule, [&](const std::string& text) { return rule.matches(text); })) continue;
    if (!options.any_match || *rule.answer) {
      pred.answer = *rule.answer;
      pred.confidence = 1.0;
      return pred;
    }
    if (!pred.answer) {
      pred.answer = false;
      pred.confidence = 1.0;
    }
  }
  if (entity) {
    pred.no_relevant_section = true;
  } else if (!pred.answer) {
    pred.answer = false;
    pred.confidence = 0.5;
  }
  return pred;
}

}  // namespace cuesplit
