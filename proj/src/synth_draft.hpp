#pragma once

// Internal model of a generated contract before page layout.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cuesplit/attributes.hpp"
#include "cuesplit/document.hpp"
#include "cuesplit/rng.hpp"

namespace cuesplit::synth {

enum class Role { other, clause, subclause };
enum class Align { left, center, right };

struct Word {
  std::string text;
  bool bold = false;
  bool italic = false;
  bool underline = false;
};

struct Answer {
  Attribute attribute = Attribute::governing_law;
  std::size_t first_word = 0;
  std::size_t last_word = 0;
};

struct Para {
  Role role = Role::other;
  int group = -1;  // section group shared by every para of one section
  std::vector<Word> words;
  double indent = 0;
  BlockKind kind = BlockKind::paragraph;
  Align align = Align::left;
  double font_scale = 1.0;
  double space_before = 0.6;  // in line heights
  std::optional<Answer> answer;
  std::optional<std::size_t> break_before;  // forced page break before word
  // Table paragraphs: rows of cells, one cell per column offset.
  std::vector<std::vector<std::vector<Word>>> rows;
  std::vector<double> columns;

  bool is_table() const { return !rows.empty(); }
};

struct DraftParams {
  std::size_t target_words = 9594;
  bool broken_governing_law = false;
};

struct Draft {
  std::vector<Para> paras;
  std::array<std::vector<int>, 4> evidence_groups;
  bool termination_for_convenience = false;
  bool anti_assignment = false;
  std::string title;
  std::string company_a;
  std::string company_b;
  std::size_t word_count = 0;
};

Draft write_contract(Rng& rng, const DraftParams& params);

}  // namespace cuesplit::synth
