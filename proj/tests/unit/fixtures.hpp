#pragma once

#include <string>

#include "cuesplit/synth.hpp"

namespace fixtures {

// Small seeded corpus shared by the tests in one process.
inline const cuesplit::Corpus& corpus(std::size_t docs = 40, std::uint64_t seed = 7) {
  static cuesplit::Corpus cached;
  static std::size_t cached_docs = 0;
  static std::uint64_t cached_seed = 0;
  if (cached_docs != docs || cached_seed != seed) {
    cuesplit::GenConfig c;
    c.seed = seed;
    c.doc_count = docs;
    cached = cuesplit::generate_corpus(c);
    cached_docs = docs;
    cached_seed = seed;
  }
  return cached;
}

inline cuesplit::Token token(std::string text, double x0, double y0, double size = 10,
                             bool bold = false) {
  cuesplit::Token t;
  t.text = std::move(text);
  t.bbox = {x0, y0, x0 + 5.0 * static_cast<double>(t.text.size()), y0 + size};
  t.font_size = size;
  t.bold = bold;
  return t;
}

inline cuesplit::Line line_of(std::vector<cuesplit::Token> tokens) {
  cuesplit::Line l;
  l.bbox = tokens.front().bbox;
  for (const auto& t : tokens) {
    l.bbox.x0 = std::min(l.bbox.x0, t.bbox.x0);
    l.bbox.y0 = std::min(l.bbox.y0, t.bbox.y0);
    l.bbox.x1 = std::max(l.bbox.x1, t.bbox.x1);
    l.bbox.y1 = std::max(l.bbox.y1, t.bbox.y1);
  }
  l.tokens = std::move(tokens);
  return l;
}

}  // namespace fixtures
