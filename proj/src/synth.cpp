#include "cuesplit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cuesplit/errors.hpp"
#include "cuesplit/rng.hpp"
#include "synth_draft.hpp"

namespace cuesplit {

namespace {

using synth::Align;
using synth::Draft;
using synth::Para;
using synth::Role;
using synth::Word;

enum class Source : std::uint8_t { content, header, footer };

struct LineMeta {
  Source source = Source::content;
  int para = -1;
  std::vector<std::size_t> words;  // para word index of each token
};

struct PageBuild {
  Page page;
  std::vector<std::vector<LineMeta>> meta;  // parallel to page.blocks
};

double round2(double v) { return std::round(v * 100.0) / 100.0; }

double char_width(char c) {
  if (c >= 'A' && c <= 'Z') return 0.66;
  if (c == 'm' || c == 'w') return 0.75;
  if (c == 'i' || c == 'l' || c == 'j' || c == 't' || c == 'f') return 0.3;
  if (c >= 'a' && c <= 'z') return 0.5;
  if (c >= '0' && c <= '9') return 0.5;
  return 0.3;
}

double text_width(const std::string& text, double size, bool bold) {
  double w = 0;
  for (char c : text) w += char_width(c);
  return w * size * (bold ? 1.06 : 1.0);
}

std::string hex_id(Rng& rng) {
  static const char* digits = "0123456789ABCDEF";
  std::string out;
  for (int group : {8, 4, 4, 4, 12}) {
    if (!out.empty()) out += '-';
    for (int i = 0; i < group; ++i) out += digits[rng.below(16)];
  }
  return out;
}

struct Style {
  double body = 11;
  double spacing = 1.3;
  double margin = 72;
  int header_variant = 0;
  bool has_header = false;
  std::size_t header_from = 0;
  int footer_variant = 0;
  bool has_footer = false;
  bool footer_prefix = false;
  std::size_t footer_from = 0;
  double footer_scale = 0.85;
};

class Layout {
 public:
  Layout(const GenConfig& config, const Style& style)
      : config_(config), style_(style) {
    top_ = style.margin;
    bottom_ = config.page_height - style.margin;
    new_page();
  }

  void place(const Draft& draft) {
    for (std::size_t p = 0; p < draft.paras.size(); ++p) {
      const Para& para = draft.paras[p];
      if (para.is_table()) {
        place_table(static_cast<int>(p), para);
      } else {
        place_para(static_cast<int>(p), para);
      }
    }
  }

  std::vector<PageBuild>& pages() { return pages_; }

 private:
  double line_height(double size) const { return size * style_.spacing; }

  void new_page() {
    PageBuild pb;
    pb.page.width = config_.page_width;
    pb.page.height = config_.page_height;
    pages_.push_back(std::move(pb));
    cursor_ = top_;
    open_block_ = false;
  }

  bool at_page_top() const { return cursor_ <= top_ + 1e-9; }

  void add_line(Line line, LineMeta meta, BlockKind kind) {
    PageBuild& pb = pages_.back();
    if (!open_block_) {
      pb.page.blocks.push_back(Block{kind, {}});
      pb.meta.emplace_back();
      open_block_ = true;
    }
    pb.page.blocks.back().lines.push_back(std::move(line));
    pb.meta.back().push_back(std::move(meta));
  }

  void ensure_room(double size) {
    if (cursor_ + size > bottom_) new_page();
  }

  void skip(double space) {
    if (!at_page_top()) cursor_ += space;
  }

  Line make_line(const std::vector<const Word*>& words, double size,
                 double x_start, double y) {
    Line line;
    double x = x_start;
    const double gap = 0.25 * size;
    for (const Word* w : words) {
      Token t;
      t.text = w->text;
      t.bold = w->bold;
      t.italic = w->italic;
      t.underline = w->underline;
      t.font_size = size;
      const double width = text_width(w->text, size, w->bold);
      t.bbox = {round2(x), round2(y), round2(x + width), round2(y + size)};
      line.tokens.push_back(std::move(t));
      x += width + gap;
    }
    line.bbox = {line.tokens.front().bbox.x0, round2(y),
                 line.tokens.back().bbox.x1, round2(y + size)};
    return line;
  }

  void emit(int para_index, const Para& para,
            const std::vector<std::size_t>& indices, double size) {
    std::vector<const Word*> words;
    double width = 0;
    for (std::size_t k = 0; k < indices.size(); ++k) {
      const Word& w = para.words[indices[k]];
      words.push_back(&w);
      width += text_width(w.text, size, w.bold) + (k ? 0.25 * size : 0);
    }
    const double left = style_.margin + para.indent;
    const double avail = config_.page_width - style_.margin - left;
    double x = left;
    if (para.align == Align::center) x = left + 0.5 * (avail - width);
    if (para.align == Align::right) x = left + avail - width;
    ensure_room(size);
    LineMeta meta{Source::content, para_index, indices};
    add_line(make_line(words, size, x, cursor_), std::move(meta), para.kind);
    cursor_ += line_height(size);
  }

  void place_para(int para_index, const Para& para) {
    const double size = style_.body * para.font_scale;
    open_block_ = false;
    skip(para.space_before * line_height(size));
    const double avail =
        config_.page_width - 2 * style_.margin - para.indent;
    std::vector<std::size_t> current;
    double width = 0;
    for (std::size_t i = 0; i < para.words.size(); ++i) {
      if (para.break_before && *para.break_before == i) {
        if (!current.empty()) emit(para_index, para, current, size);
        current.clear();
        width = 0;
        new_page();
      }
      const Word& w = para.words[i];
      const double ww = text_width(w.text, size, w.bold);
      const double extra = current.empty() ? ww : width + 0.25 * size + ww;
      if (!current.empty() && extra > avail) {
        emit(para_index, para, current, size);
        current.clear();
        width = ww;
      } else {
        width = extra;
      }
      current.push_back(i);
    }
    if (!current.empty()) emit(para_index, para, current, size);
  }

  void place_table(int para_index, const Para& para) {
    const double size = style_.body * 0.95;
    open_block_ = false;
    skip(para.space_before * line_height(size));
    for (const auto& row : para.rows) {
      ensure_room(size);
      // One line per cell, as OCR reports table rows.
      for (std::size_t c = 0; c < row.size(); ++c) {
        std::vector<const Word*> words;
        for (const Word& w : row[c]) words.push_back(&w);
        if (words.empty()) continue;
        add_line(make_line(words, size, style_.margin + para.columns[c], cursor_),
                 LineMeta{Source::content, para_index, {}}, BlockKind::table);
      }
      cursor_ += line_height(size);
    }
  }

  const GenConfig& config_;
  Style style_;
  std::vector<PageBuild> pages_;
  double top_ = 72;
  double bottom_ = 720;
  double cursor_ = 72;
  bool open_block_ = false;
};

std::vector<Word> words(const std::string& text, bool bold = false) {
  std::vector<Word> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(' ', pos);
    if (end == std::string::npos) end = text.size();
    if (end > pos) out.push_back({text.substr(pos, end - pos), bold});
    pos = end + 1;
  }
  return out;
}

// Header and footer lines are added once the page count is known.
class Furniture {
 public:
  Furniture(const GenConfig& config, const Style& style, const Draft& draft,
            Rng& rng)
      : config_(config), style_(style), draft_(draft) {
    envelope_ = hex_id(rng);
    code_ = draft.company_a.substr(0, 4);
    for (char& c : code_) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    code_ += "-" + std::to_string(rng.between(1000, 9999));
    exhibit_ = "Exhibit " + std::to_string(rng.between(2, 10)) + "." +
               std::to_string(rng.between(1, 30));
    legend_ = rng.pick(std::vector<std::string>{
        "The terms of this Agreement are confidential.",
        "This Agreement contains confidential information of the Parties.",
        "Subject to the confidentiality obligations set forth in this Agreement.",
        "Portions of this Agreement have been omitted and filed separately."});
  }

  void decorate(std::vector<PageBuild>& pages) {
    const std::size_t total = pages.size();
    for (std::size_t i = 0; i < total; ++i) {
      PageBuild& pb = pages[i];
      std::vector<Block> blocks;
      std::vector<std::vector<LineMeta>> meta;
      if (style_.has_header && i >= style_.header_from) {
        add(blocks, meta, header_lines(), Source::header, 30.0);
      }
      for (std::size_t b = 0; b < pb.page.blocks.size(); ++b) {
        blocks.push_back(std::move(pb.page.blocks[b]));
        meta.push_back(std::move(pb.meta[b]));
      }
      if (style_.has_footer && i >= style_.footer_from) {
        add(blocks, meta, footer_lines(i + 1, total), Source::footer,
            config_.page_height - 50.0);
      }
      pb.page.blocks = std::move(blocks);
      pb.meta = std::move(meta);
    }
  }

 private:
  struct Piece {
    std::vector<Word> words;
    Align align = Align::left;
    int row = 0;
  };

  std::vector<Piece> header_lines() const {
    switch (style_.header_variant) {
      case 0:
        return {{words("DocuSign Envelope ID: " + envelope_), Align::left, 0}};
      case 1:
        return {{words(title_case(draft_.title)), Align::right, 0}};
      case 2:
        return {{words("CONFIDENTIAL", true), Align::center, 0}};
      default:
        return {{words(exhibit_), Align::left, 0},
                {words("Execution Version"), Align::right, 0}};
    }
  }

  std::vector<Piece> footer_lines(std::size_t page, std::size_t total) const {
    const std::string n = std::to_string(page);
    std::vector<Piece> out;
    int row = 0;
    if (style_.footer_prefix) {
      out.push_back({words("Confidential Treatment Requested"), Align::left, row++});
    }
    switch (style_.footer_variant) {
      case 0:
        out.push_back({words(n), Align::center, row});
        break;
      case 1:
        out.push_back({words("- " + n + " -"), Align::center, row});
        break;
      case 2:
        out.push_back({words("Page " + n + " of " + std::to_string(total)),
                       Align::center, row});
        break;
      case 3:
        out.push_back({words(code_), Align::left, row});
        out.push_back({words(n), Align::right, row});
        break;
      case 4:
        out.push_back({words(title_case(draft_.company_b) + " Confidential"),
                       Align::left, row});
        out.push_back({words(n), Align::right, row});
        break;
      case 5:
        out.push_back({words(title_case(draft_.company_a) + " " + title_case(draft_.title)),
                       Align::left, row});
        out.push_back({words(n), Align::right, row});
        break;
      case 6:
        out.push_back({words(title_case(draft_.company_a) + " and " +
                             title_case(draft_.company_b) + " Confidential"),
                       Align::center, row});
        break;
      default:
        out.push_back({words(legend_), Align::left, row++});
        out.push_back({words(n), Align::center, row});
        break;
    }
    return out;
  }

  static std::string title_case(const std::string& s) {
    std::string out = s;
    bool start = true;
    for (char& c : out) {
      const auto u = static_cast<unsigned char>(c);
      if (std::isalpha(u)) c = static_cast<char>(start ? std::toupper(u) : std::tolower(u));
      start = c == ' ';
    }
    return out;
  }

  void add(std::vector<Block>& blocks, std::vector<std::vector<LineMeta>>& meta,
           const std::vector<Piece>& pieces, Source source, double y0) const {
    const double size = style_.body * style_.footer_scale;
    const double rows_height =
        size * 1.25 * static_cast<double>(pieces.empty() ? 0 : pieces.back().row);
    Block block{BlockKind::other, {}};
    std::vector<LineMeta> lines;
    for (const Piece& piece : pieces) {
      double width = 0;
      for (std::size_t k = 0; k < piece.words.size(); ++k) {
        width += text_width(piece.words[k].text, size, piece.words[k].bold) +
                 (k ? 0.25 * size : 0);
      }
      const double left = style_.margin;
      const double right = config_.page_width - style_.margin;
      double x = left;
      if (piece.align == Align::center) x = 0.5 * (left + right - width);
      if (piece.align == Align::right) x = right - width;
      // Footers grow upward from the bottom edge, headers downward.
      const double y = source == Source::footer
                           ? y0 - rows_height + size * 1.25 * piece.row
                           : y0 + size * 1.25 * piece.row;
      Line line;
      double cx = x;
      for (const Word& w : piece.words) {
        Token t;
        t.text = w.text;
        t.bold = w.bold;
        t.font_size = size;
        const double ww = text_width(w.text, size, w.bold);
        t.bbox = {round2(cx), round2(y), round2(cx + ww), round2(y + size)};
        line.tokens.push_back(std::move(t));
        cx += ww + 0.25 * size;
      }
      line.bbox = {line.tokens.front().bbox.x0, round2(y),
                   line.tokens.back().bbox.x1, round2(y + size)};
      block.lines.push_back(std::move(line));
      lines.push_back(LineMeta{source, -1, {}});
    }
    blocks.push_back(std::move(block));
    meta.push_back(std::move(lines));
  }

  const GenConfig& config_;
  const Style& style_;
  const Draft& draft_;
  std::string envelope_;
  std::string code_;
  std::string legend_;
  std::string exhibit_;
};

bool ends_sentence(const Line& line) {
  const std::string& last = line.tokens.back().text;
  const char c = last.back();
  return c == '.' || c == ';';
}

void apply_style_noise(Document& doc, Rng& rng, double p) {
  if (p <= 0) return;
  for (auto& page : doc.pages) {
    for (auto& block : page.blocks) {
      for (auto& line : block.lines) {
        for (auto& t : line.tokens) {
          if (rng.chance(p)) t.bold = !t.bold;
          if (rng.chance(p)) t.underline = !t.underline;
        }
      }
    }
  }
}

}  // namespace

void GenConfig::validate() const {
  auto prob = [](const char* name, double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ConfigError(std::string(name) + " must lie in [0,1], got " +
                        std::to_string(v));
    }
  };
  prob("header_prob", header_prob);
  prob("footer_prob", footer_prob);
  prob("broken_span_prob", broken_span_prob);
  prob("style_noise", style_noise);
  if (doc_count < 1) throw ConfigError("doc_count must be at least 1");
  if (mean_words_per_doc < 1) throw ConfigError("mean_words_per_doc must be positive");
  if (!(page_width >= 300) || !(page_height >= 400)) {
    throw ConfigError("page must be at least 300x400 points");
  }
}

const std::optional<TokenSpan>& GoldLabels::entity_span(Attribute a) const {
  return a == Attribute::expiration_date ? expiration_date : governing_law;
}

bool GoldLabels::boolean_value(Attribute a) const {
  return a == Attribute::termination_for_convenience
             ? termination_for_convenience
             : anti_assignment;
}

LabeledDocument generate_document(const GenConfig& config, std::size_t index) {
  Rng rng(derive_seed(config.seed, index));
  const bool broken = rng.chance(config.broken_span_prob);

  Style style;
  style.body = rng.pick(std::vector<double>{10, 10.5, 11, 12});
  style.spacing = rng.uniform(1.15, 1.45);
  style.has_header = rng.chance(config.header_prob);
  style.header_variant = static_cast<int>(rng.below(4));
  style.header_from = rng.chance(0.3) ? 1 : 0;
  style.has_footer = broken || rng.chance(config.footer_prob);
  style.footer_variant = static_cast<int>(rng.below(8));
  style.footer_prefix = rng.chance(0.2);
  style.footer_from = (!broken && rng.chance(0.15)) ? 1 : 0;
  style.footer_scale = rng.pick(std::vector<double>{0.8, 0.9, 1.0});

  synth::DraftParams params;
  params.target_words = static_cast<std::size_t>(
      static_cast<double>(config.mean_words_per_doc) * rng.uniform(0.5, 1.5));
  params.broken_governing_law = broken;
  Rng text_rng(derive_seed(rng.next(), 1));
  Draft draft = synth::write_contract(text_rng, params);

  Layout layout(config, style);
  layout.place(draft);
  std::vector<PageBuild>& pages = layout.pages();
  Furniture furniture(config, style, draft, rng);
  furniture.decorate(pages);

  char id[32];
  std::snprintf(id, sizeof id, "doc_%03zu", index);
  LabeledDocument out;
  out.doc.doc_id = id;
  out.doc.source_name = "synthetic/seed" + std::to_string(config.seed) + "/" + id;
  for (auto& pb : pages) out.doc.pages.push_back(std::move(pb.page));
  apply_style_noise(out.doc, rng, config.style_noise);

  // Gold tags, sections and answers from the layout metadata.
  const ReadingOrder order(out.doc);
  GoldLabels& gold = out.labels;
  gold.doc_id = out.doc.doc_id;
  gold.termination_for_convenience = draft.termination_for_convenience;
  gold.anti_assignment = draft.anti_assignment;
  gold.line_labels.resize(order.size(), SectionTag::O);

  const std::size_t npara = draft.paras.size();
  std::vector<std::ptrdiff_t> last_line_of_group(npara, -1);
  std::vector<std::ptrdiff_t> piece_start(npara, -1);
  std::vector<std::vector<std::size_t>> word_token(npara);
  for (std::size_t p = 0; p < npara; ++p) {
    word_token[p].assign(draft.paras[p].words.size(), 0);
  }
  std::vector<std::size_t> group_first(npara, std::numeric_limits<std::size_t>::max());
  std::vector<std::size_t> group_last(npara, 0);

  std::ptrdiff_t furniture_start = -1;
  Source furniture_source = Source::content;
  auto close_furniture = [&](std::size_t end) {
    if (furniture_start < 0) return;
    gold.sections.push_back({furniture_source == Source::header ? SectionType::header
                                                                : SectionType::footer,
                             static_cast<std::size_t>(furniture_start), end});
    furniture_start = -1;
  };
  auto close_piece = [&](int group) {
    if (group < 0 || piece_start[group] < 0) return;
    const Para* first = nullptr;
    for (const Para& p : draft.paras) {
      if (p.group == group) {
        first = &p;
        break;
      }
    }
    gold.sections.push_back(
        {first->role == Role::clause ? SectionType::clause : SectionType::subclause,
         static_cast<std::size_t>(piece_start[group]),
         static_cast<std::size_t>(last_line_of_group[group])});
    piece_start[group] = -1;
  };

  int open_group = -1;
  std::size_t prev_page = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const LineRef& ref = order[i].ref;
    const LineMeta& lm = pages[ref.page_index].meta[ref.block_index][ref.line_index];
    const bool same_page = i > 0 && ref.page_index == prev_page;
    prev_page = ref.page_index;

    if (lm.source != Source::content) {
      const SectionType type =
          lm.source == Source::header ? SectionType::header : SectionType::footer;
      const bool continues = same_page && furniture_start >= 0 &&
                             furniture_source == lm.source;
      if (!continues) {
        close_furniture(i - 1);
        furniture_start = static_cast<std::ptrdiff_t>(i);
        furniture_source = lm.source;
        gold.line_labels[i] = begin_tag(type);
      } else {
        gold.line_labels[i] = inside_tag(type);
      }
      continue;
    }
    close_furniture(i - 1);

    const Para& para = draft.paras[static_cast<std::size_t>(lm.para)];
    std::size_t tok = order.first_token(i);
    for (std::size_t w : lm.words) word_token[lm.para][w] = tok++;
    if (para.role == Role::other || para.group < 0) {
      close_piece(open_group);
      open_group = -1;
      continue;
    }
    const int g = para.group;
    const SectionType type =
        para.role == Role::clause ? SectionType::clause : SectionType::subclause;
    group_first[g] = std::min(group_first[g], i);
    group_last[g] = std::max(group_last[g], i);

    bool begin = true;
    if (open_group == g && last_line_of_group[g] >= 0) {
      const auto prev = static_cast<std::size_t>(last_line_of_group[g]);
      if (prev + 1 == i) {
        begin = false;
      } else {
        begin = ends_sentence(*order[prev].line);
      }
    }
    if (begin) {
      close_piece(open_group);
      piece_start[g] = static_cast<std::ptrdiff_t>(i);
    }
    open_group = g;
    last_line_of_group[g] = static_cast<std::ptrdiff_t>(i);
    gold.line_labels[i] = begin ? begin_tag(type) : inside_tag(type);
  }
  close_furniture(order.size() - 1);
  close_piece(open_group);
  std::sort(gold.sections.begin(), gold.sections.end(),
            [](const SectionSpan& a, const SectionSpan& b) {
              return a.first_line < b.first_line;
            });

  for (const Para& para : draft.paras) {
    if (!para.answer) continue;
    const auto& wt = word_token[static_cast<std::size_t>(&para - draft.paras.data())];
    const TokenSpan span{wt[para.answer->first_word], wt[para.answer->last_word]};
    if (para.answer->attribute == Attribute::expiration_date) {
      gold.expiration_date = span;
    } else {
      gold.governing_law = span;
    }
  }
  for (Attribute a : kAttributes) {
    const auto& groups = draft.evidence_groups[index_of(a)];
    std::size_t lo = std::numeric_limits<std::size_t>::max();
    std::size_t hi = 0;
    for (int g : groups) {
      if (group_first[g] == std::numeric_limits<std::size_t>::max()) continue;
      lo = std::min(lo, group_first[g]);
      hi = std::max(hi, group_last[g]);
    }
    if (lo <= hi) gold.evidence[index_of(a)] = LineSpan{lo, hi};
  }
  return out;
}

Corpus generate_corpus(const GenConfig& config) {
  config.validate();
  Corpus corpus;
  corpus.reserve(config.doc_count);
  for (std::size_t i = 0; i < config.doc_count; ++i) {
    corpus.push_back(generate_document(config, i));
  }
  return corpus;
}

std::string gold_span_text(const Document& doc, const GoldLabels& labels,
                           const TokenSpan& span) {
  const ReadingOrder order(doc);
  std::string out;
  for (std::size_t t = span.first_token; t <= span.last_token; ++t) {
    const std::size_t line = order.line_of_token(t);
    const auto type = tag_type(labels.line_labels[line]);
    if (type && !is_content(*type)) continue;
    if (!out.empty()) out += ' ';
    out += order[line].line->tokens[t - order.first_token(line)].text;
  }
  return out;
}

}  // namespace cuesplit
