#include "cuesplit/document.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "cuesplit/errors.hpp"

namespace cuesplit {

using nlohmann::json;

namespace {

constexpr double kTokenTolerance = 1.0;

std::string index_path(const std::string& base, const char* field,
                       std::size_t i) {
  return base + (base.empty() ? "" : ".") + field + "[" + std::to_string(i) +
         "]";
}

std::string field_path(const std::string& base, const char* field) {
  return base.empty() ? std::string(field) : base + "." + field;
}

const json& require(const json& obj, const std::string& path,
                    const char* field) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw SchemaError(field_path(path, field), "missing field");
  }
  return *it;
}

std::string get_string(const json& obj, const std::string& path,
                       const char* field) {
  const json& v = require(obj, path, field);
  if (!v.is_string()) {
    throw SchemaError(field_path(path, field), "expected a string");
  }
  return v.get<std::string>();
}

double get_number(const json& obj, const std::string& path, const char* field) {
  const json& v = require(obj, path, field);
  if (!v.is_number()) {
    throw SchemaError(field_path(path, field), "expected a number");
  }
  return v.get<double>();
}

bool get_bool(const json& obj, const std::string& path, const char* field) {
  const json& v = require(obj, path, field);
  if (!v.is_boolean()) {
    throw SchemaError(field_path(path, field), "expected a boolean");
  }
  return v.get<bool>();
}

const json& get_array(const json& obj, const std::string& path,
                      const char* field) {
  const json& v = require(obj, path, field);
  if (!v.is_array()) {
    throw SchemaError(field_path(path, field), "expected an array");
  }
  return v;
}

BBox get_bbox(const json& obj, const std::string& path) {
  const json& v = get_array(obj, path, "bbox");
  const std::string p = field_path(path, "bbox");
  if (v.size() != 4) throw SchemaError(p, "expected [x0,y0,x1,y1]");
  for (const auto& c : v) {
    if (!c.is_number()) throw SchemaError(p, "coordinates must be numbers");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>(),
          v[3].get<double>()};
}

json bbox_json(const BBox& b) { return json::array({b.x0, b.y0, b.x1, b.y1}); }

void check_box(const BBox& b, double width, double height,
               const std::string& path) {
  if (!(b.x0 < b.x1) || !(b.y0 < b.y1)) {
    throw GeometryError(path, "degenerate box");
  }
  if (b.x0 < 0 || b.y0 < 0 || b.x1 > width || b.y1 > height) {
    throw GeometryError(path, "box outside page");
  }
}

bool has_space(std::string_view text) {
  return std::any_of(text.begin(), text.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
           c == '\f';
  });
}

}  // namespace

std::string_view to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::paragraph: return "paragraph";
    case BlockKind::list: return "list";
    case BlockKind::table: return "table";
    case BlockKind::other: return "other";
  }
  return "other";
}

BlockKind block_kind_from_string(std::string_view name) {
  if (name == "paragraph") return BlockKind::paragraph;
  if (name == "list") return BlockKind::list;
  if (name == "table") return BlockKind::table;
  if (name == "other") return BlockKind::other;
  throw SchemaError("kind", "unknown block kind '" + std::string(name) + "'");
}

void validate_document(const Document& doc) {
  if (doc.pages.empty()) throw EmptyError("pages", "document has no pages");
  for (std::size_t p = 0; p < doc.pages.size(); ++p) {
    const Page& page = doc.pages[p];
    const std::string pp = index_path("", "pages", p);
    if (!(page.width > 0) || !(page.height > 0)) {
      throw GeometryError(pp, "page size must be positive");
    }
    for (std::size_t b = 0; b < page.blocks.size(); ++b) {
      const Block& block = page.blocks[b];
      const std::string bp = index_path(pp, "blocks", b);
      if (block.lines.empty()) throw EmptyError(bp + ".lines", "block has no lines");
      for (std::size_t l = 0; l < block.lines.size(); ++l) {
        const Line& line = block.lines[l];
        const std::string lp = index_path(bp, "lines", l);
        check_box(line.bbox, page.width, page.height, lp + ".bbox");
        if (line.tokens.empty()) throw EmptyError(lp + ".tokens", "line has no tokens");
        for (std::size_t t = 0; t < line.tokens.size(); ++t) {
          const Token& tok = line.tokens[t];
          const std::string tp = index_path(lp, "tokens", t);
          if (tok.text.empty()) throw EmptyError(tp + ".text", "empty token text");
          if (has_space(tok.text)) {
            throw SchemaError(tp + ".text", "token text contains whitespace");
          }
          if (!(tok.font_size > 0)) {
            throw SchemaError(tp + ".font_size", "font size must be positive");
          }
          check_box(tok.bbox, page.width, page.height, tp + ".bbox");
          const BBox& lb = line.bbox;
          if (tok.bbox.x0 < lb.x0 - kTokenTolerance ||
              tok.bbox.y0 < lb.y0 - kTokenTolerance ||
              tok.bbox.x1 > lb.x1 + kTokenTolerance ||
              tok.bbox.y1 > lb.y1 + kTokenTolerance) {
            throw GeometryError(tp + ".bbox", "token box outside its line box");
          }
        }
      }
    }
  }
}

Document parse_document(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
  Document doc;
  doc.doc_id = get_string(root, "", "doc_id");
  doc.source_name = get_string(root, "", "source_name");
  const json& pages = get_array(root, "", "pages");
  doc.pages.reserve(pages.size());
  for (std::size_t p = 0; p < pages.size(); ++p) {
    const std::string pp = index_path("", "pages", p);
    const json& jp = pages[p];
    Page page;
    page.width = get_number(jp, pp, "width");
    page.height = get_number(jp, pp, "height");
    const json& blocks = get_array(jp, pp, "blocks");
    page.blocks.reserve(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const std::string bp = index_path(pp, "blocks", b);
      const json& jb = blocks[b];
      Block block;
      try {
        block.kind = block_kind_from_string(get_string(jb, bp, "kind"));
      } catch (const SchemaError& e) {
        if (e.path() != "kind") throw;
        throw SchemaError(bp + ".kind", "unknown block kind");
      }
      const json& lines = get_array(jb, bp, "lines");
      block.lines.reserve(lines.size());
      for (std::size_t l = 0; l < lines.size(); ++l) {
        const std::string lp = index_path(bp, "lines", l);
        const json& jl = lines[l];
        Line line;
        line.bbox = get_bbox(jl, lp);
        const json& tokens = get_array(jl, lp, "tokens");
        line.tokens.reserve(tokens.size());
        for (std::size_t t = 0; t < tokens.size(); ++t) {
          const std::string tp = index_path(lp, "tokens", t);
          const json& jt = tokens[t];
          Token tok;
          tok.text = get_string(jt, tp, "text");
          tok.bbox = get_bbox(jt, tp);
          tok.bold = get_bool(jt, tp, "bold");
          tok.italic = get_bool(jt, tp, "italic");
          tok.underline = get_bool(jt, tp, "underline");
          tok.font_size = get_number(jt, tp, "font_size");
          line.tokens.push_back(std::move(tok));
        }
        block.lines.push_back(std::move(line));
      }
      page.blocks.push_back(std::move(block));
    }
    doc.pages.push_back(std::move(page));
  }
  validate_document(doc);
  return doc;
}

std::string serialize_document(const Document& doc) {
  json pages = json::array();
  for (const Page& page : doc.pages) {
    json blocks = json::array();
    for (const Block& block : page.blocks) {
      json lines = json::array();
      for (const Line& line : block.lines) {
        json tokens = json::array();
        for (const Token& t : line.tokens) {
          tokens.push_back({{"text", t.text},
                            {"bbox", bbox_json(t.bbox)},
                            {"bold", t.bold},
                            {"italic", t.italic},
                            {"underline", t.underline},
                            {"font_size", t.font_size}});
        }
        lines.push_back({{"bbox", bbox_json(line.bbox)}, {"tokens", std::move(tokens)}});
      }
      blocks.push_back({{"kind", std::string(to_string(block.kind))},
                        {"lines", std::move(lines)}});
    }
    pages.push_back({{"width", page.width},
                     {"height", page.height},
                     {"blocks", std::move(blocks)}});
  }
  json root = {{"doc_id", doc.doc_id},
               {"source_name", doc.source_name},
               {"pages", std::move(pages)}};
  return root.dump();
}

std::vector<OrderedLine> lines_in_reading_order(const Document& doc) {
  std::vector<OrderedLine> out;
  for (std::uint32_t p = 0; p < doc.pages.size(); ++p) {
    const std::size_t page_start = out.size();
    const Page& page = doc.pages[p];
    for (std::uint32_t b = 0; b < page.blocks.size(); ++b) {
      for (std::uint32_t l = 0; l < page.blocks[b].lines.size(); ++l) {
        out.push_back({{p, b, l}, &page.blocks[b].lines[l]});
      }
    }
    std::stable_sort(out.begin() + static_cast<std::ptrdiff_t>(page_start),
                     out.end(), [](const OrderedLine& a, const OrderedLine& b) {
                       if (a.line->bbox.y0 != b.line->bbox.y0) {
                         return a.line->bbox.y0 < b.line->bbox.y0;
                       }
                       return a.line->bbox.x0 < b.line->bbox.x0;
                     });
  }
  return out;
}

std::string line_text(const Line& line) {
  std::string out;
  for (const Token& t : line.tokens) {
    if (!out.empty()) out += ' ';
    out += t.text;
  }
  return out;
}

const Line& line_at(const Document& doc, const LineRef& ref) {
  if (ref.page_index >= doc.pages.size()) throw InvalidRef("page index out of range");
  const Page& page = doc.pages[ref.page_index];
  if (ref.block_index >= page.blocks.size()) throw InvalidRef("block index out of range");
  const Block& block = page.blocks[ref.block_index];
  if (ref.line_index >= block.lines.size()) throw InvalidRef("line index out of range");
  return block.lines[ref.line_index];
}

std::size_t line_count(const Document& doc) {
  std::size_t n = 0;
  for (const Page& p : doc.pages) {
    for (const Block& b : p.blocks) n += b.lines.size();
  }
  return n;
}

std::size_t token_count(const Document& doc) {
  std::size_t n = 0;
  for (const Page& p : doc.pages) {
    for (const Block& b : p.blocks) {
      for (const Line& l : b.lines) n += l.tokens.size();
    }
  }
  return n;
}

ReadingOrder::ReadingOrder(const Document& doc)
    : lines_(lines_in_reading_order(doc)) {
  token_offsets_.reserve(lines_.size() + 1);
  token_offsets_.push_back(0);
  for (const OrderedLine& ol : lines_) {
    token_offsets_.push_back(token_offsets_.back() + ol.line->tokens.size());
  }
}

std::size_t ReadingOrder::line_of_token(std::size_t token) const {
  if (token >= total_tokens()) throw InvalidRef("token index out of range");
  auto it = std::upper_bound(token_offsets_.begin(), token_offsets_.end(), token);
  return static_cast<std::size_t>(it - token_offsets_.begin()) - 1;
}

}  // namespace cuesplit
