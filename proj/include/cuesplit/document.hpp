#pragma once

// OCR document model: pages of visually grouped blocks, lines and styled
// tokens, plus the JSON interchange format used across the toolkit.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cuesplit {

// Axis-aligned rectangle in points, top-left origin, y grows downward.
struct BBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double x_center() const { return 0.5 * (x0 + x1); }
  double y_center() const { return 0.5 * (y0 + y1); }
  bool operator==(const BBox&) const = default;
};

enum class BlockKind { paragraph, list, table, other };

std::string_view to_string(BlockKind kind);
BlockKind block_kind_from_string(std::string_view name);  // throws SchemaError

struct Token {
  std::string text;
  BBox bbox;
  bool bold = false;
  bool italic = false;
  bool underline = false;
  double font_size = 0;
  bool operator==(const Token&) const = default;
};

struct Line {
  BBox bbox;
  std::vector<Token> tokens;
  bool operator==(const Line&) const = default;
};

struct Block {
  BlockKind kind = BlockKind::paragraph;
  std::vector<Line> lines;
  bool operator==(const Block&) const = default;
};

struct Page {
  double width = 0;
  double height = 0;
  std::vector<Block> blocks;
  bool operator==(const Page&) const = default;
};

struct Document {
  std::string doc_id;
  std::string source_name;
  std::vector<Page> pages;
  bool operator==(const Document&) const = default;
};

struct LineRef {
  std::uint32_t page_index = 0;
  std::uint32_t block_index = 0;
  std::uint32_t line_index = 0;
  bool operator==(const LineRef&) const = default;
};

struct OrderedLine {
  LineRef ref;
  const Line* line = nullptr;
};

// Throws SchemaError, GeometryError or EmptyError naming the offending path.
Document parse_document(std::string_view json_text);
std::string serialize_document(const Document& doc);

// Checks every type invariant; violations throw, nothing is repaired.
void validate_document(const Document& doc);

// Page-major, then ascending y0, then ascending x0, then input order.
std::vector<OrderedLine> lines_in_reading_order(const Document& doc);

std::string line_text(const Line& line);

const Line& line_at(const Document& doc, const LineRef& ref);  // throws InvalidRef
std::size_t line_count(const Document& doc);
std::size_t token_count(const Document& doc);

// Reading-order view of a document: lines and a running token offset per
// line, so document-level token indices can be mapped back to lines.
class ReadingOrder {
 public:
  explicit ReadingOrder(const Document& doc);

  std::size_t size() const { return lines_.size(); }
  const OrderedLine& operator[](std::size_t i) const { return lines_[i]; }
  const std::vector<OrderedLine>& lines() const { return lines_; }

  // Document token index of the first token of reading line `i`.
  std::size_t first_token(std::size_t i) const { return token_offsets_[i]; }
  std::size_t total_tokens() const { return token_offsets_.back(); }
  // Reading line containing document token `token`.
  std::size_t line_of_token(std::size_t token) const;

 private:
  std::vector<OrderedLine> lines_;
  std::vector<std::size_t> token_offsets_;
};

}  // namespace cuesplit
