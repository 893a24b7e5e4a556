#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "clonescope/timestamp.hpp"

namespace clonescope {

using PostId = std::int64_t;
using ThreadId = std::int64_t;

enum class PostType { question, answer, other };

// Markdown bodies come from jsonl records; Posts.xml bodies are HTML.
enum class BodyFormat { markdown, html };

enum class InputFormat { jsonl, se_xml };

struct Post {
  PostId post_id = 0;
  PostType post_type = PostType::other;
  std::optional<PostId> parent_id;
  ThreadId thread_id = 0;
  Timestamp creation_date{};
  std::optional<std::int64_t> author_id;
  std::optional<std::int64_t> score;
  std::string body;
  BodyFormat body_format = BodyFormat::markdown;
};

enum class BlockKind { fenced, indented, html_pre };

struct CodeBlock {
  PostId post_id = 0;
  std::uint32_t block_index = 0;
  std::string raw_content;
  BlockKind kind = BlockKind::fenced;

  bool operator==(const CodeBlock&) const = default;
};

// Byte range [begin, end) of a code region inside a post body, delimiters
// included. Used to keep code out of link extraction.
struct CodeRegion {
  std::size_t begin = 0;
  std::size_t end = 0;
};

class ParseError : public std::runtime_error {
 public:
  // `location` is the 1-based line (jsonl) or row element number (se_xml).
  ParseError(std::size_t location, const std::string& reason);

  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

std::string_view to_string(PostType type);
std::string_view to_string(BlockKind kind);
std::string_view to_string(InputFormat format);
std::optional<InputFormat> parse_input_format(std::string_view name);

// Platform epoch sanity bound for creation dates (2008-01-01T00:00:00Z).
Timestamp platform_epoch();

// Streams posts to `sink` in input order. Throws ParseError on malformed
// records, answers without parent_id and duplicate post ids.
void for_each_post(std::istream& input, InputFormat format,
                   const std::function<void(Post&&)>& sink);

std::vector<Post> parse_posts(std::istream& input, InputFormat format);
std::vector<Post> parse_posts_from_string(std::string_view text, InputFormat format);

// Posts of type `other` yield no blocks. Unterminated fences become a block
// running to end of body; a warning is appended to `warnings` when non-null
// and logged either way.
std::vector<CodeBlock> extract_code_blocks(const Post& post,
                                           std::vector<std::string>* warnings = nullptr);

// Body-level variant used by extract_code_blocks; `regions` (optional)
// receives the byte span of every block found.
std::vector<CodeBlock> extract_code_blocks(std::string_view body, BodyFormat format,
                                           PostId post_id,
                                           std::vector<CodeRegion>* regions = nullptr,
                                           std::vector<std::string>* warnings = nullptr);

// Decodes the five predefined XML/HTML entities plus decimal and hex
// character references. Unknown entities are left verbatim.
std::string unescape_entities(std::string_view text);

}  // namespace clonescope
