#include "clonescope/corpus.hpp"

#include <array>
#include <charconv>
#include <exception>
#include <istream>
#include <sstream>
#include <unordered_map>

#include <expat.h>
#include <nlohmann/json.hpp>

#include "clonescope/log.hpp"

namespace clonescope {

using nlohmann::json;

ParseError::ParseError(std::size_t location, const std::string& reason)
    : std::runtime_error("record " + std::to_string(location) + ": " + reason),
      location_(location) {}

std::string_view to_string(PostType type) {
  switch (type) {
    case PostType::question: return "question";
    case PostType::answer: return "answer";
    case PostType::other: return "other";
  }
  return "other";
}

std::string_view to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::fenced: return "fenced";
    case BlockKind::indented: return "indented";
    case BlockKind::html_pre: return "html_pre";
  }
  return "fenced";
}

std::string_view to_string(InputFormat format) {
  return format == InputFormat::jsonl ? "jsonl" : "se_xml";
}

std::optional<InputFormat> parse_input_format(std::string_view name) {
  if (name == "jsonl") return InputFormat::jsonl;
  if (name == "se_xml") return InputFormat::se_xml;
  return std::nullopt;
}

Timestamp platform_epoch() {
  using namespace std::chrono;
  return sys_days{year{2008} / January / 1};
}

namespace {

// Shared post-construction checks for both input formats.
class PostValidator {
 public:
  void check(Post& post, std::size_t location) {
    if (post.post_id <= 0) throw ParseError(location, "post_id must be positive");
    if (post.post_type == PostType::answer && !post.parent_id) {
      throw ParseError(location, "answer missing parent_id");
    }
    if (post.parent_id && *post.parent_id <= 0) {
      throw ParseError(location, "parent_id must be positive");
    }
    if (post.thread_id == 0) {
      if (post.post_type == PostType::answer) {
        post.thread_id = *post.parent_id;
      } else if (post.post_type == PostType::other && post.parent_id) {
        post.thread_id = *post.parent_id;
      } else {
        post.thread_id = post.post_id;
      }
    }
    if (post.thread_id <= 0) throw ParseError(location, "thread_id must be positive");
    if (post.creation_date < platform_epoch()) {
      throw ParseError(location, "creation_date before 2008-01-01T00:00:00Z");
    }
    auto [it, inserted] = seen_.emplace(post.post_id, location);
    if (!inserted) {
      throw ParseError(location, "duplicate post_id " + std::to_string(post.post_id) +
                                     " (first seen at record " +
                                     std::to_string(it->second) + ")");
    }
  }

 private:
  std::unordered_map<PostId, std::size_t> seen_;
};

std::optional<std::int64_t> json_int(const json& record, const char* key,
                                     std::size_t location, bool required) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) {
    if (required) throw ParseError(location, std::string("missing ") + key);
    return std::nullopt;
  }
  if (!it->is_number_integer()) {
    throw ParseError(location, std::string(key) + " must be an integer");
  }
  return it->get<std::int64_t>();
}

std::string json_string(const json& record, const char* key, std::size_t location) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    throw ParseError(location, std::string("missing or non-string ") + key);
  }
  return it->get<std::string>();
}

Post post_from_json(std::string_view line, std::size_t location) {
  json record = json::parse(line, nullptr, false);
  if (record.is_discarded()) throw ParseError(location, "invalid JSON");
  if (!record.is_object()) throw ParseError(location, "record is not a JSON object");

  Post post;
  post.post_id = *json_int(record, "post_id", location, true);
  const std::string type = json_string(record, "post_type", location);
  if (type == "question") {
    post.post_type = PostType::question;
  } else if (type == "answer") {
    post.post_type = PostType::answer;
  } else {
    post.post_type = PostType::other;
  }
  post.parent_id = json_int(record, "parent_id", location, false);
  if (auto thread = json_int(record, "thread_id", location, false)) {
    if (*thread <= 0) throw ParseError(location, "thread_id must be positive");
    post.thread_id = *thread;
  }
  const std::string date = json_string(record, "creation_date", location);
  auto ts = parse_timestamp(date);
  if (!ts) throw ParseError(location, "unparseable creation_date '" + date + "'");
  post.creation_date = *ts;
  post.author_id = json_int(record, "author_id", location, false);
  post.score = json_int(record, "score", location, false);
  post.body = json_string(record, "body", location);
  post.body_format = BodyFormat::markdown;
  return post;
}

void read_jsonl(std::istream& input, const std::function<void(Post&&)>& sink) {
  PostValidator validator;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(input, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Post post = post_from_json(line, line_no);
    validator.check(post, line_no);
    sink(std::move(post));
  }
}

std::optional<std::int64_t> parse_int_attr(const char* value) {
  std::string_view text(value);
  std::int64_t out = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
  return out;
}

struct XmlState {
  const std::function<void(Post&&)>* sink = nullptr;
  PostValidator validator;
  std::size_t rows = 0;
  XML_Parser parser = nullptr;
  std::exception_ptr error;
};

Post post_from_row(const XML_Char** attrs, std::size_t location) {
  Post post;
  bool have_id = false, have_date = false;
  std::optional<std::int64_t> type_id;
  for (std::size_t i = 0; attrs[i]; i += 2) {
    std::string_view name(attrs[i]);
    const char* value = attrs[i + 1];
    auto int_value = [&](std::string_view what) {
      auto v = parse_int_attr(value);
      if (!v) throw ParseError(location, std::string(what) + " is not an integer");
      return *v;
    };
    if (name == "Id") {
      post.post_id = int_value("Id");
      have_id = true;
    } else if (name == "PostTypeId") {
      type_id = int_value("PostTypeId");
    } else if (name == "ParentId") {
      post.parent_id = int_value("ParentId");
    } else if (name == "CreationDate") {
      auto ts = parse_timestamp(value);
      if (!ts) throw ParseError(location, std::string("unparseable CreationDate '") + value + "'");
      post.creation_date = *ts;
      have_date = true;
    } else if (name == "OwnerUserId") {
      post.author_id = int_value("OwnerUserId");
    } else if (name == "Score") {
      post.score = int_value("Score");
    } else if (name == "Body") {
      post.body = value;
    }
  }
  if (!have_id) throw ParseError(location, "row missing Id");
  if (!type_id) throw ParseError(location, "row missing PostTypeId");
  if (!have_date) throw ParseError(location, "row missing CreationDate");
  post.post_type = *type_id == 1   ? PostType::question
                   : *type_id == 2 ? PostType::answer
                                   : PostType::other;
  post.body_format = BodyFormat::html;
  return post;
}

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto* state = static_cast<XmlState*>(user);
  if (state->error || std::string_view(name) != "row") return;
  ++state->rows;
  try {
    Post post = post_from_row(attrs, state->rows);
    state->validator.check(post, state->rows);
    (*state->sink)(std::move(post));
  } catch (...) {
    state->error = std::current_exception();
    XML_StopParser(state->parser, XML_FALSE);
  }
}

void read_se_xml(std::istream& input, const std::function<void(Post&&)>& sink) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate("UTF-8"), &XML_ParserFree);
  if (!parser) throw std::runtime_error("cannot allocate XML parser");
  XmlState state;
  state.sink = &sink;
  state.parser = parser.get();
  XML_SetUserData(parser.get(), &state);
  XML_SetStartElementHandler(parser.get(), &on_start);

  std::array<char, 1 << 16> buffer{};
  bool done = false;
  while (!done) {
    input.read(buffer.data(), buffer.size());
    const auto got = static_cast<int>(input.gcount());
    done = got < static_cast<int>(buffer.size());
    if (XML_Parse(parser.get(), buffer.data(), got, done ? XML_TRUE : XML_FALSE) ==
        XML_STATUS_ERROR) {
      if (state.error) std::rethrow_exception(state.error);
      throw ParseError(state.rows + 1,
                       std::string("XML error at line ") +
                           std::to_string(XML_GetCurrentLineNumber(parser.get())) + ": " +
                           XML_ErrorString(XML_GetErrorCode(parser.get())));
    }
  }
  if (state.error) std::rethrow_exception(state.error);
}

// ---------------------------------------------------------------------------
// Block extraction

struct Line {
  std::size_t begin;  // offset of first byte
  std::size_t end;    // offset one past last byte, excluding '\n'
};

std::vector<Line> split_lines(std::string_view body) {
  std::vector<Line> lines;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t nl = body.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < body.size()) lines.push_back({start, body.size()});
      break;
    }
    lines.push_back({start, nl});
    start = nl + 1;
  }
  return lines;
}

bool is_blank(std::string_view text) {
  return text.find_first_not_of(" \t\r\f\v") == std::string_view::npos;
}

// Returns the fence character when `text` opens or closes a fence:
// up to three spaces, then three or more backticks or tildes.
char fence_char(std::string_view text) {
  std::size_t pos = 0;
  while (pos < 3 && pos < text.size() && text[pos] == ' ') ++pos;
  if (pos + 3 > text.size()) return 0;
  char c = text[pos];
  if (c != '`' && c != '~') return 0;
  if (text[pos + 1] != c || text[pos + 2] != c) return 0;
  return c;
}

// Width of the indentation stripped from an indented code line, or 0 when
// the line is not indented by at least four columns.
std::size_t indent_prefix(std::string_view text) {
  std::size_t spaces = 0;
  while (spaces < text.size() && spaces < 4 && text[spaces] == ' ') ++spaces;
  if (spaces == 4) return 4;
  if (spaces < text.size() && text[spaces] == '\t') return spaces + 1;
  return 0;
}

std::string strip_blank_indent(std::string_view text) {
  std::size_t n = 0;
  while (n < text.size() && n < 4 && text[n] == ' ') ++n;
  if (n < 4 && n < text.size() && text[n] == '\t') ++n;
  return std::string(text.substr(n));
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > text.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (ascii_lower(text[pos + i]) != prefix[i]) return false;
  }
  return true;
}

std::size_t find_ci(std::string_view text, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= text.size(); ++i) {
    if (starts_with_ci(text, i, needle)) return i;
  }
  return std::string_view::npos;
}

// Matches an opening tag `<name` followed by '>' or attributes at `pos`.
// Returns the offset just past '>' or npos.
std::size_t match_open_tag(std::string_view text, std::size_t pos, std::string_view name) {
  if (pos >= text.size() || text[pos] != '<' || !starts_with_ci(text, pos + 1, name)) {
    return std::string_view::npos;
  }
  std::size_t after = pos + 1 + name.size();
  if (after >= text.size()) return std::string_view::npos;
  char c = text[after];
  if (c != '>' && c != ' ' && c != '\t' && c != '\n' && c != '\r') {
    return std::string_view::npos;
  }
  std::size_t close = text.find('>', after);
  return close == std::string_view::npos ? close : close + 1;
}

std::size_t skip_ws(std::string_view text, std::size_t pos) {
  while (pos < text.size() &&
         (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r')) {
    ++pos;
  }
  return pos;
}

struct PreMatch {
  std::size_t begin;
  std::size_t content_begin;
  std::size_t content_end;
  std::size_t end;
};

// <pre ...><code ...>content</code></pre>, whitespace allowed between tags.
std::optional<PreMatch> match_pre_code(std::string_view text, std::size_t pos) {
  std::size_t after_pre = match_open_tag(text, pos, "pre");
  if (after_pre == std::string_view::npos) return std::nullopt;
  std::size_t code_pos = skip_ws(text, after_pre);
  std::size_t after_code = match_open_tag(text, code_pos, "code");
  if (after_code == std::string_view::npos) return std::nullopt;
  std::size_t code_close = find_ci(text, "</code>", after_code);
  if (code_close == std::string_view::npos) return std::nullopt;
  std::size_t pre_close = skip_ws(text, code_close + 7);
  if (!starts_with_ci(text, pre_close, "</pre>")) return std::nullopt;
  return PreMatch{pos, after_code, code_close, pre_close + 6};
}

std::optional<PreMatch> find_pre_code(std::string_view text, std::size_t from,
                                      std::size_t limit) {
  std::size_t pos = from;
  while (true) {
    pos = find_ci(text, "<pre", pos);
    if (pos == std::string_view::npos || pos >= limit) return std::nullopt;
    if (auto m = match_pre_code(text, pos)) return m;
    ++pos;
  }
}

class BlockCollector {
 public:
  BlockCollector(PostId post_id, std::vector<CodeRegion>* regions)
      : post_id_(post_id), regions_(regions) {}

  void add(std::string content, BlockKind kind, std::size_t begin, std::size_t end) {
    blocks_.push_back(CodeBlock{post_id_, static_cast<std::uint32_t>(blocks_.size()),
                                std::move(content), kind});
    if (regions_) regions_->push_back({begin, end});
  }

  std::vector<CodeBlock> take() { return std::move(blocks_); }

 private:
  PostId post_id_;
  std::vector<CodeRegion>* regions_;
  std::vector<CodeBlock> blocks_;
};

void extract_html(std::string_view body, BlockCollector& out) {
  std::size_t pos = 0;
  while (auto m = find_pre_code(body, pos, body.size())) {
    out.add(unescape_entities(body.substr(m->content_begin, m->content_end - m->content_begin)),
            BlockKind::html_pre, m->begin, m->end);
    pos = m->end;
  }
}

void extract_markdown(std::string_view body, BlockCollector& out, PostId post_id,
                      std::vector<std::string>* warnings) {
  const auto lines = split_lines(body);
  // CRLF bodies: the CR belongs to the line break.
  auto text = [&](std::size_t i) {
    std::string_view t = body.substr(lines[i].begin, lines[i].end - lines[i].begin);
    if (!t.empty() && t.back() == '\r') t.remove_suffix(1);
    return t;
  };
  bool after_break = true;  // start of body, blank line or previous block
  std::size_t i = 0;
  while (i < lines.size()) {
    std::string_view line = text(i);

    if (char fence = fence_char(line)) {
      std::size_t close = i + 1;
      while (close < lines.size() && fence_char(text(close)) != fence) ++close;
      std::string content;
      for (std::size_t k = i + 1; k < close && k < lines.size(); ++k) {
        if (k > i + 1) content += '\n';
        content += text(k);
      }
      if (close >= lines.size()) {
        std::string message = "post " + std::to_string(post_id) +
                               ": unterminated code fence at byte " +
                               std::to_string(lines[i].begin);
        logger().warn("{}", message);
        if (warnings) warnings->push_back(std::move(message));
        out.add(std::move(content), BlockKind::fenced, lines[i].begin, body.size());
        return;
      }
      out.add(std::move(content), BlockKind::fenced, lines[i].begin, lines[close].end);
      i = close + 1;
      after_break = true;
      continue;
    }

    if (after_break && !is_blank(line) && indent_prefix(line) > 0) {
      std::size_t last = i;  // last non-blank indented line
      std::size_t k = i;
      while (k < lines.size()) {
        std::string_view l = text(k);
        if (is_blank(l)) {
          ++k;
          continue;
        }
        if (indent_prefix(l) == 0) break;
        last = k;
        ++k;
      }
      std::string content;
      for (std::size_t j = i; j <= last; ++j) {
        std::string_view l = text(j);
        if (j > i) content += '\n';
        if (is_blank(l)) {
          content += strip_blank_indent(l);
        } else {
          content += l.substr(indent_prefix(l));
        }
      }
      out.add(std::move(content), BlockKind::indented, lines[i].begin, lines[last].end);
      i = last + 1;
      after_break = false;
      continue;
    }

    if (auto m = find_pre_code(body, lines[i].begin, lines[i].end)) {
      out.add(unescape_entities(body.substr(m->content_begin, m->content_end - m->content_begin)),
              BlockKind::html_pre, m->begin, m->end);
      // Resume on the line following the one holding </pre>.
      std::size_t k = i;
      while (k < lines.size() && lines[k].end < m->end) ++k;
      i = k + 1;
      after_break = true;
      continue;
    }

    after_break = is_blank(line);
    ++i;
  }
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

}  // namespace

void for_each_post(std::istream& input, InputFormat format,
                   const std::function<void(Post&&)>& sink) {
  if (format == InputFormat::jsonl) {
    read_jsonl(input, sink);
  } else {
    read_se_xml(input, sink);
  }
}

std::vector<Post> parse_posts(std::istream& input, InputFormat format) {
  std::vector<Post> posts;
  for_each_post(input, format, [&](Post&& post) { posts.push_back(std::move(post)); });
  return posts;
}

std::vector<Post> parse_posts_from_string(std::string_view text, InputFormat format) {
  std::istringstream stream{std::string(text)};
  return parse_posts(stream, format);
}

std::vector<CodeBlock> extract_code_blocks(std::string_view body, BodyFormat format,
                                           PostId post_id, std::vector<CodeRegion>* regions,
                                           std::vector<std::string>* warnings) {
  BlockCollector out(post_id, regions);
  if (format == BodyFormat::html) {
    extract_html(body, out);
  } else {
    extract_markdown(body, out, post_id, warnings);
  }
  return out.take();
}

std::vector<CodeBlock> extract_code_blocks(const Post& post, std::vector<std::string>* warnings) {
  if (post.post_type == PostType::other) return {};
  return extract_code_blocks(post.body, post.body_format, post.post_id, nullptr, warnings);
}

std::string unescape_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out += text[i++];
      continue;
    }
    std::size_t semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out += text[i++];
      continue;
    }
    std::string_view name = text.substr(i + 1, semi - i - 1);
    bool decoded = true;
    if (name == "lt") {
      out += '<';
    } else if (name == "gt") {
      out += '>';
    } else if (name == "amp") {
      out += '&';
    } else if (name == "quot") {
      out += '"';
    } else if (name == "apos") {
      out += '\'';
    } else if (name.size() > 1 && name[0] == '#') {
      std::uint32_t cp = 0;
      const bool hex = name[1] == 'x' || name[1] == 'X';
      std::string_view digits = name.substr(hex ? 2 : 1);
      auto res = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
      if (digits.empty() || res.ec != std::errc{} || res.ptr != digits.data() + digits.size() ||
          cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        decoded = false;
      } else {
        append_utf8(out, cp);
      }
    } else {
      decoded = false;
    }
    if (decoded) {
      i = semi + 1;
    } else {
      out += text[i++];
    }
  }
  return out;
}

}  // namespace clonescope
