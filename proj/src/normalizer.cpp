#include "clonescope/normalizer.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace clonescope {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\f' || c == '\v' || c == '\r';
}

bool is_bracket(char c) {
  return c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}';
}

// Blank lines and bracket-only lines are both dropped.
bool keep_line(std::string_view line) {
  return std::any_of(line.begin(), line.end(),
                     [](char c) { return !is_space(c) && !is_bracket(c); });
}

}  // namespace

std::string normalize(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t eol = raw.find_first_of("\r\n", pos);
    if (eol == std::string_view::npos) eol = raw.size();
    std::string_view line = raw.substr(pos, eol - pos);
    std::size_t end = line.size();
    while (end > 0 && is_space(line[end - 1])) --end;
    line = line.substr(0, end);
    if (keep_line(line)) {
      if (!out.empty()) out += '\n';
      out.append(line);
    }
    if (eol == raw.size()) break;
    pos = eol + 1;
    if (raw[eol] == '\r' && pos < raw.size() && raw[pos] == '\n') ++pos;
  }
  return out;
}

std::uint32_t nloc(std::string_view normalized) {
  if (normalized.empty()) return 0;
  std::uint32_t lines = 1;
  for (char c : normalized) lines += (c == '\n');
  return lines;
}

std::string project_alnum(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if ((c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z')) {
      out += c;
    }
  }
  return out;
}

NormalizedSnippet normalize_snippet(std::string_view raw) {
  NormalizedSnippet s;
  s.content = normalize(raw);
  s.nloc = nloc(s.content);
  s.projection = project_alnum(s.content);
  s.fingerprint = fingerprint(s.projection);
  return s;
}

std::string fingerprint_hex(Fingerprint fp) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

std::optional<Fingerprint> parse_fingerprint_hex(std::string_view text) {
  if (text.size() != 16) return std::nullopt;
  Fingerprint fp = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), fp, 16);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
  return fp;
}

}  // namespace clonescope
