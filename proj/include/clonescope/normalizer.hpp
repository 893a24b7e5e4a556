#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "clonescope/corpus.hpp"

namespace clonescope {

using Fingerprint = std::uint64_t;

inline constexpr Fingerprint kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr Fingerprint kFnvPrime = 1099511628211ULL;

struct NormalizedSnippet {
  std::string content;
  std::uint32_t nloc = 0;
  std::string projection;
  Fingerprint fingerprint = kFnvOffsetBasis;

  bool operator==(const NormalizedSnippet&) const = default;
};

// Whitespace normalization of a raw code block:
//   0. CRLF and lone CR become LF
//   1. trailing whitespace is stripped from every line
//   2. lines made only of brackets ()[]{} (plus whitespace) are dropped
//   3. blank lines are dropped, collapsing newline runs
//   4. no leading or trailing newline remains
// Idempotent. The result never contains "\n\n" and never ends with '\n'.
std::string normalize(std::string_view raw);

// Number of lines in normalized text; 0 for the empty string.
std::uint32_t nloc(std::string_view normalized);

// ASCII [0-9A-Za-z] subsequence of `text`.
std::string project_alnum(std::string_view text);

// 64-bit FNV-1a over the bytes of `data`.
constexpr Fingerprint fnv1a64(std::string_view data) {
  Fingerprint h = kFnvOffsetBasis;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

inline Fingerprint fingerprint(std::string_view projection) { return fnv1a64(projection); }

NormalizedSnippet normalize_snippet(std::string_view raw);
inline NormalizedSnippet process_block(const CodeBlock& block) {
  return normalize_snippet(block.raw_content);
}

// 16 lowercase hex digits, zero padded.
std::string fingerprint_hex(Fingerprint fp);
// Accepts exactly 16 hex digits (either case).
std::optional<Fingerprint> parse_fingerprint_hex(std::string_view text);

}  // namespace clonescope
