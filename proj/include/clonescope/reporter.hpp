#pragma once

#include <filesystem>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "clonescope/clone_index.hpp"
#include "clonescope/link_analysis.hpp"

namespace clonescope {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct RunMetadata {
  std::string corpus_digest;  // fnv1a64 of the input bytes, hex
  std::string input_format;
  std::string rules_source;
  std::uint64_t posts = 0;
  std::uint64_t code_blocks = 0;
  std::uint64_t empty_blocks = 0;  // normalized to nothing, not indexed
};

// Summary document. Every CloneStats field appears under its own name at
// top level (absent statistics as null), next to "run", "conventions",
// "rounded" and "reference_full_dump" blocks.
nlohmann::json summary_json(const CloneStats& stats, const RunMetadata& meta);
CloneStats stats_from_summary(const nlohmann::json& doc);

// "thread_count,clone_set_count" header, then one row per thread count in
// ascending order; rows separated by '\n', no trailing newline.
std::string histogram_csv(const CloneStats& stats);

// Clone-set document: set, occurrences, per-post links and origin evidence.
// Throws std::invalid_argument when set and origin disagree on identity.
nlohmann::json clone_set_json(const CloneSet& set, const OriginReport& origin);
std::pair<CloneSet, OriginReport> clone_set_from_json(const nlohmann::json& doc);

nlohmann::json source_link_json(const SourceLink& link);
nlohmann::json occurrence_json(const Occurrence& o);

// Canonical serialization used for every file and HTTP body.
std::string serialize(const nlohmann::json& doc);

// Writers replace the target atomically (temp file + rename) and throw
// std::runtime_error when the path is not writable.
void write_text_file(const std::filesystem::path& path, std::string_view text);
void write_summary(const CloneStats& stats, const RunMetadata& meta,
                   const std::filesystem::path& path);
void write_histogram(const CloneStats& stats, const std::filesystem::path& path);
// Nothing is written when the identities disagree.
void export_clone_set(const CloneSet& set, const OriginReport& origin,
                      const std::filesystem::path& path);

// Fixed-precision renderings used in the "rounded" block.
std::string format_percent(double fraction);       // 0.16666 -> "16.7%"
std::string format_one_decimal(double value);      // 42.56 -> "42.6"
std::string format_compact(double value);          // 30 -> "30", 2.5 -> "2.5"

}  // namespace clonescope
