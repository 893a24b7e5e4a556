#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "clonescope/clone_index.hpp"
#include "clonescope/corpus.hpp"
#include "clonescope/link_analysis.hpp"
#include "clonescope/reporter.hpp"

namespace clonescope {

struct AnalyzeOptions {
  InputFormat format = InputFormat::jsonl;
  std::uint32_t min_nloc = kStrictNlocThreshold;
  std::size_t min_threads = 2;
  RuleTable rules = RuleTable::defaults();
  std::string rules_source = "built-in";
  // Worker threads for extraction and normalization; 0 = hardware concurrency.
  unsigned workers = 0;
};

// Everything one analysis run produces. Sets in `ranked` point into `index`,
// so the result must not be copied; it is move-only.
struct Analysis {
  std::vector<Post> posts;
  std::unordered_map<PostId, std::size_t> post_position;
  CloneIndex index;
  CloneStats stats;
  RunMetadata meta;
  std::vector<const CloneSet*> ranked;  // passing (min_threads, min_nloc)
  std::vector<OriginReport> origins;    // parallel to `ranked`

  Analysis() = default;
  Analysis(Analysis&&) = default;
  Analysis& operator=(Analysis&&) = default;
  Analysis(const Analysis&) = delete;
  Analysis& operator=(const Analysis&) = delete;

  const Post* find_post(PostId id) const;
};

// Parses, extracts, normalizes, indexes and analyzes one corpus.
Analysis analyze(std::string_view corpus_bytes, const AnalyzeOptions& options);
Analysis analyze_file(const std::filesystem::path& input, const AnalyzeOptions& options);

// Index only, from already-parsed posts. Extraction and normalization run on
// `workers` threads; the result does not depend on the worker count.
CloneIndex index_posts(const std::vector<Post>& posts, unsigned workers,
                       std::uint64_t* code_blocks = nullptr,
                       std::uint64_t* empty_blocks = nullptr);

// Writes summary.json, histogram.csv and clone-sets/<key>.json under `out`.
void write_outputs(const Analysis& analysis, const std::filesystem::path& out);

}  // namespace clonescope
