#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clonescope/corpus.hpp"
#include "clonescope/normalizer.hpp"

namespace clonescope {

struct Occurrence {
  PostId post_id = 0;
  ThreadId thread_id = 0;
  std::uint32_t block_index = 0;
  Timestamp creation_date{};
  std::optional<std::int64_t> author_id;

  bool operator==(const Occurrence&) const = default;
};

// Order used everywhere occurrences are listed: creation date, then post id,
// then block index.
bool occurrence_before(const Occurrence& a, const Occurrence& b);

// All occurrences of one alphanumeric projection.
struct CloneSet {
  Fingerprint fingerprint = 0;
  // 0 unless several projections share `fingerprint`; those are numbered
  // 0, 1, ... in ascending projection order.
  std::uint32_t disambiguator = 0;
  // Normalized content and line count of the earliest occurrence.
  std::string content;
  std::uint32_t nloc = 0;
  std::string projection;
  std::vector<Occurrence> occurrences;  // sorted by occurrence_before
  std::vector<ThreadId> thread_ids;     // ascending, unique

  std::size_t thread_count() const { return thread_ids.size(); }

  // Fingerprint hex, suffixed with "-<n>" for disambiguator n > 0.
  std::string key() const;
};

// Total ranking order: thread count desc, nloc desc, fingerprint asc,
// content asc.
bool rank_before(const CloneSet& a, const CloneSet& b);

// Finalized, immutable index. Sets are stored by (fingerprint, disambiguator).
class CloneIndex {
 public:
  CloneIndex() = default;

  const std::vector<CloneSet>& sets() const { return sets_; }
  std::size_t size() const { return sets_.size(); }
  std::size_t occurrence_count() const;

  const CloneSet* find(Fingerprint fp, std::uint32_t disambiguator = 0) const;
  // Accepts the CloneSet::key() form.
  const CloneSet* find(std::string_view key) const;

 private:
  friend class CloneIndexBuilder;
  std::vector<CloneSet> sets_;
};

// Accumulates occurrences; partial builders filled concurrently can be merged.
// The finalized index does not depend on insertion or merge order.
class CloneIndexBuilder {
 public:
  // Snippets with nloc == 0 are not code and are ignored.
  void add(const Occurrence& occurrence, const NormalizedSnippet& snippet);
  void merge(CloneIndexBuilder&& other);
  CloneIndex finalize() &&;

 private:
  struct Entry {
    std::string projection;
    std::string content;  // of `earliest`
    std::uint32_t nloc = 0;
    Occurrence earliest;
    std::vector<Occurrence> occurrences;
  };
  void absorb(Fingerprint fp, Entry&& entry);

  std::unordered_map<Fingerprint, std::vector<Entry>> buckets_;
};

CloneIndex build_index(std::span<const std::pair<Occurrence, NormalizedSnippet>> snippets);

// Sets with thread_count >= min_threads and nloc >= min_nloc, in rank order.
std::vector<const CloneSet*> clone_sets(const CloneIndex& index, std::size_t min_threads,
                                        std::uint32_t min_nloc);

void rank(std::vector<const CloneSet*>& sets);

struct CloneStats {
  std::size_t min_threads = 2;
  std::uint32_t min_nloc = 0;

  std::uint64_t distinct_fingerprints = 0;
  std::uint64_t cloned_fingerprints = 0;
  std::optional<double> cloned_fraction;  // absent for an empty index
  std::map<std::uint32_t, std::uint64_t> filtered_count_by_threshold;
  std::uint64_t filtered_count = 0;

  std::optional<double> nloc_mean, nloc_sd, nloc_median, nloc_iqr;
  std::optional<double> thread_mean, thread_sd, thread_median, thread_iqr;
  std::optional<double> pct_more_than_two_threads;
  std::map<std::uint32_t, std::uint64_t> thread_count_histogram;

  bool operator==(const CloneStats&) const = default;
};

// Thresholds always reported in filtered_count_by_threshold besides min_nloc.
inline constexpr std::uint32_t kLooseNlocThreshold = 6;
inline constexpr std::uint32_t kStrictNlocThreshold = 20;

// Counts cover every indexed set; distributions and the histogram cover the
// sets passing (min_threads, min_nloc).
CloneStats corpus_stats(const CloneIndex& index, std::uint32_t min_nloc,
                        std::size_t min_threads = 2);

}  // namespace clonescope
