#include "clonescope/clone_index.hpp"

#include <algorithm>
#include <charconv>
#include <tuple>

#include "clonescope/statistics.hpp"

namespace clonescope {

bool occurrence_before(const Occurrence& a, const Occurrence& b) {
  return std::tie(a.creation_date, a.post_id, a.block_index) <
         std::tie(b.creation_date, b.post_id, b.block_index);
}

std::string CloneSet::key() const {
  std::string k = fingerprint_hex(fingerprint);
  if (disambiguator > 0) k += "-" + std::to_string(disambiguator);
  return k;
}

bool rank_before(const CloneSet& a, const CloneSet& b) {
  if (a.thread_count() != b.thread_count()) return a.thread_count() > b.thread_count();
  if (a.nloc != b.nloc) return a.nloc > b.nloc;
  if (a.fingerprint != b.fingerprint) return a.fingerprint < b.fingerprint;
  if (a.content != b.content) return a.content < b.content;
  return a.disambiguator < b.disambiguator;
}

std::size_t CloneIndex::occurrence_count() const {
  std::size_t n = 0;
  for (const auto& s : sets_) n += s.occurrences.size();
  return n;
}

const CloneSet* CloneIndex::find(Fingerprint fp, std::uint32_t disambiguator) const {
  auto it = std::lower_bound(sets_.begin(), sets_.end(), std::pair{fp, disambiguator},
                             [](const CloneSet& s, const std::pair<Fingerprint, std::uint32_t>& k) {
                               return std::pair{s.fingerprint, s.disambiguator} < k;
                             });
  if (it == sets_.end() || it->fingerprint != fp || it->disambiguator != disambiguator) {
    return nullptr;
  }
  return &*it;
}

const CloneSet* CloneIndex::find(std::string_view key) const {
  std::uint32_t disambiguator = 0;
  if (key.size() > 17 && key[16] == '-') {
    auto tail = key.substr(17);
    auto res = std::from_chars(tail.data(), tail.data() + tail.size(), disambiguator);
    if (res.ec != std::errc{} || res.ptr != tail.data() + tail.size() || disambiguator == 0) {
      return nullptr;
    }
    key = key.substr(0, 16);
  }
  auto fp = parse_fingerprint_hex(key);
  return fp ? find(*fp, disambiguator) : nullptr;
}

void CloneIndexBuilder::add(const Occurrence& occurrence, const NormalizedSnippet& snippet) {
  if (snippet.nloc == 0) return;
  auto& bucket = buckets_[snippet.fingerprint];
  for (auto& entry : bucket) {
    if (entry.projection == snippet.projection) {
      if (occurrence_before(occurrence, entry.earliest)) {
        entry.earliest = occurrence;
        entry.content = snippet.content;
        entry.nloc = snippet.nloc;
      }
      entry.occurrences.push_back(occurrence);
      return;
    }
  }
  bucket.push_back(Entry{snippet.projection, snippet.content, snippet.nloc, occurrence, {occurrence}});
}

void CloneIndexBuilder::absorb(Fingerprint fp, Entry&& incoming) {
  auto& bucket = buckets_[fp];
  for (auto& entry : bucket) {
    if (entry.projection != incoming.projection) continue;
    if (occurrence_before(incoming.earliest, entry.earliest)) {
      entry.earliest = incoming.earliest;
      entry.content = std::move(incoming.content);
      entry.nloc = incoming.nloc;
    }
    entry.occurrences.insert(entry.occurrences.end(), incoming.occurrences.begin(),
                             incoming.occurrences.end());
    return;
  }
  bucket.push_back(std::move(incoming));
}

void CloneIndexBuilder::merge(CloneIndexBuilder&& other) {
  if (buckets_.empty()) {
    buckets_ = std::move(other.buckets_);
    other.buckets_.clear();
    return;
  }
  for (auto& [fp, bucket] : other.buckets_) {
    for (auto& entry : bucket) absorb(fp, std::move(entry));
  }
  other.buckets_.clear();
}

CloneIndex CloneIndexBuilder::finalize() && {
  CloneIndex index;
  index.sets_.reserve(buckets_.size());
  for (auto& [fp, bucket] : buckets_) {
    std::sort(bucket.begin(), bucket.end(),
              [](const Entry& a, const Entry& b) { return a.projection < b.projection; });
    for (std::size_t i = 0; i < bucket.size(); ++i) {
      Entry& e = bucket[i];
      CloneSet set;
      set.fingerprint = fp;
      set.disambiguator = static_cast<std::uint32_t>(i);
      set.content = std::move(e.content);
      set.nloc = e.nloc;
      set.projection = std::move(e.projection);
      set.occurrences = std::move(e.occurrences);
      std::sort(set.occurrences.begin(), set.occurrences.end(), occurrence_before);
      set.thread_ids.reserve(set.occurrences.size());
      for (const auto& o : set.occurrences) set.thread_ids.push_back(o.thread_id);
      std::sort(set.thread_ids.begin(), set.thread_ids.end());
      set.thread_ids.erase(std::unique(set.thread_ids.begin(), set.thread_ids.end()),
                           set.thread_ids.end());
      index.sets_.push_back(std::move(set));
    }
  }
  buckets_.clear();
  std::sort(index.sets_.begin(), index.sets_.end(), [](const CloneSet& a, const CloneSet& b) {
    return std::pair{a.fingerprint, a.disambiguator} < std::pair{b.fingerprint, b.disambiguator};
  });
  return index;
}

CloneIndex build_index(std::span<const std::pair<Occurrence, NormalizedSnippet>> snippets) {
  CloneIndexBuilder builder;
  for (const auto& [occurrence, snippet] : snippets) builder.add(occurrence, snippet);
  return std::move(builder).finalize();
}

void rank(std::vector<const CloneSet*>& sets) {
  std::sort(sets.begin(), sets.end(),
            [](const CloneSet* a, const CloneSet* b) { return rank_before(*a, *b); });
}

std::vector<const CloneSet*> clone_sets(const CloneIndex& index, std::size_t min_threads,
                                        std::uint32_t min_nloc) {
  std::vector<const CloneSet*> out;
  for (const auto& set : index.sets()) {
    if (set.thread_count() >= min_threads && set.nloc >= min_nloc) out.push_back(&set);
  }
  rank(out);
  return out;
}

CloneStats corpus_stats(const CloneIndex& index, std::uint32_t min_nloc,
                        std::size_t min_threads) {
  CloneStats st;
  st.min_nloc = min_nloc;
  st.min_threads = min_threads;
  st.distinct_fingerprints = index.size();
  for (std::uint32_t t : {kLooseNlocThreshold, kStrictNlocThreshold, min_nloc}) {
    st.filtered_count_by_threshold[t] = 0;
  }

  std::vector<double> nlocs, threads;
  std::uint64_t more_than_two = 0;
  for (const auto& set : index.sets()) {
    if (set.thread_count() >= 2) ++st.cloned_fingerprints;
    if (set.thread_count() < min_threads) continue;
    for (auto& [threshold, count] : st.filtered_count_by_threshold) {
      if (set.nloc >= threshold) ++count;
    }
    if (set.nloc < min_nloc) continue;
    nlocs.push_back(set.nloc);
    threads.push_back(static_cast<double>(set.thread_count()));
    ++st.thread_count_histogram[static_cast<std::uint32_t>(set.thread_count())];
    if (set.thread_count() > 2) ++more_than_two;
  }
  if (st.distinct_fingerprints > 0) {
    st.cloned_fraction = static_cast<double>(st.cloned_fingerprints) /
                         static_cast<double>(st.distinct_fingerprints);
  }
  st.filtered_count = nlocs.size();
  st.nloc_mean = stats::mean(nlocs);
  st.nloc_sd = stats::sample_sd(nlocs);
  st.nloc_median = stats::median(nlocs);
  st.nloc_iqr = stats::iqr(nlocs);
  st.thread_mean = stats::mean(threads);
  st.thread_sd = stats::sample_sd(threads);
  st.thread_median = stats::median(threads);
  st.thread_iqr = stats::iqr(threads);
  if (!nlocs.empty()) {
    st.pct_more_than_two_threads =
        static_cast<double>(more_than_two) / static_cast<double>(nlocs.size());
  }
  return st;
}

}  // namespace clonescope
