#include "clonescope/reporter.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace clonescope {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

json rounded_or_null(const std::optional<double>& v, std::string (*fmt)(double)) {
  return v ? json(fmt(*v)) : json(nullptr);
}

// Published full-dump figures, kept next to each run for comparison.
json reference_full_dump() {
  return json{
      {"distinct_fingerprints", 43942960},
      {"cloned_fingerprints", 909323},
      {"cloned_fraction", "2.1%"},
      {"filtered_count_by_threshold", {{"6", 215746}, {"20", 46818}}},
      {"min_nloc", 20},
      {"nloc_mean", 42.6},
      {"nloc_sd", 37.7},
      {"nloc_median", 30},
      {"nloc_iqr", 22},
      {"thread_mean", 2.3},
      {"thread_sd", 1.1},
      {"thread_median", 2},
      {"thread_iqr", 0},
      {"pct_more_than_two_threads", "13.4%"},
  };
}

json attribution_json(const std::map<std::string, std::map<PostId, Attribution>>& attribution) {
  json out = json::object();
  for (const auto& [domain, statuses] : attribution) {
    json per_post = json::object();
    for (const auto& [post, status] : statuses) per_post[std::to_string(post)] = to_string(status);
    out[domain] = std::move(per_post);
  }
  return out;
}

SourceLink source_link_from_json(const json& j) {
  SourceLink link;
  link.url = j.at("url").get<std::string>();
  link.domain = j.at("domain").get<std::string>();
  auto cls = parse_source_class(j.at("source_class").get<std::string>());
  if (!cls) throw std::invalid_argument("unknown source_class in document");
  link.source_class = *cls;
  if (!j.at("license_hint").is_null()) link.license_hint = j.at("license_hint").get<std::string>();
  return link;
}

Occurrence occurrence_from_json(const json& j) {
  Occurrence o;
  o.post_id = j.at("post_id").get<PostId>();
  o.thread_id = j.at("thread_id").get<ThreadId>();
  o.block_index = j.at("block_index").get<std::uint32_t>();
  auto ts = parse_timestamp(j.at("creation_date").get<std::string>());
  if (!ts) throw std::invalid_argument("bad creation_date in document");
  o.creation_date = *ts;
  if (!j.at("author_id").is_null()) o.author_id = j.at("author_id").get<std::int64_t>();
  return o;
}

}  // namespace

std::string format_percent(double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f%%", fraction * 100.0);
  return buf;
}

std::string format_one_decimal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", value);
  return buf;
}

std::string format_compact(double value) {
  if (std::floor(value) == value && std::fabs(value) < 1e15) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.0f", value);
    return buf;
  }
  return format_one_decimal(value);
}

json source_link_json(const SourceLink& link) {
  return json{{"url", link.url},
              {"domain", link.domain},
              {"source_class", to_string(link.source_class)},
              {"license_hint", link.license_hint ? json(*link.license_hint) : json(nullptr)}};
}

json occurrence_json(const Occurrence& o) {
  return json{{"post_id", o.post_id},
              {"thread_id", o.thread_id},
              {"block_index", o.block_index},
              {"creation_date", format_timestamp(o.creation_date)},
              {"author_id", o.author_id ? json(*o.author_id) : json(nullptr)}};
}

json summary_json(const CloneStats& st, const RunMetadata& meta) {
  json doc;
  doc["schema"] = "clonescope.summary/1";
  doc["run"] = {{"tool_version", kToolVersion},
                {"corpus_digest", meta.corpus_digest},
                {"input_format", meta.input_format},
                {"rules_source", meta.rules_source},
                {"posts", meta.posts},
                {"code_blocks", meta.code_blocks},
                {"empty_blocks", meta.empty_blocks}};
  doc["conventions"] = {
      {"sd", "sample standard deviation (n - 1 denominator)"},
      {"quantiles", "linear interpolation between order statistics (type 7)"},
      {"iqr", "Q3 - Q1"},
      {"cloned", "present in at least 2 distinct threads"},
      {"distributions", "over clone sets with thread_count >= min_threads and nloc >= min_nloc"},
      {"empty_blocks", "blocks with nloc 0 after normalization are not indexed"},
      {"fingerprint", "FNV-1a 64 over the alphanumeric projection"}};

  doc["min_threads"] = st.min_threads;
  doc["min_nloc"] = st.min_nloc;
  doc["distinct_fingerprints"] = st.distinct_fingerprints;
  doc["cloned_fingerprints"] = st.cloned_fingerprints;
  doc["cloned_fraction"] = optional_number(st.cloned_fraction);
  json thresholds = json::object();
  for (const auto& [t, count] : st.filtered_count_by_threshold) thresholds[std::to_string(t)] = count;
  doc["filtered_count_by_threshold"] = std::move(thresholds);
  doc["filtered_count"] = st.filtered_count;
  doc["nloc_mean"] = optional_number(st.nloc_mean);
  doc["nloc_sd"] = optional_number(st.nloc_sd);
  doc["nloc_median"] = optional_number(st.nloc_median);
  doc["nloc_iqr"] = optional_number(st.nloc_iqr);
  doc["thread_mean"] = optional_number(st.thread_mean);
  doc["thread_sd"] = optional_number(st.thread_sd);
  doc["thread_median"] = optional_number(st.thread_median);
  doc["thread_iqr"] = optional_number(st.thread_iqr);
  doc["pct_more_than_two_threads"] = optional_number(st.pct_more_than_two_threads);
  json histogram = json::object();
  for (const auto& [threads, count] : st.thread_count_histogram) {
    histogram[std::to_string(threads)] = count;
  }
  doc["thread_count_histogram"] = std::move(histogram);

  doc["rounded"] = {
      {"cloned_fraction", rounded_or_null(st.cloned_fraction, &format_percent)},
      {"nloc_mean", rounded_or_null(st.nloc_mean, &format_one_decimal)},
      {"nloc_sd", rounded_or_null(st.nloc_sd, &format_one_decimal)},
      {"nloc_median", rounded_or_null(st.nloc_median, &format_compact)},
      {"nloc_iqr", rounded_or_null(st.nloc_iqr, &format_compact)},
      {"thread_mean", rounded_or_null(st.thread_mean, &format_one_decimal)},
      {"thread_sd", rounded_or_null(st.thread_sd, &format_one_decimal)},
      {"thread_median", rounded_or_null(st.thread_median, &format_compact)},
      {"thread_iqr", rounded_or_null(st.thread_iqr, &format_compact)},
      {"pct_more_than_two_threads", rounded_or_null(st.pct_more_than_two_threads, &format_percent)},
  };
  doc["reference_full_dump"] = reference_full_dump();
  return doc;
}

CloneStats stats_from_summary(const json& doc) {
  CloneStats st;
  st.min_threads = doc.at("min_threads").get<std::size_t>();
  st.min_nloc = doc.at("min_nloc").get<std::uint32_t>();
  st.distinct_fingerprints = doc.at("distinct_fingerprints").get<std::uint64_t>();
  st.cloned_fingerprints = doc.at("cloned_fingerprints").get<std::uint64_t>();
  st.cloned_fraction = read_optional(doc, "cloned_fraction");
  for (const auto& [k, v] : doc.at("filtered_count_by_threshold").items()) {
    st.filtered_count_by_threshold[static_cast<std::uint32_t>(std::stoul(k))] = v.get<std::uint64_t>();
  }
  st.filtered_count = doc.at("filtered_count").get<std::uint64_t>();
  st.nloc_mean = read_optional(doc, "nloc_mean");
  st.nloc_sd = read_optional(doc, "nloc_sd");
  st.nloc_median = read_optional(doc, "nloc_median");
  st.nloc_iqr = read_optional(doc, "nloc_iqr");
  st.thread_mean = read_optional(doc, "thread_mean");
  st.thread_sd = read_optional(doc, "thread_sd");
  st.thread_median = read_optional(doc, "thread_median");
  st.thread_iqr = read_optional(doc, "thread_iqr");
  st.pct_more_than_two_threads = read_optional(doc, "pct_more_than_two_threads");
  for (const auto& [k, v] : doc.at("thread_count_histogram").items()) {
    st.thread_count_histogram[static_cast<std::uint32_t>(std::stoul(k))] = v.get<std::uint64_t>();
  }
  return st;
}

std::string histogram_csv(const CloneStats& stats) {
  std::string out = "thread_count,clone_set_count";
  for (const auto& [threads, count] : stats.thread_count_histogram) {
    out += '\n';
    out += std::to_string(threads);
    out += ',';
    out += std::to_string(count);
  }
  return out;
}

json clone_set_json(const CloneSet& set, const OriginReport& origin) {
  if (set.fingerprint != origin.fingerprint || set.disambiguator != origin.disambiguator) {
    throw std::invalid_argument("origin report " + fingerprint_hex(origin.fingerprint) +
                                " does not belong to clone set " + set.key());
  }
  json doc;
  doc["schema"] = "clonescope.clone_set/1";
  doc["key"] = set.key();
  doc["fingerprint"] = fingerprint_hex(set.fingerprint);
  doc["disambiguator"] = set.disambiguator;
  doc["content"] = set.content;
  doc["nloc"] = set.nloc;
  doc["projection"] = set.projection;
  doc["thread_count"] = set.thread_count();
  doc["thread_ids"] = set.thread_ids;
  json occurrences = json::array();
  for (const auto& o : set.occurrences) occurrences.push_back(occurrence_json(o));
  doc["occurrences"] = std::move(occurrences);

  json posts = json::array();
  for (const auto& p : origin.post_links) {
    json internal = json::array(), external = json::array();
    for (const auto& l : p.internal) internal.push_back(source_link_json(l));
    for (const auto& l : p.external) external.push_back(source_link_json(l));
    posts.push_back({{"post_id", p.post_id},
                     {"internal_links", std::move(internal)},
                     {"external_links", std::move(external)}});
  }
  doc["posts"] = std::move(posts);

  json candidates = json::array();
  for (const auto& c : origin.external_candidates) {
    candidates.push_back({{"domain", c.domain},
                          {"citing_posts", c.citing_posts},
                          {"link", source_link_json(c.link)}});
  }
  doc["origin"] = {{"earliest_occurrence", occurrence_json(origin.earliest_occurrence)},
                   {"external_candidates", std::move(candidates)},
                   {"same_author_chain", origin.same_author_chain},
                   {"evidence_basis", "links in post text outside code; no web search"}};
  doc["attribution"] = attribution_json(origin.attribution);
  return doc;
}

std::pair<CloneSet, OriginReport> clone_set_from_json(const json& doc) {
  CloneSet set;
  auto fp = parse_fingerprint_hex(doc.at("fingerprint").get<std::string>());
  if (!fp) throw std::invalid_argument("bad fingerprint in clone-set document");
  set.fingerprint = *fp;
  set.disambiguator = doc.at("disambiguator").get<std::uint32_t>();
  set.content = doc.at("content").get<std::string>();
  set.nloc = doc.at("nloc").get<std::uint32_t>();
  set.projection = doc.at("projection").get<std::string>();
  set.thread_ids = doc.at("thread_ids").get<std::vector<ThreadId>>();
  for (const auto& o : doc.at("occurrences")) set.occurrences.push_back(occurrence_from_json(o));

  OriginReport origin;
  origin.fingerprint = set.fingerprint;
  origin.disambiguator = set.disambiguator;
  for (const auto& p : doc.at("posts")) {
    PostLinks links;
    links.post_id = p.at("post_id").get<PostId>();
    for (const auto& l : p.at("internal_links")) links.internal.push_back(source_link_from_json(l));
    for (const auto& l : p.at("external_links")) links.external.push_back(source_link_from_json(l));
    origin.post_links.push_back(std::move(links));
  }
  const auto& o = doc.at("origin");
  origin.earliest_occurrence = occurrence_from_json(o.at("earliest_occurrence"));
  for (const auto& c : o.at("external_candidates")) {
    origin.external_candidates.push_back({c.at("domain").get<std::string>(),
                                          source_link_from_json(c.at("link")),
                                          c.at("citing_posts").get<std::size_t>()});
  }
  origin.same_author_chain = o.at("same_author_chain").get<bool>();
  for (const auto& [domain, statuses] : doc.at("attribution").items()) {
    auto& out = origin.attribution[domain];
    for (const auto& [post, status] : statuses.items()) {
      out[std::stoll(post)] = status.get<std::string>() == "attributed" ? Attribution::attributed
                                                                          : Attribution::unattributed;
    }
  }
  return {std::move(set), std::move(origin)};
}

std::string serialize(const json& doc) { return doc.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw std::runtime_error("error writing " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot write " + path.string());
  }
}

void write_summary(const CloneStats& stats, const RunMetadata& meta,
                   const std::filesystem::path& path) {
  write_text_file(path, serialize(summary_json(stats, meta)));
}

void write_histogram(const CloneStats& stats, const std::filesystem::path& path) {
  write_text_file(path, histogram_csv(stats));
}

void export_clone_set(const CloneSet& set, const OriginReport& origin,
                      const std::filesystem::path& path) {
  write_text_file(path, serialize(clone_set_json(set, origin)));
}

}  // namespace clonescope
