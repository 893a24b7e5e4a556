#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clonescope/clone_index.hpp"
#include "clonescope/corpus.hpp"

namespace clonescope {

enum class SourceClass { qa_internal, reference_doc, tutorial_site, code_host, unknown };

std::string_view to_string(SourceClass c);
std::optional<SourceClass> parse_source_class(std::string_view name);

struct SourceLink {
  std::string url;
  // Lowercased host with any leading "www." removed.
  std::string domain;
  SourceClass source_class = SourceClass::unknown;
  std::optional<std::string> license_hint;

  bool operator==(const SourceLink&) const = default;
};

// Host of an http(s) URL, normalized as SourceLink::domain. nullopt when the
// URL is not absolute http(s) or has an invalid host.
std::optional<std::string> url_domain(std::string_view url);

struct DomainRule {
  std::string domain;
  SourceClass source_class = SourceClass::unknown;
  std::optional<std::string> license_hint;
};

class RuleTable {
 public:
  RuleTable() = default;
  explicit RuleTable(std::vector<DomainRule> rules);

  // `domain<TAB>class<TAB>license_hint` lines; '#' starts a comment line.
  // Throws std::runtime_error naming the line on a bad record.
  static RuleTable parse(std::istream& input);
  static RuleTable load(const std::string& path);
  // Built-in seed table (same content as data/rules.tsv).
  static RuleTable defaults();

  // Longest rule whose domain equals `domain` or is a dot-suffix of it.
  const DomainRule* match(std::string_view domain) const;

  const std::vector<DomainRule>& rules() const { return rules_; }

 private:
  std::vector<DomainRule> rules_;
};

// True for the Q&A platform's own domains (Stack Overflow and the
// Stack Exchange network).
bool is_platform_domain(std::string_view domain);

// Link targets outside code: Markdown inline links, reference definitions,
// HTML anchors and bare http(s) URLs. Deduplicated, first-seen order,
// unclassified. Relative targets are ignored; malformed absolute URLs are
// skipped with a warning.
std::vector<SourceLink> extract_links(std::string_view body,
                                      BodyFormat format = BodyFormat::markdown,
                                      std::vector<std::string>* warnings = nullptr);

SourceLink classify_source(SourceLink link, const RuleTable& rules);

// The domain evidence is grouped under: the matching rule's domain when a
// rule matches, else the link's own domain.
std::string candidate_domain(const SourceLink& link, const RuleTable& rules);

enum class Attribution { attributed, unattributed };
std::string_view to_string(Attribution a);

struct ExternalCandidate {
  std::string domain;
  SourceLink link;  // first link seen on this domain
  std::size_t citing_posts = 0;
};

struct PostLinks {
  PostId post_id = 0;
  std::vector<SourceLink> internal;
  std::vector<SourceLink> external;
};

struct OriginReport {
  Fingerprint fingerprint = 0;
  std::uint32_t disambiguator = 0;
  Occurrence earliest_occurrence;
  // By citing post count descending, then domain ascending.
  std::vector<ExternalCandidate> external_candidates;
  bool same_author_chain = false;
  // candidate domain -> post id -> status, over the distinct posts of the set.
  std::map<std::string, std::map<PostId, Attribution>> attribution;
  // One entry per distinct post, in occurrence order.
  std::vector<PostLinks> post_links;
};

using PostLookup = std::function<const Post*(PostId)>;

// Throws std::out_of_range naming the post id when an occurrence cannot be
// resolved through `posts`.
OriginReport analyze_origin(const CloneSet& set, const PostLookup& posts,
                            const RuleTable& rules);

}  // namespace clonescope
