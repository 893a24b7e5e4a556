#include "clonescope/link_analysis.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "clonescope/log.hpp"

namespace clonescope {

std::string_view to_string(SourceClass c) {
  switch (c) {
    case SourceClass::qa_internal: return "qa_internal";
    case SourceClass::reference_doc: return "reference_doc";
    case SourceClass::tutorial_site: return "tutorial_site";
    case SourceClass::code_host: return "code_host";
    case SourceClass::unknown: return "unknown";
  }
  return "unknown";
}

std::optional<SourceClass> parse_source_class(std::string_view name) {
  for (auto c : {SourceClass::qa_internal, SourceClass::reference_doc, SourceClass::tutorial_site,
                 SourceClass::code_host, SourceClass::unknown}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view to_string(Attribution a) {
  return a == Attribution::attributed ? "attributed" : "unattributed";
}

namespace {

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

bool istarts_with(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (lower(text[i]) != prefix[i]) return false;
  }
  return true;
}

bool on_domain(std::string_view domain, std::string_view base) {
  if (domain == base) return true;
  return domain.size() > base.size() && domain.ends_with(base) &&
         domain[domain.size() - base.size() - 1] == '.';
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool url_char(char c) {
  return static_cast<unsigned char>(c) > 0x20 && c != '<' && c != '>' && c != '"' && c != '\'' &&
         c != '`' && c != 0x7f;
}

// Bare URLs commonly end in sentence punctuation; parentheses are kept only
// when balanced inside the URL.
std::string_view trim_bare_url(std::string_view url) {
  while (!url.empty()) {
    const char c = url.back();
    if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == '*' ||
        c == '_' || c == ']' || c == '}') {
      url.remove_suffix(1);
    } else if (c == ')') {
      if (std::count(url.begin(), url.end(), '(') < std::count(url.begin(), url.end(), ')')) {
        url.remove_suffix(1);
      } else {
        break;
      }
    } else {
      break;
    }
  }
  return url;
}

// Replaces code regions and inline code spans with spaces, keeping offsets.
std::string mask_code(std::string_view body, BodyFormat format) {
  std::string masked(body);
  std::vector<CodeRegion> regions;
  extract_code_blocks(body, format, 0, &regions, nullptr);
  for (const auto& r : regions) {
    std::fill(masked.begin() + static_cast<std::ptrdiff_t>(r.begin),
              masked.begin() + static_cast<std::ptrdiff_t>(std::min(r.end, masked.size())), ' ');
  }
  auto blank = [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e && i < masked.size(); ++i) {
      if (masked[i] != '\n') masked[i] = ' ';
    }
  };
  // <code>...</code> spans (HTML bodies and inline HTML in Markdown).
  std::size_t pos = 0;
  while (true) {
    std::size_t open = std::string_view(masked).find("<code", pos);
    if (open == std::string_view::npos) break;
    std::size_t close = std::string_view(masked).find("</code>", open);
    if (close == std::string_view::npos) break;
    blank(open, close + 7);
    pos = close + 7;
  }
  if (format == BodyFormat::markdown) {
    // Backtick spans: a run of n backticks closes at the next run of exactly n.
    std::size_t i = 0;
    while (i < masked.size()) {
      if (masked[i] != '`') {
        ++i;
        continue;
      }
      std::size_t run = 0;
      while (i + run < masked.size() && masked[i + run] == '`') ++run;
      std::size_t j = i + run;
      std::size_t close = std::string::npos;
      while (j < masked.size()) {
        if (masked[j] != '`') {
          ++j;
          continue;
        }
        std::size_t r = 0;
        while (j + r < masked.size() && masked[j + r] == '`') ++r;
        if (r == run) {
          close = j;
          break;
        }
        j += r;
      }
      if (close == std::string::npos) {
        i += run;
        continue;
      }
      blank(i, close + run);
      i = close + run;
    }
  }
  return masked;
}

struct Found {
  std::size_t offset;
  std::size_t end;
  std::string url;
};

void find_markdown_targets(std::string_view text, std::vector<Found>& out) {
  std::size_t pos = 0;
  while ((pos = text.find("](", pos)) != std::string_view::npos) {
    std::size_t start = pos + 2;
    while (start < text.size() && (text[start] == ' ' || text[start] == '\t')) ++start;
    std::size_t end = start;
    if (start < text.size() && text[start] == '<') {
      ++start;
      end = text.find('>', start);
      if (end == std::string_view::npos) {
        pos += 2;
        continue;
      }
    } else {
      int depth = 0;
      while (end < text.size() && url_char(text[end])) {
        if (text[end] == '(') ++depth;
        if (text[end] == ')') {
          if (depth == 0) break;
          --depth;
        }
        ++end;
      }
    }
    if (end > start) out.push_back({start, end, std::string(text.substr(start, end - start))});
    pos = end;
  }
}

void find_reference_definitions(std::string_view text, std::vector<Found>& out) {
  std::size_t line_start = 0;
  while (line_start < text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view line = text.substr(line_start, line_end - line_start);
    std::size_t i = 0;
    while (i < 3 && i < line.size() && line[i] == ' ') ++i;
    if (i < line.size() && line[i] == '[') {
      std::size_t close = line.find("]:", i + 1);
      if (close != std::string_view::npos && close > i + 1 &&
          line.substr(i + 1, close - i - 1).find(']') == std::string_view::npos) {
        std::size_t start = close + 2;
        while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
        if (start < line.size() && line[start] == '<') ++start;
        std::size_t end = start;
        while (end < line.size() && url_char(line[end])) ++end;
        if (end > start) {
          out.push_back({line_start + start, line_start + end,
                         std::string(line.substr(start, end - start))});
        }
      }
    }
    line_start = line_end + 1;
  }
}

void find_href_targets(std::string_view text, std::vector<Found>& out) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t at = std::string_view::npos;
    for (std::size_t i = pos; i + 4 <= text.size(); ++i) {
      if (istarts_with(text.substr(i), "href")) {
        at = i;
        break;
      }
    }
    if (at == std::string_view::npos) break;
    std::size_t i = at + 4;
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    if (i >= text.size() || text[i] != '=') {
      pos = at + 4;
      continue;
    }
    ++i;
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    if (i < text.size() && (text[i] == '"' || text[i] == '\'')) {
      const char quote = text[i];
      std::size_t end = text.find(quote, i + 1);
      if (end != std::string_view::npos) {
        out.push_back({i + 1, end, unescape_entities(text.substr(i + 1, end - i - 1))});
        pos = end + 1;
        continue;
      }
    }
    pos = i;
  }
}

void find_bare_urls(std::string_view text, const std::vector<Found>& covered,
                    std::vector<Found>& out) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t at = std::string_view::npos;
    for (std::size_t i = pos; i + 7 <= text.size(); ++i) {
      if ((text[i] == 'h' || text[i] == 'H') &&
          (istarts_with(text.substr(i), "http://") || istarts_with(text.substr(i), "https://"))) {
        at = i;
        break;
      }
    }
    if (at == std::string_view::npos) break;
    std::size_t end = at;
    while (end < text.size() && url_char(text[end])) ++end;
    const bool inside = std::any_of(covered.begin(), covered.end(), [&](const Found& f) {
      return at >= f.offset && at < f.end;
    });
    if (!inside) {
      std::string_view url = trim_bare_url(text.substr(at, end - at));
      out.push_back({at, at + url.size(), std::string(url)});
    }
    pos = end > at ? end : at + 1;
  }
}

}  // namespace

std::optional<std::string> url_domain(std::string_view url) {
  std::size_t rest = 0;
  if (istarts_with(url, "https://")) {
    rest = 8;
  } else if (istarts_with(url, "http://")) {
    rest = 7;
  } else {
    return std::nullopt;
  }
  std::string_view authority = url.substr(rest);
  authority = authority.substr(0, authority.find_first_of("/?#"));
  if (auto at = authority.rfind('@'); at != std::string_view::npos) {
    authority = authority.substr(at + 1);
  }
  if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    std::string_view port = authority.substr(colon + 1);
    if (!std::all_of(port.begin(), port.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      return std::nullopt;
    }
    authority = authority.substr(0, colon);
  }
  std::string host;
  for (char c : authority) host += lower(c);
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (host.empty()) return std::nullopt;
  for (char c : host) {
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.')) {
      return std::nullopt;
    }
  }
  if (host.front() == '.' || host.find("..") != std::string::npos) return std::nullopt;
  if (host.starts_with("www.") && host.size() > 4) host.erase(0, 4);
  return host;
}

RuleTable::RuleTable(std::vector<DomainRule> rules) : rules_(std::move(rules)) {}

RuleTable RuleTable::parse(std::istream& input) {
  std::vector<DomainRule> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(input, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    if (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);
    while (true) {
      auto tab = rest.find('\t');
      cols.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest = rest.substr(tab + 1);
    }
    auto fail = [&](const std::string& why) {
      throw std::runtime_error("rules line " + std::to_string(line_no) + ": " + why);
    };
    if (cols.size() < 2 || cols.size() > 3) fail("expected domain<TAB>class[<TAB>license_hint]");
    DomainRule rule;
    for (char c : trim(cols[0])) rule.domain += lower(c);
    if (rule.domain.starts_with("www.")) rule.domain.erase(0, 4);
    if (rule.domain.empty()) fail("empty domain");
    auto cls = parse_source_class(trim(cols[1]));
    if (!cls) fail("unknown source class '" + std::string(trim(cols[1])) + "'");
    rule.source_class = *cls;
    if (cols.size() == 3 && !trim(cols[2]).empty()) rule.license_hint = std::string(trim(cols[2]));
    rules.push_back(std::move(rule));
  }
  return RuleTable(std::move(rules));
}

RuleTable RuleTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rules file " + path);
  return parse(in);
}

RuleTable RuleTable::defaults() {
  return RuleTable({
      {"stackoverflow.com", SourceClass::qa_internal, std::nullopt},
      {"stackexchange.com", SourceClass::qa_internal, std::nullopt},
      {"developer.android.com", SourceClass::reference_doc, "CC BY 2.5"},
      {"androidhive.info", SourceClass::tutorial_site, "restrictive terms of use"},
  });
}

const DomainRule* RuleTable::match(std::string_view domain) const {
  const DomainRule* best = nullptr;
  for (const auto& rule : rules_) {
    if (on_domain(domain, rule.domain) && (!best || rule.domain.size() > best->domain.size())) {
      best = &rule;
    }
  }
  return best;
}

bool is_platform_domain(std::string_view domain) {
  static constexpr std::string_view kDomains[] = {
      "stackoverflow.com", "stackexchange.com", "superuser.com", "serverfault.com",
      "askubuntu.com",     "mathoverflow.net",  "stackapps.com", "sstatic.net"};
  return std::any_of(std::begin(kDomains), std::end(kDomains),
                     [&](std::string_view d) { return on_domain(domain, d); });
}

std::vector<SourceLink> extract_links(std::string_view body, BodyFormat format,
                                      std::vector<std::string>* warnings) {
  const std::string masked = mask_code(body, format);
  std::vector<Found> found;
  if (format == BodyFormat::markdown) {
    find_markdown_targets(masked, found);
    find_reference_definitions(masked, found);
  }
  find_href_targets(masked, found);
  std::vector<Found> bare;
  find_bare_urls(masked, found, bare);
  found.insert(found.end(), bare.begin(), bare.end());
  std::stable_sort(found.begin(), found.end(),
                   [](const Found& a, const Found& b) { return a.offset < b.offset; });

  std::vector<SourceLink> links;
  std::unordered_set<std::string> seen;
  for (auto& f : found) {
    std::string url(trim(f.url));
    if (url.starts_with("//")) url = "https:" + url;
    if (!istarts_with(url, "http://") && !istarts_with(url, "https://")) {
      logger().debug("skipping relative or non-http link target '{}'", url);
      continue;
    }
    auto domain = url_domain(url);
    if (!domain) {
      std::string message = "skipping unparseable URL '" + url + "'";
      logger().warn("{}", message);
      if (warnings) warnings->push_back(std::move(message));
      continue;
    }
    if (!seen.insert(url).second) continue;
    links.push_back(SourceLink{std::move(url), std::move(*domain), SourceClass::unknown, {}});
  }
  return links;
}

SourceLink classify_source(SourceLink link, const RuleTable& rules) {
  if (const DomainRule* rule = rules.match(link.domain)) {
    link.source_class = rule->source_class;
    link.license_hint = rule->license_hint;
  } else if (is_platform_domain(link.domain)) {
    link.source_class = SourceClass::qa_internal;
    link.license_hint.reset();
  } else {
    link.source_class = SourceClass::unknown;
    link.license_hint.reset();
  }
  return link;
}

std::string candidate_domain(const SourceLink& link, const RuleTable& rules) {
  if (const DomainRule* rule = rules.match(link.domain)) return rule->domain;
  return link.domain;
}

OriginReport analyze_origin(const CloneSet& set, const PostLookup& posts, const RuleTable& rules) {
  if (set.occurrences.empty()) throw std::invalid_argument("clone set has no occurrences");
  OriginReport report;
  report.fingerprint = set.fingerprint;
  report.disambiguator = set.disambiguator;
  report.earliest_occurrence = *std::min_element(
      set.occurrences.begin(), set.occurrences.end(), [](const Occurrence& a, const Occurrence& b) {
        return std::tie(a.creation_date, a.post_id) < std::tie(b.creation_date, b.post_id);
      });

  // Distinct posts in occurrence order, with their classified links.
  std::vector<PostId> post_ids;
  std::unordered_set<PostId> seen_posts;
  for (const auto& o : set.occurrences) {
    if (seen_posts.insert(o.post_id).second) post_ids.push_back(o.post_id);
  }

  struct CandidateAcc {
    SourceLink first;
    std::set<PostId> citing;
  };
  std::map<std::string, CandidateAcc> candidates;
  std::unordered_map<PostId, std::vector<std::string>> post_domains;

  for (PostId id : post_ids) {
    const Post* post = posts(id);
    if (!post) throw std::out_of_range("post " + std::to_string(id) + " not found");
    PostLinks entry;
    entry.post_id = id;
    for (auto& raw : extract_links(post->body, post->body_format)) {
      SourceLink link = classify_source(std::move(raw), rules);
      post_domains[id].push_back(link.domain);
      if (link.source_class == SourceClass::qa_internal) {
        entry.internal.push_back(std::move(link));
        continue;
      }
      const std::string key = candidate_domain(link, rules);
      auto [it, inserted] = candidates.try_emplace(key);
      if (inserted) it->second.first = link;
      it->second.citing.insert(id);
      entry.external.push_back(std::move(link));
    }
    report.post_links.push_back(std::move(entry));
  }

  for (auto& [domain, acc] : candidates) {
    report.external_candidates.push_back({domain, acc.first, acc.citing.size()});
  }
  std::sort(report.external_candidates.begin(), report.external_candidates.end(),
            [](const ExternalCandidate& a, const ExternalCandidate& b) {
              if (a.citing_posts != b.citing_posts) return a.citing_posts > b.citing_posts;
              return a.domain < b.domain;
            });

  for (const auto& candidate : report.external_candidates) {
    auto& statuses = report.attribution[candidate.domain];
    for (PostId id : post_ids) {
      const auto& domains = post_domains[id];
      const bool linked = std::any_of(domains.begin(), domains.end(), [&](const std::string& d) {
        return on_domain(d, candidate.domain);
      });
      statuses[id] = linked ? Attribution::attributed : Attribution::unattributed;
    }
  }

  std::map<std::int64_t, std::set<ThreadId>> threads_by_author;
  std::map<std::int64_t, std::size_t> occurrences_by_author;
  for (const auto& o : set.occurrences) {
    if (!o.author_id) continue;
    threads_by_author[*o.author_id].insert(o.thread_id);
    ++occurrences_by_author[*o.author_id];
  }
  for (const auto& [author, threads] : threads_by_author) {
    if (occurrences_by_author[author] >= 2 && threads.size() >= 2) {
      report.same_author_chain = true;
      break;
    }
  }
  return report;
}

}  // namespace clonescope
