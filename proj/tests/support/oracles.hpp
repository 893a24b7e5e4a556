// Reference implementations used as test oracles. Deliberately naive: they
// share no code with the library and favour obviousness over speed.
#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "clonescope/corpus.hpp"
#include "clonescope/timestamp.hpp"

namespace oracle {

inline std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  std::string out;
  std::size_t pos = 0;
  for (;;) {
    std::size_t hit = s.find(from, pos);
    if (hit == std::string::npos) break;
    out.append(s, pos, hit - pos);
    out += to;
    pos = hit + from.size();
  }
  out.append(s, pos);
  return out;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string unified = replace_all(replace_all(text, "\r\n", "\n"), "\r", "\n");
  std::size_t start = 0;
  for (;;) {
    std::size_t nl = unified.find('\n', start);
    lines.push_back(unified.substr(start, nl == std::string::npos ? std::string::npos : nl - start));
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return lines;
}

inline const char* kBlank = " \t\f\v";

// Line-by-line restatement of the normalization rules.
inline std::string normalize(const std::string& raw) {
  std::vector<std::string> kept;
  for (std::string line : split_lines(raw)) {
    std::size_t last = line.find_last_not_of(kBlank);
    line = last == std::string::npos ? "" : line.substr(0, last + 1);
    if (line.find_first_not_of(std::string(kBlank) + "()[]{}") == std::string::npos) continue;
    kept.push_back(line);
  }
  std::string out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i) out += '\n';
    out += kept[i];
  }
  return out;
}

inline std::uint32_t count_lines(const std::string& normalized) {
  return normalized.empty() ? 0 : static_cast<std::uint32_t>(split_lines(normalized).size());
}

inline std::string project(const std::string& text) {
  static const std::string alnum =
      "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
  std::string out;
  for (char c : text) {
    if (alnum.find(c) != std::string::npos && c != '\0') out += c;
  }
  return out;
}

// FNV-1a 64 written from the published definition, one byte at a time with
// explicit modular reduction through 128-bit arithmetic.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  unsigned __int128 h = 14695981039346656037ULL;
  const unsigned __int128 prime = 1099511628211ULL;
  const unsigned __int128 mod = static_cast<unsigned __int128>(1) << 64;
  for (unsigned char b : bytes) {
    h = (h ^ b) * prime % mod;
  }
  return static_cast<std::uint64_t>(h);
}

// ---- statistics -----------------------------------------------------------

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Type 7: h = (n - 1) p, interpolate between the floor(h)-th and next order
// statistic (0-based).
inline double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

inline bool close(double a, double b, double rel = 1e-9) {
  if (a == b) return true;
  return std::fabs(a - b) <= rel * std::max({std::fabs(a), std::fabs(b), 1e-300});
}

// ---- brute-force clone sets -----------------------------------------------

struct Block {
  clonescope::PostId post_id;
  clonescope::ThreadId thread_id;
  std::uint32_t block_index;
  clonescope::Timestamp date;
  std::string raw;
};

struct Group {
  std::string projection;
  std::set<clonescope::ThreadId> threads;
  std::vector<std::size_t> members;  // indices into the block list
  std::size_t earliest = 0;
  std::uint32_t nloc = 0;
};

// All-pairs comparison: block j joins the group of the first earlier block
// with an equal projection. Blocks whose every line is blank or bracket-only
// are not code and are skipped.
inline std::vector<Group> brute_force_groups(const std::vector<Block>& blocks) {
  std::vector<Group> groups;
  std::vector<long> group_of(blocks.size(), -1);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    bool code = false;
    for (const auto& line : split_lines(blocks[j].raw)) {
      if (line.find_first_not_of(std::string(kBlank) + "()[]{}") != std::string::npos) code = true;
    }
    if (!code) continue;
    const std::string pj = project(blocks[j].raw);
    for (std::size_t i = 0; i < j; ++i) {
      if (group_of[i] >= 0 && project(blocks[i].raw) == pj) {
        group_of[j] = group_of[i];
        break;
      }
    }
    if (group_of[j] < 0) {
      group_of[j] = static_cast<long>(groups.size());
      groups.push_back(Group{pj, {}, {}, j, 0});
    }
    Group& g = groups[static_cast<std::size_t>(group_of[j])];
    g.threads.insert(blocks[j].thread_id);
    g.members.push_back(j);
    const Block& e = blocks[g.earliest];
    const Block& b = blocks[j];
    if (std::tie(b.date, b.post_id, b.block_index) < std::tie(e.date, e.post_id, e.block_index)) {
      g.earliest = j;
    }
  }
  for (auto& g : groups) g.nloc = count_lines(normalize(blocks[g.earliest].raw));
  return groups;
}

// ---- random corpora -------------------------------------------------------

// Small random code-ish snippets with projection-preserving noise. The
// alphabet avoids backticks and tildes so a snippet can sit in a fence.
class CorpusGen {
 public:
  explicit CorpusGen(std::uint64_t seed) : rng_(seed) {}

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::string base_snippet() {
    static const char* tokens[] = {"a", "b", "x1", "foo", "Bar", "42", "i", "j", "z9"};
    static const char* puncts[] = {"(", ")", ";", " = ", "+", ".", ", ", "<", "\"", "/"};
    std::string s;
    const std::size_t lines = 1 + pick(5);
    for (std::size_t l = 0; l < lines; ++l) {
      if (l) s += '\n';
      const std::size_t toks = 1 + pick(4);
      for (std::size_t t = 0; t < toks; ++t) {
        s += tokens[pick(std::size(tokens))];
        if (coin(0.6)) s += puncts[pick(std::size(puncts))];
      }
    }
    return s;
  }

  // Inserts whitespace, blank lines, bracket-only lines and bracket
  // characters; never touches alphanumerics.
  std::string noisy(const std::string& base) {
    static const char* inserts[] = {" ", "\t", "\n", "\n\n", "\n{\n", "\n  }  \n", "()", "[", "\r\n",
                                    "\n)]\n", "  "};
    std::string out;
    for (char c : base) {
      if (coin(0.08)) out += inserts[pick(std::size(inserts))];
      out += c;
    }
    if (coin(0.3)) out += "\n\n";
    if (coin(0.2)) out = "\n" + out;
    return out;
  }

  // Changes one alphanumeric character, producing a near-miss.
  std::string mutate(std::string s) {
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (std::isalnum(static_cast<unsigned char>(s[i]))) positions.push_back(i);
    }
    if (positions.empty()) return s + "q";
    char& c = s[positions[pick(positions.size())]];
    c = c == 'k' ? 'm' : 'k';
    return s;
  }

  // Up to `max_blocks` blocks over a handful of threads. Each block is
  // drawn from a small pool so clones are frequent.
  std::vector<Block> blocks(std::size_t max_blocks) {
    std::vector<std::string> pool;
    const std::size_t pool_size = 1 + pick(8);
    for (std::size_t i = 0; i < pool_size; ++i) pool.push_back(base_snippet());
    pool.push_back("{\n}\n");  // normalizes to nothing
    const std::size_t n = pick(max_blocks + 1);
    const std::size_t threads = 1 + pick(6);
    std::vector<Block> out;
    std::map<clonescope::PostId, std::uint32_t> next_index;
    std::map<clonescope::PostId, clonescope::Timestamp> dates;
    const auto base = clonescope::platform_epoch() + std::chrono::days(365);
    for (std::size_t k = 0; k < n; ++k) {
      std::string raw = pool[pick(pool.size())];
      if (coin(0.15)) raw = mutate(raw);
      raw = noisy(raw);
      const auto thread = static_cast<clonescope::ThreadId>(1 + pick(threads));
      const auto post = static_cast<clonescope::PostId>(thread * 100 + pick(3));
      auto [it, fresh] = dates.try_emplace(post, base);
      if (fresh) it->second = base + std::chrono::hours(static_cast<long>(pick(5)));
      const auto date = it->second;
      out.push_back(Block{post, thread, next_index[post]++, date, raw});
    }
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
