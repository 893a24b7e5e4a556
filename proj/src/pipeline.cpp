#include "clonescope/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

#include "clonescope/log.hpp"
#include "clonescope/normalizer.hpp"

namespace clonescope {

const Post* Analysis::find_post(PostId id) const {
  auto it = post_position.find(id);
  return it == post_position.end() ? nullptr : &posts[it->second];
}

namespace {

struct PartialIndex {
  CloneIndexBuilder builder;
  std::uint64_t blocks = 0;
  std::uint64_t empty = 0;
};

void index_range(const std::vector<Post>& posts, std::size_t begin, std::size_t end,
                 PartialIndex& out) {
  for (std::size_t i = begin; i < end; ++i) {
    const Post& post = posts[i];
    for (const CodeBlock& block : extract_code_blocks(post)) {
      ++out.blocks;
      NormalizedSnippet snippet = process_block(block);
      if (snippet.nloc == 0) {
        ++out.empty;
        continue;
      }
      out.builder.add(Occurrence{post.post_id, post.thread_id, block.block_index,
                                 post.creation_date, post.author_id},
                      snippet);
    }
  }
}

}  // namespace

CloneIndex index_posts(const std::vector<Post>& posts, unsigned workers,
                       std::uint64_t* code_blocks, std::uint64_t* empty_blocks) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(1, posts.size() / 64)));

  std::vector<PartialIndex> parts(workers);
  const std::size_t chunk = (posts.size() + workers - 1) / std::max(1u, workers);
  {
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(posts.size(), w * chunk);
      const std::size_t end = std::min(posts.size(), begin + chunk);
      threads.emplace_back([&posts, begin, end, &part = parts[w]] {
        index_range(posts, begin, end, part);
      });
    }
  }

  CloneIndexBuilder merged;
  std::uint64_t blocks = 0, empty = 0;
  for (auto& part : parts) {
    merged.merge(std::move(part.builder));
    blocks += part.blocks;
    empty += part.empty;
  }
  if (code_blocks) *code_blocks = blocks;
  if (empty_blocks) *empty_blocks = empty;
  return std::move(merged).finalize();
}

Analysis analyze(std::string_view corpus_bytes, const AnalyzeOptions& options) {
  Analysis a;
  a.posts = parse_posts_from_string(corpus_bytes, options.format);
  a.post_position.reserve(a.posts.size());
  for (std::size_t i = 0; i < a.posts.size(); ++i) a.post_position.emplace(a.posts[i].post_id, i);
  logger().info("parsed {} posts", a.posts.size());

  a.index = index_posts(a.posts, options.workers, &a.meta.code_blocks, &a.meta.empty_blocks);
  logger().info("indexed {} code blocks into {} clone sets", a.meta.code_blocks, a.index.size());

  a.stats = corpus_stats(a.index, options.min_nloc, options.min_threads);
  a.meta.corpus_digest = fingerprint_hex(fnv1a64(corpus_bytes));
  a.meta.input_format = std::string(to_string(options.format));
  a.meta.rules_source = options.rules_source;
  a.meta.posts = a.posts.size();

  a.ranked = clone_sets(a.index, options.min_threads, options.min_nloc);
  a.origins.reserve(a.ranked.size());
  const PostLookup lookup = [&a](PostId id) { return a.find_post(id); };
  for (const CloneSet* set : a.ranked) {
    a.origins.push_back(analyze_origin(*set, lookup, options.rules));
  }
  return a;
}

Analysis analyze_file(const std::filesystem::path& input, const AnalyzeOptions& options) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input " + input.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return analyze(buffer.str(), options);
}

void write_outputs(const Analysis& analysis, const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out / "clone-sets", ec);
  if (ec) throw std::runtime_error("cannot create " + (out / "clone-sets").string());
  // Stale exports from an earlier run with other thresholds would otherwise
  // be served alongside the new ones.
  for (const auto& entry : fs::directory_iterator(out / "clone-sets")) {
    if (entry.path().extension() == ".json") fs::remove(entry.path());
  }
  write_summary(analysis.stats, analysis.meta, out / "summary.json");
  write_histogram(analysis.stats, out / "histogram.csv");
  for (std::size_t i = 0; i < analysis.ranked.size(); ++i) {
    const CloneSet& set = *analysis.ranked[i];
    export_clone_set(set, analysis.origins[i], out / "clone-sets" / (set.key() + ".json"));
  }
}

}  // namespace clonescope
