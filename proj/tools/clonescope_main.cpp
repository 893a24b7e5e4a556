// clonescope: exact code-clone analysis of Q&A post corpora.
//
//   clonescope analyze --input posts.jsonl --format jsonl --min-nloc 20 \
//       --min-threads 2 --rules rules.tsv --out results/
//   clonescope serve --data results/ --labels labels.jsonl --bind 127.0.0.1:8080

#include <csignal>
#include <cstdio>
#include <iostream>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "clonescope/log.hpp"
#include "clonescope/pipeline.hpp"
#include "clonescope/reporter.hpp"
#include "clonescope/service.hpp"

namespace {

using namespace clonescope;

int run_analyze(const std::string& input, const std::string& format, std::uint32_t min_nloc,
                std::size_t min_threads, const std::string& rules_path, const std::string& out,
                unsigned workers) {
  AnalyzeOptions options;
  auto parsed = parse_input_format(format);
  if (!parsed) {
    std::cerr << "unknown format '" << format << "' (expected jsonl or se_xml)\n";
    return 2;
  }
  options.format = *parsed;
  options.min_nloc = min_nloc;
  options.min_threads = min_threads;
  options.workers = workers;
  if (!rules_path.empty()) {
    options.rules = RuleTable::load(rules_path);
    options.rules_source = rules_path;
  }
  Analysis analysis = analyze_file(input, options);
  write_outputs(analysis, out);

  const CloneStats& st = analysis.stats;
  std::cout << "posts:                 " << analysis.meta.posts << "\n"
            << "code blocks:           " << analysis.meta.code_blocks << "\n"
            << "distinct fingerprints: " << st.distinct_fingerprints << "\n"
            << "cloned (>=2 threads):  " << st.cloned_fingerprints;
  if (st.cloned_fraction) std::cout << " (" << format_percent(*st.cloned_fraction) << ")";
  std::cout << "\n";
  for (const auto& [threshold, count] : st.filtered_count_by_threshold) {
    std::cout << "cloned, nloc >= " << threshold << ":    " << count << "\n";
  }
  std::cout << "exported clone sets:   " << analysis.ranked.size() << " -> " << out << "\n";
  return 0;
}

bool split_bind(const std::string& bind, std::string& host, int& port) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0) return false;
  host = bind.substr(0, colon);
  try {
    std::size_t used = 0;
    port = std::stoi(bind.substr(colon + 1), &used);
    return used == bind.size() - colon - 1 && port > 0 && port < 65536;
  } catch (const std::exception&) {
    return false;
  }
}

int run_serve(const std::string& data_dir, const std::string& labels_path,
              const std::string& bind, const std::string& static_dir) {
  std::string host;
  int port = 0;
  if (!split_bind(bind, host, port)) {
    std::cerr << "invalid --bind '" << bind << "' (expected host:port)\n";
    return 2;
  }

  // SIGINT/SIGTERM are handled by a dedicated thread so the server can be
  // stopped outside signal context.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Dataset data = Dataset::load(data_dir);
  LabelStore labels(labels_path);
  std::optional<std::filesystem::path> assets;
  if (!static_dir.empty()) assets = static_dir;
  Service service(std::move(data), labels, assets);

  std::thread waiter([&service, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    logger().info("signal {} received, shutting down", sig);
    service.stop();
  });

  std::cerr << "serving " << data_dir << " on http://" << host << ":" << port << "\n";
  const bool ok = service.listen(host, port);
  if (!ok) {
    std::cerr << "cannot bind " << bind << "\n";
    pthread_kill(waiter.native_handle(), SIGTERM);
  }
  waiter.join();
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact code-clone analysis of Q&A post corpora"};
  app.require_subcommand(1);

  std::string input, format = "jsonl", rules, out;
  std::uint32_t min_nloc = kStrictNlocThreshold;
  std::size_t min_threads = 2;
  unsigned workers = 0;
  auto* analyze_cmd = app.add_subcommand("analyze", "Build clone sets and reports from a corpus");
  analyze_cmd->add_option("--input", input, "Corpus file")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--format", format, "jsonl or se_xml")->capture_default_str();
  analyze_cmd->add_option("--min-nloc", min_nloc, "Minimum normalized lines")->capture_default_str();
  analyze_cmd->add_option("--min-threads", min_threads, "Minimum distinct threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--rules", rules, "Domain rule table (TSV)")->check(CLI::ExistingFile);
  analyze_cmd->add_option("--out", out, "Output directory")->required();
  analyze_cmd->add_option("--workers", workers, "Worker threads (0 = all cores)")
      ->capture_default_str();

  std::string data_dir, labels_path, bind = "127.0.0.1:8080", static_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Serve analysis results and collect labels");
  serve_cmd->add_option("--data", data_dir, "Directory written by analyze")
      ->required()
      ->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--labels", labels_path, "Label store (JSON lines)")->required();
  serve_cmd->add_option("--bind", bind, "host:port")->capture_default_str();
  serve_cmd->add_option("--static", static_dir, "Web UI assets served under /")
      ->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze_cmd->parsed()) {
      return run_analyze(input, format, min_nloc, min_threads, rules, out, workers);
    }
    return run_serve(data_dir, labels_path, bind, static_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
