#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "clonescope/clone_index.hpp"
#include "clonescope/label_store.hpp"
#include "clonescope/link_analysis.hpp"

namespace httplib {
class Server;
}

namespace clonescope {

struct Analysis;

// The read-only view the service exposes: the summary document and every
// exported clone set with its origin evidence, in rank order.
class Dataset {
 public:
  struct Entry {
    CloneSet set;
    OriginReport origin;
    std::string body;  // serialized clone-set document
  };

  static Dataset from_analysis(const Analysis& analysis);
  // Reads summary.json and clone-sets/*.json as written by write_outputs.
  static Dataset load(const std::filesystem::path& dir);

  const std::string& summary_body() const { return summary_body_; }
  const std::vector<Entry>& ranked() const { return ranked_; }
  const Entry* find(const std::string& key) const;

 private:
  void finish();

  std::string summary_body_;
  std::vector<Entry> ranked_;
  std::unordered_map<std::string, std::size_t> by_key_;
};

struct PageRequest {
  std::uint32_t min_nloc = 20;
  std::size_t min_threads = 2;
  std::size_t page = 1;
  std::size_t per_page = 50;
};

struct PageResult {
  std::size_t total = 0;
  std::string body;
};

// GET /api/clone-sets body for one page of the filtered ranking.
PageResult clone_set_page(const Dataset& data, const PageRequest& request);

// HTTP front end: /api/stats, /api/clone-sets[...], /api/labels. Read
// handlers only touch the immutable dataset; label writes go through the
// store's single writer.
class Service {
 public:
  Service(Dataset data, LabelStore& labels,
          std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves until stop(). Returns false when binding fails.
  bool listen(const std::string& host, int port);
  // Binds to an ephemeral port; returns it, or -1 on failure. Serve with
  // listen_after_bind().
  int bind_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  bool is_running() const;
  void wait_until_ready() const;

 private:
  void install_routes();

  Dataset data_;
  LabelStore& labels_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace clonescope
