#include "clonescope/service.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "clonescope/log.hpp"
#include "clonescope/pipeline.hpp"
#include "clonescope/reporter.hpp"

namespace clonescope {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json list_item(const Dataset::Entry& e) {
  std::vector<PostId> posts;
  for (const auto& o : e.set.occurrences) posts.push_back(o.post_id);
  std::sort(posts.begin(), posts.end());
  posts.erase(std::unique(posts.begin(), posts.end()), posts.end());
  return json{{"key", e.set.key()},
              {"fingerprint", fingerprint_hex(e.set.fingerprint)},
              {"nloc", e.set.nloc},
              {"thread_count", e.set.thread_count()},
              {"occurrence_count", e.set.occurrences.size()},
              {"post_count", posts.size()}};
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(serialize(json{{"error", message}}), kJson);
}

std::optional<std::int64_t> int_param(const httplib::Request& req, const char* name,
                                      std::int64_t fallback, std::string& error) {
  if (!req.has_param(name)) return fallback;
  const std::string value = req.get_param_value(name);
  std::int64_t out = 0;
  auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
    error = std::string(name) + " must be an integer";
    return std::nullopt;
  }
  return out;
}

std::string lower_key(std::string key) {
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return key;
}

json labels_array(const std::vector<Label>& labels) {
  json out = json::array();
  for (const auto& l : labels) out.push_back(label_json(l));
  return out;
}

}  // namespace

Dataset Dataset::from_analysis(const Analysis& analysis) {
  Dataset d;
  d.summary_body_ = serialize(summary_json(analysis.stats, analysis.meta));
  for (std::size_t i = 0; i < analysis.ranked.size(); ++i) {
    const CloneSet& set = *analysis.ranked[i];
    d.ranked_.push_back(
        {set, analysis.origins[i], serialize(clone_set_json(set, analysis.origins[i]))});
  }
  d.finish();
  return d;
}

Dataset Dataset::load(const std::filesystem::path& dir) {
  Dataset d;
  d.summary_body_ = read_file(dir / "summary.json");
  if (json::parse(d.summary_body_, nullptr, false).is_discarded()) {
    throw std::runtime_error("corrupt " + (dir / "summary.json").string());
  }
  const auto sets_dir = dir / "clone-sets";
  if (std::filesystem::is_directory(sets_dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(sets_dir)) {
      if (entry.path().extension() != ".json") continue;
      std::string body = read_file(entry.path());
      try {
        auto [set, origin] = clone_set_from_json(json::parse(body));
        d.ranked_.push_back({std::move(set), std::move(origin), std::move(body)});
      } catch (const std::exception& e) {
        throw std::runtime_error("corrupt clone-set document " + entry.path().string() + ": " +
                                 e.what());
      }
    }
  }
  d.finish();
  return d;
}

void Dataset::finish() {
  std::sort(ranked_.begin(), ranked_.end(),
            [](const Entry& a, const Entry& b) { return rank_before(a.set, b.set); });
  by_key_.clear();
  for (std::size_t i = 0; i < ranked_.size(); ++i) by_key_.emplace(ranked_[i].set.key(), i);
}

const Dataset::Entry* Dataset::find(const std::string& key) const {
  auto it = by_key_.find(key);
  return it == by_key_.end() ? nullptr : &ranked_[it->second];
}

PageResult clone_set_page(const Dataset& data, const PageRequest& request) {
  std::vector<const Dataset::Entry*> matching;
  for (const auto& e : data.ranked()) {
    if (e.set.thread_count() >= request.min_threads && e.set.nloc >= request.min_nloc) {
      matching.push_back(&e);
    }
  }
  json items = json::array();
  const std::size_t first = (request.page - 1) * request.per_page;
  for (std::size_t i = first; i < matching.size() && i < first + request.per_page; ++i) {
    items.push_back(list_item(*matching[i]));
  }
  json doc{{"total", matching.size()},
           {"page", request.page},
           {"per_page", request.per_page},
           {"min_nloc", request.min_nloc},
           {"min_threads", request.min_threads},
           {"items", std::move(items)}};
  return {matching.size(), serialize(doc)};
}

Service::Service(Dataset data, LabelStore& labels,
                 std::optional<std::filesystem::path> static_dir)
    : data_(std::move(data)), labels_(labels), server_(std::make_unique<httplib::Server>()) {
  install_routes();
  if (static_dir && !server_->set_mount_point("/", static_dir->string())) {
    throw std::runtime_error("static asset directory " + static_dir->string() + " not found");
  }
}

Service::~Service() { stop(); }

void Service::install_routes() {
  auto& srv = *server_;

  srv.Get("/api/stats", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(data_.summary_body(), kJson);
  });

  srv.Get("/api/clone-sets", [this](const httplib::Request& req, httplib::Response& res) {
    std::string error;
    auto min_nloc = int_param(req, "min_nloc", 20, error);
    auto min_threads = int_param(req, "min_threads", 2, error);
    auto page = int_param(req, "page", 1, error);
    auto per_page = int_param(req, "per_page", 50, error);
    if (!error.empty()) return send_error(res, 400, error);
    if (*min_nloc < 0) return send_error(res, 400, "min_nloc must be >= 0");
    if (*min_threads < 1) return send_error(res, 400, "min_threads must be >= 1");
    if (*page < 1) return send_error(res, 400, "page must be >= 1");
    if (*per_page < 1 || *per_page > 200) return send_error(res, 400, "per_page must be in 1..200");
    PageRequest request{static_cast<std::uint32_t>(std::min<std::int64_t>(*min_nloc, UINT32_MAX)),
                        static_cast<std::size_t>(*min_threads), static_cast<std::size_t>(*page),
                        static_cast<std::size_t>(*per_page)};
    PageResult result = clone_set_page(data_, request);
    res.set_header("X-Total-Count", std::to_string(result.total));
    res.set_content(result.body, kJson);
  });

  static const char* kSetPattern = R"(/api/clone-sets/([0-9a-fA-F]{16}(?:-[0-9]+)?))";

  srv.Get(kSetPattern, [this](const httplib::Request& req, httplib::Response& res) {
    const auto* entry = data_.find(lower_key(req.matches[1]));
    if (!entry) return send_error(res, 404, "unknown clone set");
    res.set_content(entry->body, kJson);
  });

  srv.Get(std::string(kSetPattern) + "/labels",
          [this](const httplib::Request& req, httplib::Response& res) {
            const std::string key = lower_key(req.matches[1]);
            if (!data_.find(key)) return send_error(res, 404, "unknown clone set");
            res.set_content(serialize(labels_array(labels_.for_key(key))), kJson);
          });

  srv.Post(std::string(kSetPattern) + "/labels",
           [this](const httplib::Request& req, httplib::Response& res) {
             const std::string key = lower_key(req.matches[1]);
             if (!data_.find(key)) return send_error(res, 404, "unknown clone set " + key);
             json body = json::parse(req.body, nullptr, false);
             if (body.is_discarded()) return send_error(res, 400, "body is not valid JSON");
             try {
               Label stored = labels_.append(label_from_submission(body, key));
               res.status = 201;
               res.set_content(serialize(label_json(stored)), kJson);
             } catch (const LabelValidationError& e) {
               send_error(res, 400, e.what());
             } catch (const std::exception& e) {
               logger().error("label write failed: {}", e.what());
               send_error(res, 500, "label could not be stored");
             }
           });

  srv.Get("/api/labels", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(serialize(labels_array(labels_.all())), kJson);
  });

  srv.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    logger().debug("{} {} -> {}", req.method, req.path, res.status);
  });
}

bool Service::listen(const std::string& host, int port) { return server_->listen(host, port); }

int Service::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool Service::listen_after_bind() { return server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

bool Service::is_running() const { return server_->is_running(); }

void Service::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace clonescope
