#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clonescope/timestamp.hpp"

namespace clonescope {

enum class OriginVerdict { internal_original, external_copy, undecided };

std::string_view to_string(OriginVerdict v);
std::optional<OriginVerdict> parse_origin_verdict(std::string_view name);

// Suggested coding vocabulary; any non-empty category is accepted.
inline constexpr std::string_view kSeedCategories[] = {
    "source_code", "configuration_file", "gui_definition", "data_example", "html", "non_code"};

struct Label {
  std::string fingerprint;  // clone-set key (16 hex digits, optional "-n")
  std::string category;
  OriginVerdict origin_verdict = OriginVerdict::undecided;
  bool license_conflict = false;
  std::string notes;
  std::string analyst;
  PreciseTimestamp created_at{};

  bool operator==(const Label&) const = default;
};

nlohmann::json label_json(const Label& label);
Label label_from_record(const nlohmann::json& record);

class LabelValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Validates a submitted label body. `created_at` in the body is ignored; a
// `fingerprint` in the body must match `key`. Throws LabelValidationError.
Label label_from_submission(const nlohmann::json& body, const std::string& key);

// Append-only JSON-lines label history. Each append is flushed to disk
// (fsync) before returning; earlier bytes of the file are never rewritten.
class LabelStore {
 public:
  // Loads existing records; throws std::runtime_error naming the line of the
  // first corrupt record.
  explicit LabelStore(std::filesystem::path path);
  ~LabelStore();
  LabelStore(const LabelStore&) = delete;
  LabelStore& operator=(const LabelStore&) = delete;

  // Stamps created_at (non-decreasing within the process) and persists.
  Label append(Label label);

  // Sorted by created_at; insertion order breaks ties.
  std::vector<Label> for_key(const std::string& key) const;
  std::vector<Label> all() const;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  mutable std::mutex mutex_;
  std::vector<Label> labels_;
  PreciseTimestamp last_stamp_{};
};

}  // namespace clonescope
