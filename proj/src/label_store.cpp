#include "clonescope/label_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace clonescope {

using nlohmann::json;

std::string_view to_string(OriginVerdict v) {
  switch (v) {
    case OriginVerdict::internal_original: return "internal_original";
    case OriginVerdict::external_copy: return "external_copy";
    case OriginVerdict::undecided: return "undecided";
  }
  return "undecided";
}

std::optional<OriginVerdict> parse_origin_verdict(std::string_view name) {
  for (auto v : {OriginVerdict::internal_original, OriginVerdict::external_copy,
                 OriginVerdict::undecided}) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

json label_json(const Label& label) {
  return json{{"fingerprint", label.fingerprint},
              {"category", label.category},
              {"origin_verdict", to_string(label.origin_verdict)},
              {"license_conflict", label.license_conflict},
              {"notes", label.notes},
              {"analyst", label.analyst},
              {"created_at", format_precise_timestamp(label.created_at)}};
}

namespace {

const json* field(const json& body, const char* key) {
  auto it = body.find(key);
  return (it == body.end() || it->is_null()) ? nullptr : &*it;
}

std::string string_field(const json& body, const char* key, bool required) {
  const json* v = field(body, key);
  if (!v) {
    if (required) throw LabelValidationError(std::string(key) + " is required");
    return {};
  }
  if (!v->is_string()) throw LabelValidationError(std::string(key) + " must be a string");
  return v->get<std::string>();
}

Label validated_fields(const json& body) {
  if (!body.is_object()) throw LabelValidationError("label must be a JSON object");
  Label label;
  label.category = string_field(body, "category", true);
  if (label.category.empty()) throw LabelValidationError("category must not be empty");
  const std::string verdict = string_field(body, "origin_verdict", true);
  auto parsed = parse_origin_verdict(verdict);
  if (!parsed) {
    throw LabelValidationError("origin_verdict must be one of internal_original, external_copy, "
                               "undecided (got '" + verdict + "')");
  }
  label.origin_verdict = *parsed;
  if (const json* v = field(body, "license_conflict")) {
    if (!v->is_boolean()) throw LabelValidationError("license_conflict must be a boolean");
    label.license_conflict = v->get<bool>();
  }
  label.notes = string_field(body, "notes", false);
  label.analyst = string_field(body, "analyst", false);
  return label;
}

}  // namespace

Label label_from_submission(const json& body, const std::string& key) {
  Label label = validated_fields(body);
  if (const json* fp = field(body, "fingerprint")) {
    if (!fp->is_string() || fp->get<std::string>() != key) {
      throw LabelValidationError("fingerprint in body does not match the request path");
    }
  }
  label.fingerprint = key;
  return label;
}

Label label_from_record(const json& record) {
  Label label = validated_fields(record);
  label.fingerprint = string_field(record, "fingerprint", true);
  auto ts = parse_precise_timestamp(string_field(record, "created_at", true));
  if (!ts) throw LabelValidationError("created_at is not a timestamp");
  label.created_at = *ts;
  return label;
}

LabelStore::LabelStore(std::filesystem::path path) : path_(std::move(path)) {
  {
    std::ifstream in(path_, std::ios::binary);
    std::string line;
    std::size_t line_no = 0;
    while (in && std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      if (in.eof()) {
        throw std::runtime_error("label store " + path_.string() + " line " +
                                 std::to_string(line_no) + ": truncated record");
      }
      try {
        json record = json::parse(line);
        labels_.push_back(label_from_record(record));
        last_stamp_ = std::max(last_stamp_, labels_.back().created_at);
      } catch (const std::exception& e) {
        throw std::runtime_error("label store " + path_.string() + " line " +
                                 std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw std::runtime_error("cannot open label store " + path_.string() + ": " +
                             std::strerror(errno));
  }
}

LabelStore::~LabelStore() {
  if (fd_ >= 0) ::close(fd_);
}

Label LabelStore::append(Label label) {
  std::lock_guard lock(mutex_);
  const auto now = std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
  label.created_at = std::max(now, last_stamp_);
  std::string line = label_json(label).dump() + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("label store write failed: " + std::string(std::strerror(errno)));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) {
    throw std::runtime_error("label store fsync failed: " + std::string(std::strerror(errno)));
  }
  last_stamp_ = label.created_at;
  labels_.push_back(label);
  return label;
}

std::vector<Label> LabelStore::for_key(const std::string& key) const {
  std::vector<Label> out;
  {
    std::lock_guard lock(mutex_);
    std::copy_if(labels_.begin(), labels_.end(), std::back_inserter(out),
                 [&](const Label& l) { return l.fingerprint == key; });
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Label& a, const Label& b) { return a.created_at < b.created_at; });
  return out;
}

std::vector<Label> LabelStore::all() const {
  std::vector<Label> out;
  {
    std::lock_guard lock(mutex_);
    out = labels_;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Label& a, const Label& b) { return a.created_at < b.created_at; });
  return out;
}

}  // namespace clonescope
