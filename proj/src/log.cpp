#include "clonescope/log.hpp"

#include <cstdlib>
#include <string_view>

#include <spdlog/sinks/stdout_sinks.h>

namespace clonescope {

spdlog::logger& logger() {
  static const std::shared_ptr<spdlog::logger> instance = [] {
    auto log = std::make_shared<spdlog::logger>(
        "clonescope", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    log->set_pattern("[%Y-%m-%d %H:%M:%S.%e] [%l] %v");
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("CLONESCOPE_LOG"); env && *env) {
      level = spdlog::level::from_str(env);
      if (level == spdlog::level::off && std::string_view(env) != "off") {
        level = spdlog::level::warn;
      }
    }
    log->set_level(level);
    return log;
  }();
  return *instance;
}

}  // namespace clonescope
