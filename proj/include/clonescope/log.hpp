#pragma once

#include <spdlog/spdlog.h>

namespace clonescope {

// Shared stderr logger. Verbosity comes from CLONESCOPE_LOG
// (trace, debug, info, warn, error, critical, off; default warn).
spdlog::logger& logger();

}  // namespace clonescope
