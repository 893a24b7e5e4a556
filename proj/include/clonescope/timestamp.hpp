#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace clonescope {

using Timestamp = std::chrono::sys_seconds;
using PreciseTimestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// Accepts "YYYY-MM-DDTHH:MM:SS" with optional fractional seconds and an
// optional "Z" or "+hh:mm"/"-hh:mm" offset (a space may replace the 'T').
// Fractions are truncated. Returns nullopt on any syntax or range error.
std::optional<Timestamp> parse_timestamp(std::string_view text);

// Same grammar, keeping up to millisecond precision.
std::optional<PreciseTimestamp> parse_precise_timestamp(std::string_view text);

// Always "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(Timestamp ts);
// Always "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string format_precise_timestamp(PreciseTimestamp ts);

}  // namespace clonescope
