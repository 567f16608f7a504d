#pragma once

namespace corrnet {

inline constexpr const char* kToolName = "corrnet";
inline constexpr const char* kToolVersion = "0.1.0";
// Bumped whenever the layout of any serialized report changes.
inline constexpr int kReportSchema = 1;

}  // namespace corrnet
