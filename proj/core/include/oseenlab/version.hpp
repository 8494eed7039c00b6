#pragma once

namespace oseenlab {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSnapshotFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

}  // namespace oseenlab
