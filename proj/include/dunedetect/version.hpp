#pragma once

namespace dunedetect {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dunedetect
