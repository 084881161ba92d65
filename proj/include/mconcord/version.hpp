#pragma once

namespace mconcord {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mconcord
