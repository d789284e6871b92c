#pragma once

namespace citemetrics {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace citemetrics
