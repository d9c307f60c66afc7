#pragma once

namespace lesionbench {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lesionbench
