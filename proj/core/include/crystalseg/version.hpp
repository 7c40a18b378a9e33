#pragma once

namespace crystalseg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace crystalseg
