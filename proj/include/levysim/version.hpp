#pragma once

namespace levysim {

inline constexpr const char* kVersion = "levysim-0.1.0";

}  // namespace levysim
