#pragma once

namespace policylens {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace policylens
