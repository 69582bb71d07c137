#pragma once

namespace ctrig {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ctrig
