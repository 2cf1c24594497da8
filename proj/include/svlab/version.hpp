#pragma once

namespace svlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace svlab
