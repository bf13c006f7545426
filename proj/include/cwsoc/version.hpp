#pragma once

namespace cwsoc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cwsoc
