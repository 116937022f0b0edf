#pragma once

namespace kolmo {

inline constexpr const char* version = "0.1.0";

}  // namespace kolmo
