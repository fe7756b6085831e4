#pragma once

namespace starscat {

inline constexpr const char* version() { return "0.1.0"; }

}  // namespace starscat
