#pragma once

namespace bellsim {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace bellsim
