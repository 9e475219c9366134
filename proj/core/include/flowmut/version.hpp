#pragma once

namespace flowmut {

inline constexpr const char kToolVersion[] = "0.1.0";

}  // namespace flowmut
