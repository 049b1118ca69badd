#pragma once

namespace qpspec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qpspec
