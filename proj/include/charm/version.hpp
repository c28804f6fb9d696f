#pragma once

namespace charm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace charm
