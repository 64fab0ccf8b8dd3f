#pragma once

namespace tada {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace tada
