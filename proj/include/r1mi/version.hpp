#pragma once

namespace r1mi {
inline constexpr const char* kVersion = "0.1.0";
}
