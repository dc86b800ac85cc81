#pragma once

namespace dimers {
inline constexpr const char* kVersion = "0.1.0";
}
