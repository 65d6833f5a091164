#pragma once

namespace catmech {
inline constexpr const char* version = "0.1.0";
}
