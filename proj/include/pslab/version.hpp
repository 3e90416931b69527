#pragma once

namespace pslab {
inline constexpr const char* version = "0.1.0";
}
