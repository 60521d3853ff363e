#pragma once

namespace alignbounds {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace alignbounds
