#pragma once

namespace crnsim {

inline constexpr const char* kVersion = "0.1.0";

} // namespace crnsim
