#pragma once

namespace pt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pt
