#pragma once

namespace nullhom {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nullhom
