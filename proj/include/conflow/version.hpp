#pragma once

namespace conflow {

inline constexpr const char* kVersion = "0.1.0";

} // namespace conflow
