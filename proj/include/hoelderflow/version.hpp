#pragma once

namespace hoelderflow {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace hoelderflow
