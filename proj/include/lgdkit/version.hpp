#pragma once

namespace lgdkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lgdkit
