#pragma once

namespace weyl {

inline constexpr const char* kVersion = "0.1.0";

} // namespace weyl
