#pragma once

namespace cuesplit {

inline constexpr const char* kToolkitVersion = "0.1.0";

}  // namespace cuesplit
