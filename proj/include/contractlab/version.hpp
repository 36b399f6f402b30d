#pragma once

namespace contractlab {

inline constexpr const char* kToolName = "contract-lab";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace contractlab
