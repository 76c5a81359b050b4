#pragma once

#include <string_view>

namespace rotalign {

inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace rotalign
