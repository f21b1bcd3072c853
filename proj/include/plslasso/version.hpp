#pragma once

namespace plslasso {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace plslasso
