#pragma once

namespace ctxalign {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ctxalign
