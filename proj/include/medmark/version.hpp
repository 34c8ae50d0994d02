#pragma once

namespace medmark {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace medmark
