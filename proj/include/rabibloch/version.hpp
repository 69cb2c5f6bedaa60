#pragma once

namespace rabibloch {
inline constexpr const char* kVersion = "0.1.0";
}
