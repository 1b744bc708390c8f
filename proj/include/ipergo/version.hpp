#pragma once

namespace ipergo {
inline constexpr const char* kVersion = "0.1.0";
}
