#pragma once

namespace cqed {
inline constexpr const char* kVersion = "cqedsim 0.1.0";
}
