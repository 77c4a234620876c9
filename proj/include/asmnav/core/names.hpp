#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace asmnav {

inline constexpr std::size_t kMaxDisplayNameLength = 256;
inline constexpr std::size_t kElisionHead = 126;
inline constexpr std::size_t kElisionTail = 127;
inline constexpr std::string_view kElisionMarker = "...";

/// Shortens names longer than 256 characters to head + "..." + tail (exactly 256).
/// Shorter names pass through unchanged.
std::string elide_name(std::string_view name);

} // namespace asmnav
