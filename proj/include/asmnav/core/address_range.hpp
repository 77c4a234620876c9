#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace asmnav {

using Address = std::uint64_t;

/// Half-open span [start, end) of instruction addresses.
struct AddressRange {
    Address start = 0;
    Address end = 0;

    constexpr bool valid() const noexcept { return start < end; }
    constexpr Address length() const noexcept { return end - start; }
    constexpr bool contains(Address a) const noexcept { return start <= a && a < end; }
    constexpr bool contains(const AddressRange& r) const noexcept
    {
        return start <= r.start && r.end <= end;
    }
    constexpr bool overlaps(const AddressRange& r) const noexcept
    {
        return start < r.end && r.start < end;
    }

    auto operator<=>(const AddressRange&) const = default;
};

/// Throws std::invalid_argument unless start < end.
AddressRange make_range(Address start, Address end);

/// Returns nullopt instead of throwing.
std::optional<AddressRange> try_make_range(Address start, Address end) noexcept;

using RangeList = std::vector<AddressRange>;

/// Minimal sorted list of disjoint ranges covering exactly the union of the input.
/// Touching ranges ([a,b) and [b,c)) merge.
RangeList range_union(std::span<const AddressRange> ranges);

/// True if any range of `a` overlaps any range of `b`. Both must be normalized.
bool ranges_overlap(std::span<const AddressRange> a, std::span<const AddressRange> b);

/// True if every range of `inner` lies inside the union of `outer` (normalized).
bool ranges_contained(std::span<const AddressRange> inner, std::span<const AddressRange> outer);

/// Total number of addresses covered. Input must be normalized.
std::uint64_t ranges_measure(std::span<const AddressRange> ranges);

std::string format_address(Address a);
std::optional<Address> parse_address(std::string_view text);

} // namespace asmnav
