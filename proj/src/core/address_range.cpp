#include "asmnav/core/address_range.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace asmnav {

AddressRange make_range(Address start, Address end)
{
    if (start >= end)
        throw std::invalid_argument("address range start must precede end: [" + format_address(start) +
                                    ", " + format_address(end) + ")");
    return {start, end};
}

std::optional<AddressRange> try_make_range(Address start, Address end) noexcept
{
    if (start >= end)
        return std::nullopt;
    return AddressRange{start, end};
}

RangeList range_union(std::span<const AddressRange> ranges)
{
    RangeList sorted(ranges.begin(), ranges.end());
    std::sort(sorted.begin(), sorted.end());

    RangeList out;
    for (const auto& r : sorted) {
        if (!r.valid())
            continue;
        if (!out.empty() && r.start <= out.back().end)
            out.back().end = std::max(out.back().end, r.end);
        else
            out.push_back(r);
    }
    return out;
}

bool ranges_overlap(std::span<const AddressRange> a, std::span<const AddressRange> b)
{
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].overlaps(b[j]))
            return true;
        if (a[i].end <= b[j].end)
            ++i;
        else
            ++j;
    }
    return false;
}

bool ranges_contained(std::span<const AddressRange> inner, std::span<const AddressRange> outer)
{
    for (const auto& r : inner) {
        auto it = std::upper_bound(outer.begin(), outer.end(), r.start,
                                   [](Address a, const AddressRange& o) { return a < o.start; });
        if (it == outer.begin())
            return false;
        if (!std::prev(it)->contains(r))
            return false;
    }
    return true;
}

std::uint64_t ranges_measure(std::span<const AddressRange> ranges)
{
    std::uint64_t total = 0;
    for (const auto& r : ranges)
        total += r.length();
    return total;
}

std::string format_address(Address a)
{
    char buf[2 + 16 + 1];
    buf[0] = '0';
    buf[1] = 'x';
    auto [p, ec] = std::to_chars(buf + 2, buf + sizeof(buf), a, 16);
    return std::string(buf, p);
}

std::optional<Address> parse_address(std::string_view text)
{
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X'))
        text.remove_prefix(2);
    if (text.empty())
        return std::nullopt;
    Address value = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 16);
    if (ec != std::errc{} || p != text.data() + text.size())
        return std::nullopt;
    return value;
}

} // namespace asmnav
