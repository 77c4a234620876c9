#include "asmnav/core/names.hpp"

namespace asmnav {

static_assert(kElisionHead + kElisionMarker.size() + kElisionTail == kMaxDisplayNameLength);

std::string elide_name(std::string_view name)
{
    if (name.size() <= kMaxDisplayNameLength)
        return std::string(name);
    std::string out;
    out.reserve(kMaxDisplayNameLength);
    out.append(name.substr(0, kElisionHead));
    out.append(kElisionMarker);
    out.append(name.substr(name.size() - kElisionTail));
    return out;
}

} // namespace asmnav
