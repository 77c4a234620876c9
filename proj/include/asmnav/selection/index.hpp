#pragma once

#include "asmnav/core/model.hpp"
#include "asmnav/selection/interval_tree.hpp"

#include <set>
#include <span>

namespace asmnav::selection {

/// One interval tree per linkable entity class, built once per model.
struct IntervalIndex {
    IntervalTree<std::uint32_t> lines; // index into LineMap::mappings()
    IntervalTree<BlockId> blocks;
    IntervalTree<FunctionId> functions;
    IntervalTree<LoopIndex> loops;
    IntervalTree<InlineIndex> inlines;

    static IntervalIndex build(const ProgramModel& model);
};

template <class Value>
std::set<Value> query_ranges(const IntervalTree<Value>& tree, std::span<const AddressRange> ranges)
{
    std::set<Value> out;
    for (const auto& r : ranges)
        tree.for_each_overlap(r, [&](const auto& e) { out.insert(e.value); });
    return out;
}

} // namespace asmnav::selection
