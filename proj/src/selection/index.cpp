#include "asmnav/selection/index.hpp"

namespace asmnav::selection {

IntervalIndex IntervalIndex::build(const ProgramModel& model)
{
    IntervalIndex index;
    const auto& lines = model.line_map.mappings();
    for (std::uint32_t i = 0; i < lines.size(); ++i)
        for (const auto& r : lines[i].ranges)
            index.lines.insert(r, i);
    for (const auto& b : model.blocks)
        index.blocks.insert(b.range, b.id);
    for (const auto& f : model.functions)
        for (const auto& r : f.ranges)
            index.functions.insert(r, f.id);
    for (LoopIndex i = 0; i < model.loops.size(); ++i)
        for (const auto& r : model.loops[i].ranges)
            index.loops.insert(r, i);
    for (InlineIndex i = 0; i < model.inlines.size(); ++i)
        for (const auto& r : model.inlines[i].ranges)
            index.inlines.insert(r, i);

    index.lines.freeze();
    index.blocks.freeze();
    index.functions.freeze();
    index.loops.freeze();
    index.inlines.freeze();
    return index;
}

} // namespace asmnav::selection
