#include "asmnav/core/model.hpp"

#include <algorithm>
#include <tuple>

namespace asmnav {

std::string_view to_string(EdgeKind kind)
{
    switch (kind) {
    case EdgeKind::fallthrough: return "fallthrough";
    case EdgeKind::jump: return "jump";
    case EdgeKind::branch_taken: return "branch_taken";
    case EdgeKind::call_return: return "call_return";
    }
    return "fallthrough";
}

std::optional<EdgeKind> edge_kind_from_string(std::string_view text)
{
    for (auto k : {EdgeKind::fallthrough, EdgeKind::jump, EdgeKind::branch_taken, EdgeKind::call_return})
        if (to_string(k) == text)
            return k;
    return std::nullopt;
}

LineMap::LineMap(std::vector<LineMapping> mappings)
{
    std::sort(mappings.begin(), mappings.end(), [](const LineMapping& a, const LineMapping& b) {
        return std::tie(a.file, a.line) < std::tie(b.file, b.line);
    });
    for (auto& m : mappings) {
        if (!mappings_.empty() && mappings_.back().file == m.file && mappings_.back().line == m.line) {
            auto& ranges = mappings_.back().ranges;
            ranges.insert(ranges.end(), m.ranges.begin(), m.ranges.end());
        } else {
            mappings_.push_back(std::move(m));
        }
    }
    for (auto& m : mappings_)
        m.ranges = range_union(m.ranges);

    // Split the address space at every range boundary and record which lines
    // cover each elementary piece.
    std::vector<Address> cuts;
    for (const auto& m : mappings_)
        for (const auto& r : m.ranges) {
            cuts.push_back(r.start);
            cuts.push_back(r.end);
        }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (cuts.size() < 2)
        return;

    std::vector<std::vector<std::uint32_t>> owners(cuts.size() - 1);
    for (std::uint32_t i = 0; i < mappings_.size(); ++i)
        for (const auto& r : mappings_[i].ranges) {
            auto first = std::lower_bound(cuts.begin(), cuts.end(), r.start) - cuts.begin();
            auto last = std::lower_bound(cuts.begin(), cuts.end(), r.end) - cuts.begin();
            for (auto s = first; s < last; ++s)
                owners[s].push_back(i);
        }
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        if (owners[s].empty())
            continue;
        AddressRange piece{cuts[s], cuts[s + 1]};
        if (!segments_.empty() && segments_.back().range.end == piece.start &&
            segments_.back().mappings == owners[s])
            segments_.back().range.end = piece.end;
        else
            segments_.push_back({piece, std::move(owners[s])});
    }
}

const LineMapping* LineMap::find(std::string_view file, std::uint32_t line) const
{
    auto it = std::lower_bound(mappings_.begin(), mappings_.end(), std::pair{file, line},
                               [](const LineMapping& m, const std::pair<std::string_view, std::uint32_t>& key) {
                                   return std::tie(m.file, m.line) < std::tie(key.first, key.second);
                               });
    if (it == mappings_.end() || it->file != file || it->line != line)
        return nullptr;
    return &*it;
}

std::vector<std::uint32_t> LineMap::mappings_at(Address address) const
{
    auto it = std::upper_bound(segments_.begin(), segments_.end(), address,
                               [](Address a, const Segment& s) { return a < s.range.start; });
    if (it == segments_.begin())
        return {};
    --it;
    if (!it->range.contains(address))
        return {};
    return it->mappings;
}

std::vector<SourceLocation> LineMap::lines_at(Address address) const
{
    std::vector<SourceLocation> out;
    for (auto i : mappings_at(address))
        out.push_back({mappings_[i].file, mappings_[i].line});
    return out;
}

const Instruction* ProgramModel::instruction_at(Address address) const
{
    auto it = std::lower_bound(instructions.begin(), instructions.end(), address,
                               [](const Instruction& i, Address a) { return i.address < a; });
    if (it == instructions.end() || it->address != address)
        return nullptr;
    return &*it;
}

std::span<const Instruction> ProgramModel::instructions_in(AddressRange range) const
{
    // Instructions do not overlap, so end addresses are sorted too.
    auto first = std::upper_bound(instructions.begin(), instructions.end(), range.start,
                                  [](Address a, const Instruction& i) { return a < i.range().end; });
    auto last = std::lower_bound(first, instructions.end(), range.end,
                                 [](const Instruction& i, Address a) { return i.address < a; });
    return {first, last};
}

const BasicBlock* ProgramModel::block_at(Address address) const
{
    auto it = std::upper_bound(blocks.begin(), blocks.end(), address,
                               [](Address a, const BasicBlock& b) { return a < b.range.start; });
    if (it == blocks.begin())
        return nullptr;
    --it;
    return it->range.contains(address) ? &*it : nullptr;
}

std::optional<FunctionId> ProgramModel::function_by_name(std::string_view name) const
{
    for (const auto& f : functions)
        if (f.name == name)
            return f.id;
    return std::nullopt;
}

std::optional<LoopIndex> ProgramModel::loop_by_id(std::string_view id) const
{
    for (LoopIndex i = 0; i < loops.size(); ++i)
        if (loops[i].id == id)
            return i;
    return std::nullopt;
}

std::optional<InlineIndex> ProgramModel::inline_by_id(std::string_view id) const
{
    for (InlineIndex i = 0; i < inlines.size(); ++i)
        if (inlines[i].id == id)
            return i;
    return std::nullopt;
}

} // namespace asmnav
