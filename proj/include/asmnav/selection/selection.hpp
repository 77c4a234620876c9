#pragma once

#include "asmnav/core/model.hpp"
#include "asmnav/selection/index.hpp"

#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace asmnav::selection {

/// The origin names something that does not exist in the model. Distinct from
/// an empty resolution, which is a legal answer.
class UnknownEntity : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LineOrigin {
    std::string file;
    std::uint32_t first_line = 0;
    std::uint32_t last_line = 0; // inclusive

    bool operator==(const LineOrigin&) const = default;
};
struct RangeOrigin {
    RangeList ranges;
    bool operator==(const RangeOrigin&) const = default;
};
struct BlockOrigin {
    std::vector<BlockId> blocks;
    bool operator==(const BlockOrigin&) const = default;
};
struct LoopOrigin {
    LoopIndex loop = 0;
    bool operator==(const LoopOrigin&) const = default;
};
struct FunctionOrigin {
    FunctionId function = 0;
    bool operator==(const FunctionOrigin&) const = default;
};
struct InlineOrigin {
    InlineIndex node = 0;
    bool operator==(const InlineOrigin&) const = default;
};

using Origin = std::variant<LineOrigin, RangeOrigin, BlockOrigin, LoopOrigin, FunctionOrigin, InlineOrigin>;

struct Selection {
    Origin origin;
    RangeList ranges; // normalized
};

/// Validates the origin and expands it to its address ranges.
Selection make_selection(const ProgramModel& model, Origin origin);

struct ResolvedSelection {
    RangeList ranges;
    std::set<SourceLocation> source_lines;
    std::set<Address> instructions;
    std::set<BlockId> blocks;
    std::set<LoopIndex> loops;
    std::set<FunctionId> functions;
    std::set<InlineIndex> inline_nodes;

    bool empty() const
    {
        return source_lines.empty() && instructions.empty() && blocks.empty() && loops.empty() &&
               functions.empty() && inline_nodes.empty();
    }
    bool operator==(const ResolvedSelection&) const = default;
};

/// Every entity whose ranges overlap the selection, per class. The origin is
/// included in its own class whenever it covers any address.
ResolvedSelection resolve(const Selection& selection, const ProgramModel& model, const IntervalIndex& index);

inline constexpr unsigned kDefaultHops = 3;

struct Subgraph {
    std::vector<BlockId> blocks; // sorted
    std::vector<CfgEdge> edges;  // induced, in model order
    bool operator==(const Subgraph&) const = default;
};

/// Blocks within `hops` undirected CFG edges of any seed, plus the full body of
/// every loop containing a seed (when `expand_loops`), with induced edges.
Subgraph cfg_neighborhood(std::span<const BlockId> seeds, unsigned hops, const ProgramModel& model,
                          bool expand_loops = true);

/// Case-insensitive substring search over full function names. Exact matches
/// rank before prefix matches before other substrings; ties go by entry
/// address, then id. An empty query matches nothing.
std::vector<FunctionId> search_functions(std::string_view query, const ProgramModel& model, std::size_t limit);

} // namespace asmnav::selection
