#pragma once

#include "asmnav/analysis/dominators.hpp"
#include "asmnav/core/model.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace asmnav::analysis {

struct NaturalLoop {
    NodeIndex header = 0;
    std::vector<NodeIndex> body; // sorted, contains header
    std::vector<std::pair<NodeIndex, NodeIndex>> back_edges;
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;
};

struct LoopForest {
    std::vector<NaturalLoop> loops; // parents precede children
    /// Retreating edges whose target does not dominate the source.
    std::vector<std::pair<NodeIndex, NodeIndex>> irreducible_edges;
};

/// Natural loops of the reachable part of `graph`. Back edges sharing a header
/// form one loop; nesting follows strict body containment.
LoopForest detect_loops(const Digraph& graph, const DominatorTree& dominators);

/// Turns one function's loop forest into model loop nodes (ids left empty,
/// parent/children indices local to the returned vector).
std::vector<LoopNode> function_loops(const FunctionGraph& fg, const LoopForest& forest, FunctionId function,
                                     std::span<const BasicBlock> blocks);

/// Orders loops for the whole program and names them: top-level loops are
/// "loopK" numbered by (function entry, header address); child j of "X" is
/// "X.j" numbered by header address. Returns loops in preorder with indices
/// rewritten.
std::vector<LoopNode> assign_loop_ids(std::vector<LoopNode> loops, std::span<const BasicBlock> blocks,
                                      std::span<const FunctionRecord> functions);

} // namespace asmnav::analysis
