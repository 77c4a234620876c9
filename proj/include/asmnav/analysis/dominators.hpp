#pragma once

#include "asmnav/core/model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace asmnav::analysis {

using NodeIndex = std::uint32_t;

/// Dense adjacency-list digraph; the unit the dominator and loop passes run on.
struct Digraph {
    std::vector<std::vector<NodeIndex>> successors;

    explicit Digraph(std::size_t nodes = 0) : successors(nodes) {}
    std::size_t size() const { return successors.size(); }
    void add_edge(NodeIndex from, NodeIndex to) { successors[from].push_back(to); }
    std::vector<std::vector<NodeIndex>> predecessors() const;
};

/// Immediate dominators of every node reachable from `entry`. The entry is its
/// own idom; unreachable nodes have none.
class DominatorTree {
public:
    DominatorTree(const Digraph& graph, NodeIndex entry);

    NodeIndex entry() const { return entry_; }
    bool reachable(NodeIndex n) const { return idom_[n].has_value(); }
    std::optional<NodeIndex> idom(NodeIndex n) const { return idom_[n]; }
    /// Reflexive: every reachable node dominates itself.
    bool dominates(NodeIndex a, NodeIndex b) const;
    std::size_t size() const { return idom_.size(); }

private:
    NodeIndex entry_;
    std::vector<std::optional<NodeIndex>> idom_;
    std::vector<std::uint32_t> pre_, post_; // dominator-tree DFS intervals
};

/// Block-level view of one function's dominators.
struct DominatorInfo {
    BlockId entry = 0;
    std::map<BlockId, BlockId> idom; // entry maps to itself
    std::vector<BlockId> unreachable;
};

/// Restricts the CFG to `function_blocks` (edges leaving the set are ignored)
/// and computes dominators from `entry`.
DominatorInfo compute_dominators(std::span<const BlockId> function_blocks, std::span<const CfgEdge> edges,
                                 BlockId entry);

/// The function-local graph behind compute_dominators, with the id mapping.
struct FunctionGraph {
    Digraph graph;
    std::vector<BlockId> blocks; // local index -> block id, sorted
    std::map<BlockId, NodeIndex> local;

    FunctionGraph(std::span<const BlockId> function_blocks, std::span<const CfgEdge> edges);
};

} // namespace asmnav::analysis
