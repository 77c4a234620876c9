#include "asmnav/analysis/dominators.hpp"

#include <algorithm>
#include <utility>

namespace asmnav::analysis {

std::vector<std::vector<NodeIndex>> Digraph::predecessors() const
{
    std::vector<std::vector<NodeIndex>> preds(size());
    for (NodeIndex n = 0; n < size(); ++n)
        for (auto s : successors[n])
            preds[s].push_back(n);
    return preds;
}

// Iterative data-flow formulation (Cooper, Harvey & Kennedy) over reverse postorder.
DominatorTree::DominatorTree(const Digraph& graph, NodeIndex entry)
    : entry_(entry), idom_(graph.size()), pre_(graph.size()), post_(graph.size())
{
    const auto n = graph.size();
    if (entry >= n)
        return;

    constexpr auto kNone = static_cast<std::uint32_t>(-1);
    std::vector<std::uint32_t> rpo_number(n, kNone);
    std::vector<NodeIndex> postorder;
    postorder.reserve(n);
    {
        std::vector<bool> seen(n, false);
        std::vector<std::pair<NodeIndex, std::size_t>> stack{{entry, 0}};
        seen[entry] = true;
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            if (next < graph.successors[node].size()) {
                auto s = graph.successors[node][next++];
                if (!seen[s]) {
                    seen[s] = true;
                    stack.emplace_back(s, 0);
                }
            } else {
                postorder.push_back(node);
                stack.pop_back();
            }
        }
    }
    std::vector<NodeIndex> rpo(postorder.rbegin(), postorder.rend());
    for (std::uint32_t i = 0; i < rpo.size(); ++i)
        rpo_number[rpo[i]] = i;

    auto preds = graph.predecessors();
    std::vector<std::uint32_t> doms(n, kNone); // indexed by node, holds node index
    doms[entry] = entry;

    auto intersect = [&](NodeIndex a, NodeIndex b) {
        while (a != b) {
            while (rpo_number[a] > rpo_number[b])
                a = doms[a];
            while (rpo_number[b] > rpo_number[a])
                b = doms[b];
        }
        return a;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 1; i < rpo.size(); ++i) {
            auto b = rpo[i];
            std::uint32_t new_idom = kNone;
            for (auto p : preds[b]) {
                if (doms[p] == kNone)
                    continue;
                new_idom = new_idom == kNone ? p : intersect(p, new_idom);
            }
            if (new_idom != kNone && doms[b] != new_idom) {
                doms[b] = new_idom;
                changed = true;
            }
        }
    }

    std::vector<std::vector<NodeIndex>> children(n);
    for (NodeIndex v = 0; v < n; ++v) {
        if (doms[v] == kNone)
            continue;
        idom_[v] = doms[v];
        if (v != entry)
            children[doms[v]].push_back(v);
    }

    // Pre/post numbering of the dominator tree answers dominates() in O(1).
    std::uint32_t clock = 0;
    std::vector<std::pair<NodeIndex, std::size_t>> stack{{entry, 0}};
    pre_[entry] = clock++;
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < children[node].size()) {
            auto c = children[node][next++];
            pre_[c] = clock++;
            stack.emplace_back(c, 0);
        } else {
            post_[node] = clock++;
            stack.pop_back();
        }
    }
}

bool DominatorTree::dominates(NodeIndex a, NodeIndex b) const
{
    if (!reachable(a) || !reachable(b))
        return false;
    return pre_[a] <= pre_[b] && post_[b] <= post_[a];
}

FunctionGraph::FunctionGraph(std::span<const BlockId> function_blocks, std::span<const CfgEdge> edges)
    : blocks(function_blocks.begin(), function_blocks.end())
{
    std::sort(blocks.begin(), blocks.end());
    blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
    for (NodeIndex i = 0; i < blocks.size(); ++i)
        local.emplace(blocks[i], i);
    graph = Digraph(blocks.size());
    for (const auto& e : edges) {
        auto from = local.find(e.from);
        auto to = local.find(e.to);
        if (from != local.end() && to != local.end())
            graph.add_edge(from->second, to->second);
    }
}

DominatorInfo compute_dominators(std::span<const BlockId> function_blocks, std::span<const CfgEdge> edges,
                                 BlockId entry)
{
    FunctionGraph fg(function_blocks, edges);
    DominatorInfo info;
    info.entry = entry;
    auto it = fg.local.find(entry);
    if (it == fg.local.end()) {
        info.unreachable = fg.blocks;
        return info;
    }
    DominatorTree tree(fg.graph, it->second);
    for (NodeIndex v = 0; v < fg.blocks.size(); ++v) {
        if (auto d = tree.idom(v))
            info.idom.emplace(fg.blocks[v], fg.blocks[*d]);
        else
            info.unreachable.push_back(fg.blocks[v]);
    }
    return info;
}

} // namespace asmnav::analysis
