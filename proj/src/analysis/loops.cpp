#include "asmnav/analysis/loops.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>

namespace asmnav::analysis {

LoopForest detect_loops(const Digraph& graph, const DominatorTree& dom)
{
    LoopForest forest;
    const auto n = graph.size();
    auto preds = graph.predecessors();

    std::map<NodeIndex, std::vector<NodeIndex>> tails_by_header;
    for (NodeIndex t = 0; t < n; ++t) {
        if (!dom.reachable(t))
            continue;
        for (auto h : graph.successors[t])
            if (dom.dominates(h, t))
                tails_by_header[h].push_back(t);
    }

    for (auto& [header, tails] : tails_by_header) {
        std::sort(tails.begin(), tails.end());
        tails.erase(std::unique(tails.begin(), tails.end()), tails.end());

        std::vector<bool> in_body(n, false);
        in_body[header] = true;
        std::vector<NodeIndex> work;
        for (auto t : tails)
            if (!in_body[t]) {
                in_body[t] = true;
                work.push_back(t);
            }
        while (!work.empty()) {
            auto v = work.back();
            work.pop_back();
            for (auto p : preds[v])
                if (!in_body[p] && dom.reachable(p)) {
                    in_body[p] = true;
                    work.push_back(p);
                }
        }

        NaturalLoop loop;
        loop.header = header;
        for (NodeIndex v = 0; v < n; ++v)
            if (in_body[v])
                loop.body.push_back(v);
        for (auto t : tails)
            loop.back_edges.emplace_back(t, header);
        forest.loops.push_back(std::move(loop));
    }

    // Largest first, so any enclosing loop precedes the loops it contains.
    std::stable_sort(forest.loops.begin(), forest.loops.end(),
                     [](const NaturalLoop& a, const NaturalLoop& b) { return a.body.size() > b.body.size(); });
    for (std::size_t i = 0; i < forest.loops.size(); ++i) {
        auto& inner = forest.loops[i];
        for (std::size_t j = i; j-- > 0;) {
            const auto& outer = forest.loops[j];
            if (outer.body.size() > inner.body.size() &&
                std::includes(outer.body.begin(), outer.body.end(), inner.body.begin(), inner.body.end())) {
                inner.parent = j;
                forest.loops[j].children.push_back(i);
                break;
            }
        }
    }

    // Retreating edges found by DFS that are not back edges mark irreducible regions.
    if (dom.entry() < n) {
        std::vector<std::uint8_t> state(n, 0); // 0 new, 1 on stack, 2 done
        std::vector<std::pair<NodeIndex, std::size_t>> stack{{dom.entry(), 0}};
        state[dom.entry()] = 1;
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            if (next < graph.successors[node].size()) {
                auto s = graph.successors[node][next++];
                if (state[s] == 0) {
                    state[s] = 1;
                    stack.emplace_back(s, 0);
                } else if (state[s] == 1 && !dom.dominates(s, node)) {
                    forest.irreducible_edges.emplace_back(node, s);
                }
            } else {
                state[node] = 2;
                stack.pop_back();
            }
        }
    }
    return forest;
}

std::vector<LoopNode> function_loops(const FunctionGraph& fg, const LoopForest& forest, FunctionId function,
                                     std::span<const BasicBlock> blocks)
{
    std::vector<LoopNode> out;
    out.reserve(forest.loops.size());
    for (const auto& loop : forest.loops) {
        LoopNode node;
        node.function_id = function;
        node.header_block = fg.blocks[loop.header];
        RangeList ranges;
        for (auto v : loop.body) {
            node.body_blocks.push_back(fg.blocks[v]);
            ranges.push_back(blocks[fg.blocks[v]].range);
        }
        node.ranges = range_union(ranges);
        if (loop.parent)
            node.parent = static_cast<LoopIndex>(*loop.parent);
        for (auto c : loop.children)
            node.children.push_back(static_cast<LoopIndex>(c));
        out.push_back(std::move(node));
    }
    for (auto& node : out) {
        node.depth = 1;
        for (auto p = node.parent; p; p = out[*p].parent)
            ++node.depth;
    }
    return out;
}

std::vector<LoopNode> assign_loop_ids(std::vector<LoopNode> loops, std::span<const BasicBlock> blocks,
                                      std::span<const FunctionRecord> functions)
{
    auto header_address = [&](const LoopNode& l) { return blocks[l.header_block].range.start; };
    auto by_header = [&](LoopIndex a, LoopIndex b) { return header_address(loops[a]) < header_address(loops[b]); };

    std::vector<LoopIndex> roots;
    for (LoopIndex i = 0; i < loops.size(); ++i)
        if (!loops[i].parent)
            roots.push_back(i);
    std::stable_sort(roots.begin(), roots.end(), [&](LoopIndex a, LoopIndex b) {
        return std::tuple(functions[loops[a].function_id].entry_address, header_address(loops[a])) <
               std::tuple(functions[loops[b].function_id].entry_address, header_address(loops[b]));
    });

    std::vector<LoopNode> out;
    out.reserve(loops.size());
    std::function<LoopIndex(LoopIndex, std::optional<LoopIndex>, std::string, std::uint32_t)> visit =
        [&](LoopIndex old, std::optional<LoopIndex> parent, std::string id, std::uint32_t depth) {
            auto here = static_cast<LoopIndex>(out.size());
            LoopNode node = loops[old];
            node.id = std::move(id);
            node.parent = parent;
            node.depth = depth;
            node.children.clear();
            out.push_back(std::move(node));

            auto kids = loops[old].children;
            std::stable_sort(kids.begin(), kids.end(), by_header);
            for (std::size_t j = 0; j < kids.size(); ++j) {
                auto child = visit(kids[j], here, out[here].id + "." + std::to_string(j + 1), depth + 1);
                out[here].children.push_back(child);
            }
            return here;
        };
    for (std::size_t k = 0; k < roots.size(); ++k)
        visit(roots[k], std::nullopt, "loop" + std::to_string(k + 1), 1);
    return out;
}

} // namespace asmnav::analysis
