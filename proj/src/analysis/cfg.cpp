#include "asmnav/analysis/cfg.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace asmnav::analysis {

std::vector<BasicBlock> partition_blocks(std::span<const Instruction> instructions,
                                         const TransferClassifier& classify,
                                         std::span<const Address> extra_leaders)
{
    std::vector<BasicBlock> blocks;
    if (instructions.empty())
        return blocks;

    std::unordered_set<Address> starts;
    for (const auto& i : instructions)
        starts.insert(i.address);

    std::unordered_set<Address> leaders(extra_leaders.begin(), extra_leaders.end());
    leaders.insert(instructions.front().address);
    for (std::size_t k = 0; k < instructions.size(); ++k) {
        auto t = classify(instructions[k]);
        if (!t.is_transfer())
            continue;
        if (t.target && starts.count(*t.target))
            leaders.insert(*t.target);
        if (k + 1 < instructions.size())
            leaders.insert(instructions[k + 1].address);
    }

    for (std::size_t k = 0; k < instructions.size(); ++k) {
        const auto& ins = instructions[k];
        bool gap = k > 0 && instructions[k - 1].range().end != ins.address;
        if (blocks.empty() || gap || leaders.count(ins.address)) {
            BasicBlock b;
            b.id = static_cast<BlockId>(blocks.size());
            b.range = ins.range();
            blocks.push_back(std::move(b));
        }
        auto& b = blocks.back();
        b.range.end = ins.range().end;
        b.instruction_addresses.push_back(ins.address);
    }
    return blocks;
}

CfgResult build_cfg(std::span<const BasicBlock> blocks, std::span<const Instruction> instructions,
                    const TransferClassifier& classify)
{
    std::unordered_map<Address, BlockId> block_by_start;
    for (const auto& b : blocks)
        block_by_start.emplace(b.range.start, b.id);
    std::unordered_map<Address, const Instruction*> by_address;
    for (const auto& i : instructions)
        by_address.emplace(i.address, &i);

    CfgResult out;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto& b = blocks[k];
        std::optional<BlockId> next;
        if (k + 1 < blocks.size() && blocks[k + 1].range.start == b.range.end)
            next = blocks[k + 1].id;

        auto last = by_address.find(b.instruction_addresses.back());
        auto t = last == by_address.end() ? ControlTransfer{} : classify(*last->second);

        auto to_target = [&](EdgeKind kind) {
            if (!t.target)
                return;
            if (auto it = block_by_start.find(*t.target); it != block_by_start.end())
                out.edges.push_back({b.id, it->second, kind});
            else
                out.dangling.push_back({b.id, *t.target});
        };

        switch (t.kind) {
        case TransferKind::jump:
            to_target(EdgeKind::jump);
            break;
        case TransferKind::branch:
            to_target(EdgeKind::branch_taken);
            if (next)
                out.edges.push_back({b.id, *next, EdgeKind::fallthrough});
            break;
        case TransferKind::call:
            if (next)
                out.edges.push_back({b.id, *next, EdgeKind::call_return});
            break;
        case TransferKind::ret:
            break;
        case TransferKind::none:
            if (next)
                out.edges.push_back({b.id, *next, EdgeKind::fallthrough});
            break;
        }
    }
    return out;
}

} // namespace asmnav::analysis
