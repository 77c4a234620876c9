#pragma once

#include "asmnav/analysis/isa.hpp"
#include "asmnav/core/model.hpp"

#include <span>
#include <vector>

namespace asmnav::analysis {

/// Splits a sorted instruction list into basic blocks.
///
/// Leaders are the first instruction, every in-listing transfer target, every
/// instruction after a transfer, every address in `extra_leaders` (function
/// entries), and every instruction that does not start where its predecessor
/// ends. Block ids are dense in address order; function_id is left unset.
std::vector<BasicBlock> partition_blocks(std::span<const Instruction> instructions,
                                         const TransferClassifier& classify,
                                         std::span<const Address> extra_leaders = {});

struct CfgResult {
    std::vector<CfgEdge> edges;
    std::vector<DanglingEdge> dangling; // direct targets that are not instruction starts
};

/// Intraprocedural edges from each block's final instruction: jump -> target,
/// branch -> target + fallthrough, call -> call_return to the next block,
/// return -> nothing, anything else -> fallthrough. Fallthrough-style edges
/// only exist when the next block starts exactly where this one ends.
CfgResult build_cfg(std::span<const BasicBlock> blocks, std::span<const Instruction> instructions,
                    const TransferClassifier& classify);

} // namespace asmnav::analysis
