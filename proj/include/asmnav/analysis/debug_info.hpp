#pragma once

#include "asmnav/core/model.hpp"
#include "asmnav/ingest/sidecar_parser.hpp"

#include <span>
#include <string>
#include <vector>

namespace asmnav::analysis {

struct InlineForest {
    std::vector<InlineNode> nodes; // preorder; roots in function-id order
    std::vector<Diagnostic> problems;
};

/// One root per function with its inlined callees beneath, reconstructed from
/// the slash-separated child paths. Records naming an unknown root function
/// are reported as OrphanInline; records whose parent path is absent as
/// MissingInlineParent. Records sharing (root, path) contribute ranges to one node.
InlineForest build_inline_forest(std::span<const ingest::InlineRecord> records,
                                 std::span<const FunctionRecord> functions);

/// Deduplicated (caller, callee, inlined) edges in first-seen order. Unknown
/// names get placeholder function records flagged external, appended to `functions`.
std::vector<CallEdge> build_call_graph(std::span<const ingest::CallRecord> records,
                                       std::vector<FunctionRecord>& functions);

LineMap build_line_map(std::span<const ingest::LineRecord> records);

struct VariableAnnotation {
    std::vector<Instruction> instructions;
    std::vector<VariableLocation> locations;
};

/// Attaches variable names to register tokens whose address falls inside a
/// record's live range. Overlapping live ranges for different variables in one
/// register yield a multi-name annotation. Registers compare without the '%'
/// sigil. Instructions with no match keep annotated_operand_text empty.
VariableAnnotation annotate_variables(std::vector<Instruction> instructions,
                                      std::span<const ingest::VariableRecord> records);

/// Normalized register spelling: lower case, without a leading '%'.
std::string canonical_register(std::string_view name);

/// Rewrites each listed register token as "%reg<a|b>". Tokens not listed stay as they are.
std::string render_annotated_operands(std::string_view operands, std::span<const OperandAnnotation> annotations);

} // namespace asmnav::analysis
