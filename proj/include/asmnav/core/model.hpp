#pragma once

#include "asmnav/core/address_range.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace asmnav {

inline constexpr int kSchemaVersion = 1;

using BlockId = std::uint32_t;
using FunctionId = std::uint32_t;
using LoopIndex = std::uint32_t;   // position in ProgramModel::loops
using InlineIndex = std::uint32_t; // position in ProgramModel::inlines

struct SourceLocation {
    std::string file;
    std::uint32_t line = 0;

    auto operator<=>(const SourceLocation&) const = default;
};

/// Variable names attached to one register token. More than one name means the
/// debug data was ambiguous; the choice is left to the reader.
struct OperandAnnotation {
    std::string register_name;
    std::vector<std::string> names;

    bool ambiguous() const { return names.size() > 1; }
    bool operator==(const OperandAnnotation&) const = default;
};

struct Instruction {
    Address address = 0;
    std::uint32_t byte_length = 1;
    std::vector<std::uint8_t> raw_bytes;
    std::string mnemonic;
    std::string operand_text;
    // Operands with annotated registers written as "%reg<name>" or "%reg<a|b>".
    std::optional<std::string> annotated_operand_text;
    std::vector<OperandAnnotation> annotations;

    AddressRange range() const { return {address, address + byte_length}; }
    bool operator==(const Instruction&) const = default;
};

struct BasicBlock {
    BlockId id = 0;
    AddressRange range;
    std::optional<FunctionId> function_id;
    std::vector<Address> instruction_addresses;

    bool operator==(const BasicBlock&) const = default;
};

enum class EdgeKind { fallthrough, jump, branch_taken, call_return };

std::string_view to_string(EdgeKind kind);
std::optional<EdgeKind> edge_kind_from_string(std::string_view text);

struct CfgEdge {
    BlockId from = 0;
    BlockId to = 0;
    EdgeKind kind = EdgeKind::fallthrough;

    auto operator<=>(const CfgEdge&) const = default;
};

struct FunctionRecord {
    FunctionId id = 0;
    std::string name;
    Address entry_address = 0;
    RangeList ranges;
    std::string display_name;
    bool external = false; // placeholder created for an unknown call-graph endpoint

    bool operator==(const FunctionRecord&) const = default;
};

struct CallEdge {
    FunctionId caller = 0;
    FunctionId callee = 0;
    bool inlined = false;

    auto operator<=>(const CallEdge&) const = default;
};

struct LoopNode {
    std::string id; // "loop3", "loop3.1", ...
    FunctionId function_id = 0;
    BlockId header_block = 0;
    std::vector<BlockId> body_blocks; // sorted
    RangeList ranges;
    std::optional<LoopIndex> parent;
    std::vector<LoopIndex> children;
    std::uint32_t depth = 1;

    bool operator==(const LoopNode&) const = default;
};

struct InlineNode {
    std::string id; // "<function id>" for roots, "<function id>/1/2" for descendants
    FunctionId root_function = 0;
    std::string callee_name;
    RangeList ranges;
    std::optional<SourceLocation> call_site;
    std::optional<InlineIndex> parent;
    std::vector<InlineIndex> children;
    std::uint32_t depth = 0; // roots are 0
    bool orphan = false;     // some range escapes the root function

    bool operator==(const InlineNode&) const = default;
};

struct LineMapping {
    std::string file;
    std::uint32_t line = 0;
    RangeList ranges;

    bool operator==(const LineMapping&) const = default;
};

/// Many-to-many association between source lines and address ranges. The
/// forward table is canonical; the inverse is derived from it on construction.
class LineMap {
public:
    LineMap() = default;
    explicit LineMap(std::vector<LineMapping> mappings);

    const std::vector<LineMapping>& mappings() const { return mappings_; }
    const LineMapping* find(std::string_view file, std::uint32_t line) const;

    /// Indices into mappings() of every line whose ranges cover `address`.
    std::vector<std::uint32_t> mappings_at(Address address) const;
    std::vector<SourceLocation> lines_at(Address address) const;

    bool operator==(const LineMap& other) const { return mappings_ == other.mappings_; }

private:
    struct Segment {
        AddressRange range;
        std::vector<std::uint32_t> mappings;
    };
    std::vector<LineMapping> mappings_; // sorted by (file, line), one entry per line
    std::vector<Segment> segments_;     // disjoint, sorted
};

struct VariableLocation {
    std::string variable_name;
    std::string register_name;
    AddressRange live_range;
    bool ambiguous = false; // overlaps another variable in the same register

    bool operator==(const VariableLocation&) const = default;
};

struct Diagnostic {
    std::string kind;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

struct DanglingEdge {
    BlockId from = 0;
    Address target = 0;

    bool operator==(const DanglingEdge&) const = default;
};

struct Diagnostics {
    std::vector<Diagnostic> parse_errors;
    std::vector<Diagnostic> warnings;
    std::vector<std::pair<BlockId, BlockId>> irreducible_edges;
    std::vector<DanglingEdge> dangling_edges;
    std::vector<BlockId> unreachable_blocks;

    bool operator==(const Diagnostics&) const = default;
};

/// Everything derived from one analysis run. Built once, then only read.
struct ProgramModel {
    std::string isa = "x86-64";
    std::vector<Instruction> instructions; // sorted by address, non-overlapping
    std::vector<BasicBlock> blocks;        // blocks[i].id == i, sorted by address
    std::vector<CfgEdge> cfg_edges;
    std::vector<FunctionRecord> functions; // functions[i].id == i
    std::vector<CallEdge> call_edges;
    std::vector<LoopNode> loops;     // parents precede children
    std::vector<InlineNode> inlines; // parents precede children
    LineMap line_map;
    std::vector<VariableLocation> variables;
    std::map<std::string, std::vector<std::string>> sources;
    Diagnostics diagnostics;

    const Instruction* instruction_at(Address address) const;
    /// Instructions whose byte span overlaps `range`.
    std::span<const Instruction> instructions_in(AddressRange range) const;
    const BasicBlock* block_at(Address address) const;

    std::optional<FunctionId> function_by_name(std::string_view name) const;
    std::optional<LoopIndex> loop_by_id(std::string_view id) const;
    std::optional<InlineIndex> inline_by_id(std::string_view id) const;

    bool operator==(const ProgramModel&) const = default;
};

using ModelPtr = std::shared_ptr<const ProgramModel>;

} // namespace asmnav
