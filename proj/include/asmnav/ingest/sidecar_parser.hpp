#pragma once

#include "asmnav/core/address_range.hpp"
#include "asmnav/core/model.hpp"
#include "asmnav/ingest/parse_result.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace asmnav::ingest {

struct LineRecord {
    std::string file;
    std::uint32_t line = 0;
    AddressRange range;

    bool operator==(const LineRecord&) const = default;
};

struct InlineRecord {
    std::string root_function;
    std::vector<std::uint32_t> path; // 1-based child indices from the root
    std::string callee_name;
    AddressRange range;
    std::optional<SourceLocation> call_site;

    bool operator==(const InlineRecord&) const = default;
};

struct VariableRecord {
    std::string name;
    std::string register_name;
    AddressRange range;

    bool operator==(const VariableRecord&) const = default;
};

struct CallRecord {
    std::string caller;
    std::string callee;
    Address site = 0;
    bool inlined = false;

    bool operator==(const CallRecord&) const = default;
};

struct DebugSidecar {
    std::vector<LineRecord> line_records;
    std::vector<InlineRecord> inline_records;
    std::vector<VariableRecord> variable_records;
    std::vector<CallRecord> call_records;

    bool operator==(const DebugSidecar&) const = default;
};

struct SidecarParse {
    DebugSidecar sidecar;
    std::vector<ParseIssue> errors;
    std::size_t skipped_lines = 0;
};

/// Line-oriented records, whitespace separated, '#' starts a comment line:
///
///   LINE file line start end
///   INLINE root path callee start end call_file call_line
///   VAR name register start end
///   CALL caller callee site inlined{0|1}
///
/// Fields containing spaces are double-quoted (backslash escapes '"' and '\').
/// Addresses are hex with or without 0x. An INLINE call site of "-" 0 means unknown.
SidecarParse parse_debug_sidecar(std::istream& input);
SidecarParse parse_debug_sidecar(std::string_view text);

/// Splits one record line into fields, honoring quotes. nullopt on an unterminated quote.
std::optional<std::vector<std::string>> tokenize_record(std::string_view line);

/// Quotes a field if it needs it, so that tokenize_record gives it back unchanged.
std::string quote_field(std::string_view field);

} // namespace asmnav::ingest
