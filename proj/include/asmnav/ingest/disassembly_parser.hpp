#pragma once

#include "asmnav/core/address_range.hpp"
#include "asmnav/ingest/parse_result.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace asmnav::ingest {

struct RawDisassemblyLine {
    Address address = 0;
    std::vector<std::uint8_t> raw_bytes;
    std::string mnemonic;
    std::string operand_text;
    std::optional<std::string> symbol_context;
    std::size_t line_no = 0;

    bool operator==(const RawDisassemblyLine&) const = default;
};

/// Parses objdump-style listings.
///
/// Symbol headers ("0000000000401130 <main>:") set the context for the
/// instructions that follow; section headers clear it. Instruction lines look
/// like "  401136:\t48 89 e5\tmov    %rsp,%rbp"; the byte column is optional and
/// trailing "# ..." comments are dropped. A line holding only bytes continues
/// the previous instruction (objdump wraps encodings longer than 7 bytes).
ParseResult<RawDisassemblyLine> parse_disassembly_text(std::istream& input);
ParseResult<RawDisassemblyLine> parse_disassembly_text(std::string_view text);

} // namespace asmnav::ingest
