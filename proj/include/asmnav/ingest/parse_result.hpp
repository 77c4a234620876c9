#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace asmnav::ingest {

struct ParseIssue {
    std::size_t line_no = 0; // 1-based
    std::string message;
    std::string text; // offending input line, verbatim

    bool operator==(const ParseIssue&) const = default;
};

/// Parsers never abort: well-formed records come back alongside every issue found.
template <class Record>
struct ParseResult {
    std::vector<Record> records;
    std::vector<ParseIssue> errors;
    std::vector<ParseIssue> warnings;
    std::size_t skipped_lines = 0; // lines that are not records (blank, headers, comments)
};

} // namespace asmnav::ingest
