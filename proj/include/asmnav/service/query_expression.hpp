#pragma once

#include "asmnav/service/navigator.hpp"

#include <string_view>

namespace asmnav::service {

/// Evaluates one command-line query against `nav`. Grammar:
///
///   summary
///   sources | source <file>
///   loops [<function>] | inlining | callgraph
///   resolve line <file>:<n>[-<m>]
///   resolve loop <id> | resolve inline <id> | resolve function <name-or-id>
///   resolve block <ids> | resolve range <start>-<end>[,...]
///   neighborhood <ids> [k=<k>]
///   search <text>
///
/// The result is the same JSON the matching REST endpoint returns. Throws
/// BadRequest on syntax errors and selection::UnknownEntity on unknown names.
json evaluate_query(const Navigator& nav, std::string_view expression);

/// Every expression the CLI understands for `model`, one per kind and entity.
std::vector<std::string> enumerate_queries(const ProgramModel& model);

} // namespace asmnav::service
