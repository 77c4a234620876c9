#pragma once

#include "asmnav/analysis/isa.hpp"
#include "asmnav/core/model.hpp"
#include "asmnav/ingest/disassembly_parser.hpp"
#include "asmnav/ingest/sidecar_parser.hpp"

#include <map>
#include <string>
#include <vector>

namespace asmnav::analysis {

struct AnalysisInput {
    ingest::ParseResult<ingest::RawDisassemblyLine> disassembly;
    ingest::SidecarParse sidecar;
    std::map<std::string, std::vector<std::string>> sources;
};

/// Runs the whole structure analysis and returns the finished model.
ProgramModel build_model(const AnalysisInput& input, const IsaTable& isa = x86_64_isa());

/// Convenience for tests and tools: parses both texts, then builds.
ProgramModel build_model_from_text(std::string_view disassembly, std::string_view sidecar,
                                   const IsaTable& isa = x86_64_isa());

/// Graphviz rendering of one function's CFG; nodes are labeled with block id
/// and the function's display name.
std::string cfg_to_dot(const ProgramModel& model, FunctionId function);

} // namespace asmnav::analysis
