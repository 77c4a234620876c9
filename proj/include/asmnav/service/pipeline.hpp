#pragma once

#include "asmnav/analysis/isa.hpp"
#include "asmnav/core/model.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace asmnav::service {

/// An input file exists but cannot be read, or the output cannot be written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AnalyzeOptions {
    std::filesystem::path disassembly;
    std::optional<std::filesystem::path> sidecar;
    std::optional<std::filesystem::path> source_root;
    std::string isa = "x86-64";
};

struct AnalyzeResult {
    ProgramModel model;
    std::vector<std::string> warnings; // tool-level notes such as a missing sidecar
};

/// Reads the inputs and runs the full analysis. Throws IoError when the
/// disassembly or a named sidecar cannot be read.
AnalyzeResult analyze_files(const AnalyzeOptions& options);

/// One "key: value" line per count, in a fixed order.
std::string format_summary(const ProgramModel& model);

} // namespace asmnav::service
