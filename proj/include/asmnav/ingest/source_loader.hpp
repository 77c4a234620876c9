#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace asmnav::ingest {

using SourceLines = std::vector<std::string>;

/// Reads a source file into lines with "\n" and "\r\n" terminators removed.
/// A missing or unreadable file yields nullopt, never an error.
std::optional<SourceLines> load_source(const std::filesystem::path& file);

SourceLines split_lines(std::string_view text);

/// Looks up each debug-info file name under `root`, then by basename under
/// `root`, then as given. Files that cannot be found are left out of the result.
std::map<std::string, SourceLines> load_sources(const std::set<std::string>& files,
                                                const std::optional<std::filesystem::path>& root);

} // namespace asmnav::ingest
