#pragma once

#include "asmnav/core/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace asmnav::testing {

struct Fixture {
    std::string name;
    std::filesystem::path disassembly;
    std::optional<std::filesystem::path> sidecar;
    std::optional<std::filesystem::path> source_root;
    std::string isa;
};

std::filesystem::path fixture_dir();
const std::vector<Fixture>& all_fixtures();
const Fixture& fixture(std::string_view name);

/// Analyzed once per process and shared.
ModelPtr fixture_model(std::string_view name);

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

std::string read_text(const std::filesystem::path& path);

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs the asmnav executable with `args`, capturing both output streams.
CommandResult run_cli(const std::vector<std::string>& args, const std::vector<std::string>& env = {});

/// The canonical dump of a fixture, written by the CLI under `dir`.
std::filesystem::path cli_dump(const Fixture& f, const TempDir& dir);

} // namespace asmnav::testing
