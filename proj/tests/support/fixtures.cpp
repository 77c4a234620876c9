#include "fixtures.hpp"

#include "asmnav/service/pipeline.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>

#include <sys/wait.h>

namespace asmnav::testing {

std::filesystem::path fixture_dir() { return ASMNAV_FIXTURE_DIR; }

const std::vector<Fixture>& all_fixtures()
{
    static const std::vector<Fixture> fixtures = [] {
        auto d = fixture_dir();
        std::vector<Fixture> out{
            {"ltimes", d / "ltimes/ltimes.objdump", d / "ltimes/ltimes.dbg", d / "ltimes", "x86-64"},
            {"real", d / "real/kernels.objdump", d / "real/kernels.dbg", d / "real", "x86-64"},
        };
        for (const char* toy : {"diamond", "nested", "irreducible", "shared_header", "calls"})
            out.push_back({std::string("toy/") + toy, d / "toy" / (std::string(toy) + ".objdump"),
                           d / "toy" / (std::string(toy) + ".dbg"), d / "toy", "toy"});
        out.push_back({"toy/empty", d / "toy/empty.objdump", std::nullopt, std::nullopt, "toy"});
        out.push_back({"toy/malformed", d / "toy/malformed.objdump", std::nullopt, std::nullopt, "toy"});
        return out;
    }();
    return fixtures;
}

const Fixture& fixture(std::string_view name)
{
    for (const auto& f : all_fixtures())
        if (f.name == name)
            return f;
    throw std::invalid_argument("no fixture named " + std::string(name));
}

ModelPtr fixture_model(std::string_view name)
{
    static std::mutex mutex;
    static std::map<std::string, ModelPtr, std::less<>> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(name); it != cache.end())
        return it->second;
    const auto& f = fixture(name);
    auto result = service::analyze_files({f.disassembly, f.sidecar, f.source_root, f.isa});
    auto model = std::make_shared<const ProgramModel>(std::move(result.model));
    cache.emplace(std::string(name), model);
    return model;
}

TempDir::TempDir()
{
    std::random_device rd;
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto p = std::filesystem::temp_directory_path() / ("asmnav-test-" + std::to_string(rd()));
        if (std::filesystem::create_directory(p)) {
            path_ = p;
            return;
        }
    }
    throw std::runtime_error("cannot create a temp directory");
}

TempDir::~TempDir()
{
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

std::string shell_quote(std::string_view s)
{
    std::string out = "'";
    for (char c : s)
        out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

} // namespace

CommandResult run_cli(const std::vector<std::string>& args, const std::vector<std::string>& env)
{
    TempDir dir;
    std::string cmd;
    for (const auto& e : env)
        cmd += shell_quote(e) + " ";
    cmd += shell_quote(ASMNAV_CLI_PATH);
    for (const auto& a : args)
        cmd += " " + shell_quote(a);
    cmd += " >" + shell_quote((dir / "out").string()) + " 2>" + shell_quote((dir / "err").string());
    if (!env.empty())
        cmd = "env " + cmd;
    int status = std::system(cmd.c_str());
    CommandResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text(dir / "out");
    r.err = read_text(dir / "err");
    return r;
}

std::filesystem::path cli_dump(const Fixture& f, const TempDir& dir)
{
    auto out = dir / (f.name.substr(f.name.rfind('/') + 1) + ".json");
    std::vector<std::string> args{"analyze", "--disasm", f.disassembly.string(), "--isa", f.isa, "--out", out.string()};
    if (f.sidecar)
        args.insert(args.end(), {"--sidecar", f.sidecar->string()});
    if (f.source_root)
        args.insert(args.end(), {"--src", f.source_root->string()});
    auto r = run_cli(args);
    if (r.exit_code != 0)
        throw std::runtime_error("analyze failed for " + f.name + ": " + r.err);
    return out;
}

} // namespace asmnav::testing
