#include "asmnav/ingest/dump.hpp"
#include "asmnav/service/navigator.hpp"
#include "asmnav/service/query_expression.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <fstream>

using namespace asmnav;
using asmnav::testing::run_cli;
using nlohmann::json;

TEST_CASE("analyze writes a dump equal to the in-process model")
{
    testing::TempDir dir;
    const auto& f = testing::fixture("ltimes");
    auto path = testing::cli_dump(f, dir);
    CHECK(ingest::load_model(path) == *testing::fixture_model("ltimes"));
}

TEST_CASE("analyze prints counts")
{
    testing::TempDir dir;
    const auto& f = testing::fixture("toy/nested");
    auto r = run_cli({"analyze", "--disasm", f.disassembly.string(), "--sidecar", f.sidecar->string(), "--src",
                      f.source_root->string(), "--isa", "toy", "--out", (dir / "n.json").string()});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("instructions: 11\n") != std::string::npos);
    CHECK(r.out.find("loops: 2\n") != std::string::npos);
    CHECK(r.err == "warning: source file not found: axpy.h\n");
}

TEST_CASE("analyze without a sidecar warns and still succeeds")
{
    testing::TempDir dir;
    auto r = run_cli({"analyze", "--disasm", testing::fixture("toy/diamond").disassembly.string(), "--isa", "toy",
                      "--out", (dir / "d.json").string()});
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("warning: no debug sidecar") != std::string::npos);
    auto m = ingest::load_model(dir / "d.json");
    CHECK(m.blocks.size() == 4);
    CHECK(m.line_map.mappings().empty());
}

TEST_CASE("empty and malformed listings")
{
    testing::TempDir dir;
    auto empty = run_cli({"analyze", "--disasm", testing::fixture("toy/empty").disassembly.string(), "--isa", "toy",
                          "--out", (dir / "e.json").string()});
    CHECK(empty.exit_code == 0);
    CHECK(empty.out.find("instructions: 0\n") != std::string::npos);
    auto q = run_cli({"query", "--dump", (dir / "e.json").string(), "summary"});
    CHECK(q.exit_code == 0);
    CHECK(json::parse(q.out)["blocks"] == 0);

    auto bad = run_cli({"analyze", "--disasm", testing::fixture("toy/malformed").disassembly.string(), "--isa",
                        "toy", "--out", (dir / "m.json").string()});
    CHECK(bad.exit_code == 0);
    CHECK(bad.out.find("parse_errors: 2\n") != std::string::npos);
    CHECK(bad.err.find("parse error:") != std::string::npos);
}

TEST_CASE("query output equals the in-process answer")
{
    testing::TempDir dir;
    const auto& f = testing::fixture("toy/nested");
    auto path = testing::cli_dump(f, dir);
    service::Navigator nav(testing::fixture_model(f.name));
    for (std::string expr : {"summary", "loops", "resolve loop loop1.1", "neighborhood 2 k=0", "search sax",
                             "resolve line nested.c:3-4", "inlining", "callgraph", "sources"}) {
        CAPTURE(expr);
        auto r = run_cli({"query", "--dump", path.string(), expr});
        REQUIRE(r.exit_code == 0);
        CHECK(json::parse(r.out) == service::evaluate_query(nav, expr));
    }
    auto split = run_cli({"query", "--dump", path.string(), "resolve", "function", "saxpy2d"});
    CHECK(split.exit_code == 0);
    CHECK(json::parse(split.out) == service::evaluate_query(nav, "resolve function saxpy2d"));
    auto pretty = run_cli({"query", "--dump", path.string(), "--indent", "2", "summary"});
    CHECK(pretty.out.find("\n  \"blocks\"") != std::string::npos);
}

TEST_CASE("exit codes")
{
    testing::TempDir dir;
    auto path = testing::cli_dump(testing::fixture("toy/nested"), dir);
    CHECK(run_cli({"query", "--dump", path.string(), "resolve loop loop9"}).exit_code == 3);
    CHECK(run_cli({"query", "--dump", path.string(), "resolve line nowhere.c:1"}).exit_code == 3);
    CHECK(run_cli({"query", "--dump", path.string(), "neighborhood 99"}).exit_code == 3);
    CHECK(run_cli({"query", "--dump", path.string(), "teleport"}).exit_code == 2);
    CHECK(run_cli({"query", "--dump", path.string(), "resolve range 0x10"}).exit_code == 2);
    CHECK(run_cli({"query", "--dump", (dir / "absent.json").string(), "summary"}).exit_code == 1);
    CHECK(run_cli({"analyze", "--disasm", (dir / "absent.objdump").string(), "--out", (dir / "x.json").string()})
              .exit_code == 1);
    CHECK(run_cli({"analyze", "--disasm", testing::fixture("toy/diamond").disassembly.string(), "--sidecar",
                   (dir / "absent.dbg").string(), "--isa", "toy", "--out", (dir / "x.json").string()})
              .exit_code == 1);
    CHECK(run_cli({"analyze", "--disasm", testing::fixture("toy/diamond").disassembly.string(), "--isa", "m68k",
                   "--out", (dir / "x.json").string()})
              .exit_code == 1);
    std::ofstream(dir / "junk.json") << "{\"schema_version\": 99}";
    CHECK(run_cli({"query", "--dump", (dir / "junk.json").string(), "summary"}).exit_code == 1);
    CHECK(run_cli({}).exit_code != 0);
    CHECK(run_cli({"query", "summary"}).exit_code != 0);
}
