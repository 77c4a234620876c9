#include "asmnav/ingest/dump.hpp"
#include "asmnav/service/pipeline.hpp"
#include "asmnav/service/query_expression.hpp"
#include "asmnav/service/server.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

using namespace asmnav;

namespace {

service::Server* g_server = nullptr;

void on_signal(int)
{
    if (g_server)
        g_server->stop();
}

ModelPtr load_dump(const std::string& path)
{
    return std::make_shared<const ProgramModel>(ingest::load_model(path));
}

int run_analyze(const service::AnalyzeOptions& options, const std::string& out)
{
    auto result = service::analyze_files(options);
    for (const auto& w : result.warnings)
        std::cerr << "warning: " << w << '\n';
    for (const auto& e : result.model.diagnostics.parse_errors)
        std::cerr << "parse error: " << e.message << '\n';
    try {
        ingest::save_model(result.model, out);
    } catch (const std::exception& e) {
        throw service::IoError(e.what());
    }
    std::cout << service::format_summary(result.model);
    return 0;
}

int run_query(const std::string& dump, const std::vector<std::string>& words, int indent)
{
    std::string expression;
    for (const auto& w : words)
        expression += (expression.empty() ? "" : " ") + w;
    service::Navigator nav(load_dump(dump));
    std::cout << service::evaluate_query(nav, expression).dump(indent) << '\n';
    return 0;
}

int run_serve(const std::string& dump, const std::string& bind)
{
    service::Server server(load_dump(dump));
    auto address = service::effective_bind_address(bind);
    int port = server.bind(address);
    std::cerr << "listening on " << address.host << ':' << port << '\n';
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.run();
    g_server = nullptr;
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Navigate optimized binaries through their disassembly, CFG, loops and debug info."};
    app.require_subcommand(1);

    service::AnalyzeOptions analyze;
    std::string sidecar, source_root, out;
    auto* a = app.add_subcommand("analyze", "Build a model dump from a disassembly listing and debug sidecar");
    a->add_option("--disasm", analyze.disassembly, "objdump -d listing")->required();
    a->add_option("--sidecar", sidecar, "Debug sidecar file");
    a->add_option("--src", source_root, "Directory searched for source files");
    a->add_option("--isa", analyze.isa, "Instruction set table (x86-64, toy)")->capture_default_str();
    a->add_option("--out", out, "Dump file to write")->required();

    std::string dump;
    std::vector<std::string> words;
    int indent = -1;
    auto* q = app.add_subcommand("query", "Evaluate a query expression against a dump");
    q->add_option("--dump", dump, "Model dump")->required();
    q->add_option("--indent", indent, "Pretty-print with this indent");
    q->add_option("expression", words, "Query expression, e.g. 'resolve loop loop1'")->required();

    std::string bind = service::kDefaultBind;
    auto* s = app.add_subcommand("serve", "Serve the REST API for a dump");
    s->add_option("--dump", dump, "Model dump")->required();
    s->add_option("--bind", bind, "HOST:PORT (overridden by ASMNAV_BIND)")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*a) {
            if (!sidecar.empty())
                analyze.sidecar = sidecar;
            if (!source_root.empty())
                analyze.source_root = source_root;
            return run_analyze(analyze, out);
        }
        if (*q)
            return run_query(dump, words, indent);
        if (*s)
            return run_serve(dump, bind);
    } catch (const selection::UnknownEntity& e) {
        std::cerr << "unknown entity: " << e.what() << '\n';
        return 3;
    } catch (const service::BadRequest& e) {
        std::cerr << "bad query: " << e.what() << '\n';
        return 2;
    } catch (const service::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
