#include "asmnav/service/pipeline.hpp"

#include "asmnav/analysis/builder.hpp"
#include "asmnav/ingest/source_loader.hpp"
#include "asmnav/service/navigator.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace asmnav::service {

namespace {

std::string read_file(const std::filesystem::path& path, const char* what)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(std::string("cannot read ") + what + " '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

AnalyzeResult analyze_files(const AnalyzeOptions& options)
{
    AnalyzeResult out;
    analysis::AnalysisInput input;
    input.disassembly = ingest::parse_disassembly_text(read_file(options.disassembly, "disassembly"));
    if (options.sidecar)
        input.sidecar = ingest::parse_debug_sidecar(read_file(*options.sidecar, "sidecar"));
    else
        out.warnings.push_back("no debug sidecar given; line, inline and variable maps are empty");

    std::set<std::string> files;
    for (const auto& r : input.sidecar.sidecar.line_records)
        files.insert(r.file);
    for (const auto& r : input.sidecar.sidecar.inline_records)
        if (r.call_site)
            files.insert(r.call_site->file);
    input.sources = ingest::load_sources(files, options.source_root);
    for (const auto& f : files)
        if (!input.sources.count(f))
            out.warnings.push_back("source file not found: " + f);

    out.model = analysis::build_model(input, analysis::isa_by_name(options.isa));
    return out;
}

std::string format_summary(const ProgramModel& model)
{
    auto s = Navigator(std::make_shared<const ProgramModel>(model)).summary();
    std::ostringstream out;
    for (const char* key : {"instructions", "blocks", "functions", "loops", "inline_nodes", "mapped_lines",
                            "parse_errors", "warnings"})
        out << key << ": " << s[key].get<std::size_t>() << '\n';
    return out.str();
}

} // namespace asmnav::service
