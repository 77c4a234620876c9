#include "asmnav/ingest/source_loader.hpp"

#include <fstream>
#include <sstream>

namespace asmnav::ingest {

SourceLines split_lines(std::string_view text)
{
    SourceLines lines;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        lines.emplace_back(line);
        if (nl == std::string_view::npos)
            break;
        text.remove_prefix(nl + 1);
    }
    return lines;
}

std::optional<SourceLines> load_source(const std::filesystem::path& file)
{
    std::error_code ec;
    if (!std::filesystem::is_regular_file(file, ec))
        return std::nullopt;
    std::ifstream in(file, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        return std::nullopt;
    return split_lines(buf.str());
}

std::map<std::string, SourceLines> load_sources(const std::set<std::string>& files,
                                                const std::optional<std::filesystem::path>& root)
{
    std::map<std::string, SourceLines> out;
    for (const auto& name : files) {
        std::filesystem::path p(name);
        std::vector<std::filesystem::path> candidates;
        if (root) {
            if (p.is_relative())
                candidates.push_back(*root / p);
            candidates.push_back(*root / p.filename());
        }
        candidates.push_back(p);
        for (const auto& c : candidates) {
            if (auto lines = load_source(c)) {
                out.emplace(name, std::move(*lines));
                break;
            }
        }
    }
    return out;
}

} // namespace asmnav::ingest
