#include "asmnav/service/query_expression.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace asmnav::service {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

/// Splits off the first whitespace-delimited word.
std::pair<std::string_view, std::string_view> next_word(std::string_view s)
{
    s = trim(s);
    auto end = s.find_first_of(" \t");
    if (end == std::string_view::npos)
        return {s, {}};
    return {s.substr(0, end), trim(s.substr(end))};
}

std::uint32_t parse_line_number(std::string_view s)
{
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
        throw BadRequest("bad line number '" + std::string(s) + "'");
    return v;
}

selection::Origin parse_resolve(const Navigator& nav, std::string_view rest)
{
    auto [kind, arg] = next_word(rest);
    if (arg.empty())
        throw BadRequest("resolve needs a kind and an argument");
    json origin;
    if (kind == "line") {
        auto colon = arg.rfind(':');
        if (colon == std::string_view::npos)
            throw BadRequest("resolve line expects <file>:<n>[-<m>]");
        auto span = arg.substr(colon + 1);
        auto dash = span.find('-');
        auto first = parse_line_number(span.substr(0, dash));
        auto last = dash == std::string_view::npos ? first : parse_line_number(span.substr(dash + 1));
        return selection::LineOrigin{std::string(arg.substr(0, colon)), first, last};
    }
    if (kind == "range")
        return selection::RangeOrigin{parse_range_list(arg)};
    if (kind == "block" || kind == "blocks")
        return selection::BlockOrigin{parse_id_list(arg)};
    if (kind == "loop")
        origin = {{"kind", "loop"}, {"id", arg}};
    else if (kind == "inline")
        origin = {{"kind", "inline"}, {"id", arg}};
    else if (kind == "function")
        return selection::FunctionOrigin{nav.find_function(arg)};
    else
        throw BadRequest("unknown resolve kind '" + std::string(kind) + "'");
    return nav.parse_origin(origin);
}

} // namespace

json evaluate_query(const Navigator& nav, std::string_view expression)
{
    auto [verb, rest] = next_word(expression);
    if (verb == "summary" && rest.empty())
        return nav.summary();
    if (verb == "sources" && rest.empty())
        return nav.sources();
    if (verb == "source" && !rest.empty())
        return nav.source(std::string(rest));
    if (verb == "loops")
        return rest.empty() ? nav.loops(std::nullopt) : nav.function_loops(nav.find_function(rest));
    if (verb == "inlining" && rest.empty())
        return nav.inlining(std::nullopt);
    if (verb == "callgraph" && rest.empty())
        return nav.callgraph(std::nullopt);
    if (verb == "resolve")
        return nav.selection(parse_resolve(nav, rest));
    if (verb == "neighborhood") {
        auto [ids, tail] = next_word(rest);
        if (ids.empty())
            throw BadRequest("neighborhood needs block ids");
        unsigned k = selection::kDefaultHops;
        if (!tail.empty()) {
            if (!tail.starts_with("k="))
                throw BadRequest("neighborhood expects k=<k>");
            auto text = tail.substr(2);
            auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
            if (text.empty() || ec != std::errc{} || p != text.data() + text.size())
                throw BadRequest("bad k '" + std::string(text) + "'");
        }
        return nav.cfg(parse_id_list(ids), k);
    }
    if (verb == "search")
        return nav.search(rest, kDefaultSearchLimit);
    throw BadRequest("unrecognized query '" + std::string(trim(expression)) + "'");
}

std::vector<std::string> enumerate_queries(const ProgramModel& model)
{
    std::vector<std::string> out{"summary", "sources", "loops", "inlining", "callgraph"};
    for (const auto& [file, lines] : model.sources)
        out.push_back("source " + file);
    for (const auto& f : model.functions) {
        out.push_back("loops " + f.name);
        out.push_back("resolve function " + f.name);
        out.push_back("search " + f.name);
    }
    for (const auto& l : model.loops)
        out.push_back("resolve loop " + l.id);
    for (const auto& n : model.inlines)
        out.push_back("resolve inline " + n.id);
    for (const auto& m : model.line_map.mappings())
        out.push_back("resolve line " + m.file + ":" + std::to_string(m.line));
    for (const auto& b : model.blocks) {
        out.push_back("resolve block " + std::to_string(b.id));
        out.push_back("resolve range " + format_address(b.range.start) + "-" + format_address(b.range.end));
        for (unsigned k : {0u, 1u, 3u})
            out.push_back("neighborhood " + std::to_string(b.id) + " k=" + std::to_string(k));
    }
    return out;
}

} // namespace asmnav::service
