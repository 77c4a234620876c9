#include "asmnav/ingest/sidecar_parser.hpp"

#include <charconv>
#include <istream>
#include <sstream>

namespace asmnav::ingest {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::optional<std::uint32_t> parse_decimal(std::string_view s)
{
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        return std::nullopt;
    return v;
}

std::optional<std::vector<std::uint32_t>> parse_path(std::string_view s)
{
    std::vector<std::uint32_t> out;
    while (true) {
        auto slash = s.find('/');
        auto part = s.substr(0, slash);
        auto v = parse_decimal(part);
        if (!v || *v == 0)
            return std::nullopt;
        out.push_back(*v);
        if (slash == std::string_view::npos)
            break;
        s.remove_prefix(slash + 1);
    }
    return out;
}

std::optional<AddressRange> parse_span(const std::string& start, const std::string& end, std::string& why)
{
    auto s = parse_address(start);
    auto e = parse_address(end);
    if (!s || !e) {
        why = "malformed address";
        return std::nullopt;
    }
    auto r = try_make_range(*s, *e);
    if (!r)
        why = "range start must precede end";
    return r;
}

} // namespace

std::optional<std::vector<std::string>> tokenize_record(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (true) {
        while (i < line.size() && is_space(line[i]))
            ++i;
        if (i >= line.size())
            break;
        std::string token;
        if (line[i] == '"') {
            ++i;
            bool closed = false;
            while (i < line.size()) {
                char c = line[i++];
                if (c == '\\' && i < line.size()) {
                    token += line[i++];
                } else if (c == '"') {
                    closed = true;
                    break;
                } else {
                    token += c;
                }
            }
            if (!closed)
                return std::nullopt;
        } else {
            while (i < line.size() && !is_space(line[i]))
                token += line[i++];
        }
        out.push_back(std::move(token));
    }
    return out;
}

std::string quote_field(std::string_view field)
{
    bool needs = field.empty() || field.front() == '"' || field.front() == '#';
    for (char c : field)
        if (is_space(c) || c == '\n')
            needs = true;
    if (!needs)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

SidecarParse parse_debug_sidecar(std::istream& input)
{
    SidecarParse result;
    auto& sc = result.sidecar;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(input, line)) {
        ++line_no;
        auto fail = [&](std::string message) { result.errors.push_back({line_no, std::move(message), line}); };

        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            ++result.skipped_lines;
            continue;
        }
        auto tokens = tokenize_record(line);
        if (!tokens) {
            fail("unterminated quote");
            continue;
        }
        const auto& t = *tokens;
        const auto& kind = t[0];
        std::string why;

        if (kind == "LINE") {
            if (t.size() != 5) {
                fail("LINE expects 4 fields");
                continue;
            }
            auto ln = parse_decimal(t[2]);
            if (!ln || *ln == 0) {
                fail("line number must be a positive integer");
                continue;
            }
            auto r = parse_span(t[3], t[4], why);
            if (!r) {
                fail(why);
                continue;
            }
            sc.line_records.push_back({t[1], *ln, *r});
        } else if (kind == "INLINE") {
            if (t.size() != 8) {
                fail("INLINE expects 7 fields");
                continue;
            }
            auto path = parse_path(t[2]);
            if (!path) {
                fail("malformed inline path");
                continue;
            }
            auto r = parse_span(t[4], t[5], why);
            if (!r) {
                fail(why);
                continue;
            }
            auto call_line = parse_decimal(t[7]);
            if (!call_line) {
                fail("malformed call line");
                continue;
            }
            std::optional<SourceLocation> site;
            if (t[6] != "-" && *call_line > 0)
                site = SourceLocation{t[6], *call_line};
            sc.inline_records.push_back({t[1], std::move(*path), t[3], *r, std::move(site)});
        } else if (kind == "VAR") {
            if (t.size() != 5) {
                fail("VAR expects 4 fields");
                continue;
            }
            auto r = parse_span(t[3], t[4], why);
            if (!r) {
                fail(why);
                continue;
            }
            sc.variable_records.push_back({t[1], t[2], *r});
        } else if (kind == "CALL") {
            if (t.size() != 5) {
                fail("CALL expects 4 fields");
                continue;
            }
            auto site = parse_address(t[3]);
            if (!site) {
                fail("malformed call site");
                continue;
            }
            if (t[4] != "0" && t[4] != "1") {
                fail("inlined flag must be 0 or 1");
                continue;
            }
            sc.call_records.push_back({t[1], t[2], *site, t[4] == "1"});
        } else {
            fail("unknown record kind '" + kind + "'");
        }
    }
    return result;
}

SidecarParse parse_debug_sidecar(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_debug_sidecar(in);
}

} // namespace asmnav::ingest
