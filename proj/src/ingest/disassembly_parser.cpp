#include "asmnav/ingest/disassembly_parser.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <sstream>

namespace asmnav::ingest {

namespace {

bool is_hex(char c)
{
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

bool is_space(char c) { return c == ' ' || c == '\t'; }

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (is_space(s.front()) || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (is_space(s.back()) || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::uint8_t hex_value(char c)
{
    if (c >= '0' && c <= '9')
        return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f')
        return static_cast<std::uint8_t>(c - 'a' + 10);
    return static_cast<std::uint8_t>(c - 'A' + 10);
}

// "0000000000401130 <main>:"
std::optional<std::string> match_symbol_header(std::string_view line)
{
    std::size_t n = 0;
    while (n < line.size() && is_hex(line[n]))
        ++n;
    if (n < 8 || n > 16 || line.size() < n + 4 || line.substr(n, 2) != " <")
        return std::nullopt;
    if (line.substr(line.size() - 2) != ">:")
        return std::nullopt;
    auto name = line.substr(n + 2, line.size() - n - 4);
    if (name.empty())
        return std::nullopt;
    return std::string(name);
}

// Parses a run of "xx " tokens. Returns nullopt if any token is not one byte.
std::optional<std::vector<std::uint8_t>> parse_byte_column(std::string_view column)
{
    std::vector<std::uint8_t> bytes;
    std::size_t i = 0;
    while (true) {
        while (i < column.size() && is_space(column[i]))
            ++i;
        if (i >= column.size())
            break;
        if (i + 1 >= column.size() || !is_hex(column[i]) || !is_hex(column[i + 1]))
            return std::nullopt;
        if (i + 2 < column.size() && !is_space(column[i + 2]))
            return std::nullopt;
        bytes.push_back(static_cast<std::uint8_t>(hex_value(column[i]) << 4 | hex_value(column[i + 1])));
        i += 2;
    }
    if (bytes.empty())
        return std::nullopt;
    return bytes;
}

constexpr std::array kPrefixWords = {"rep",   "repz", "repe", "repnz",   "repne",   "lock",
                                     "notrack", "bnd",  "data16", "addr32", "cs",     "ds",
                                     "es",    "fs",   "gs",   "ss",      "xacquire", "xrelease"};

bool is_prefix_word(std::string_view w)
{
    return std::find(kPrefixWords.begin(), kPrefixWords.end(), w) != kPrefixWords.end();
}

struct SplitInstruction {
    std::string mnemonic;
    std::string operands;
};

SplitInstruction split_instruction(std::string_view text)
{
    if (auto hash = text.find('#'); hash != std::string_view::npos && hash > 0 && is_space(text[hash - 1]))
        text = text.substr(0, hash);
    text = trim(text);

    SplitInstruction out;
    while (!text.empty()) {
        auto end = std::find_if(text.begin(), text.end(), is_space) - text.begin();
        auto word = text.substr(0, static_cast<std::size_t>(end));
        auto rest = trim(text.substr(static_cast<std::size_t>(end)));
        if (!out.mnemonic.empty())
            out.mnemonic += ' ';
        out.mnemonic += word;
        text = rest;
        if (!is_prefix_word(word) || rest.empty())
            break;
    }
    out.operands = std::string(text);
    return out;
}

class Parser {
public:
    ParseResult<RawDisassemblyLine> result;

    void feed(std::string_view line, std::size_t line_no)
    {
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);

        if (trim(line).empty()) {
            ++result.skipped_lines;
            return;
        }
        if (auto name = match_symbol_header(line)) {
            context_ = std::move(name);
            last_in_context_.reset();
            ++result.skipped_lines;
            return;
        }
        if (!is_space(line.front())) {
            // Section headers, file banners, "...": not instructions.
            if (line.rfind("Disassembly of section", 0) == 0) {
                context_.reset();
                last_in_context_.reset();
            }
            ++result.skipped_lines;
            return;
        }

        std::size_t i = 0;
        while (i < line.size() && is_space(line[i]))
            ++i;
        std::size_t digits = i;
        while (digits < line.size() && is_hex(line[digits]))
            ++digits;
        if (digits == i || digits >= line.size() || line[digits] != ':') {
            ++result.skipped_lines;
            return;
        }
        // From here on the line claims to be an instruction.
        auto address = parse_address(line.substr(i, digits - i));
        if (!address) {
            error(line_no, "address does not fit in 64 bits", line);
            return;
        }
        parse_instruction(*address, line.substr(digits + 1), line_no, line);
    }

private:
    std::optional<std::string> context_;
    std::optional<Address> last_in_context_;

    void error(std::size_t line_no, std::string message, std::string_view line)
    {
        result.errors.push_back({line_no, std::move(message), std::string(line)});
    }

    void parse_instruction(Address address, std::string_view rest, std::size_t line_no, std::string_view line)
    {
        if (rest.empty() || rest.front() != '\t') {
            error(line_no, "expected tab after address", line);
            return;
        }
        rest.remove_prefix(1);

        std::vector<std::uint8_t> bytes;
        std::string_view text = rest;
        auto tab = rest.find('\t');
        if (tab != std::string_view::npos) {
            auto parsed = parse_byte_column(rest.substr(0, tab));
            if (!parsed) {
                error(line_no, "malformed byte column", line);
                return;
            }
            bytes = std::move(*parsed);
            text = rest.substr(tab + 1);
        } else if (auto parsed = parse_byte_column(rest)) {
            // Bytes only: continuation of the previous instruction's encoding.
            if (result.records.empty()) {
                error(line_no, "byte continuation without a preceding instruction", line);
                return;
            }
            auto& prev = result.records.back();
            if (prev.raw_bytes.empty() || prev.address + prev.raw_bytes.size() != address) {
                error(line_no, "byte continuation does not follow the previous instruction", line);
                return;
            }
            prev.raw_bytes.insert(prev.raw_bytes.end(), parsed->begin(), parsed->end());
            return;
        }

        auto split = split_instruction(text);
        if (split.mnemonic.empty()) {
            error(line_no, "missing mnemonic", line);
            return;
        }
        if (!bytes.empty() && address > ~Address{0} - bytes.size()) {
            error(line_no, "instruction extends past the end of the address space", line);
            return;
        }
        if (last_in_context_ && address <= *last_in_context_)
            result.warnings.push_back({line_no, "address not increasing within symbol listing", std::string(line)});
        last_in_context_ = address;

        result.records.push_back(
            {address, std::move(bytes), std::move(split.mnemonic), std::move(split.operands), context_, line_no});
    }
};

} // namespace

ParseResult<RawDisassemblyLine> parse_disassembly_text(std::istream& input)
{
    Parser parser;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(input, line))
        parser.feed(line, ++line_no);
    return std::move(parser.result);
}

ParseResult<RawDisassemblyLine> parse_disassembly_text(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_disassembly_text(in);
}

} // namespace asmnav::ingest
