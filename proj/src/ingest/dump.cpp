#include "asmnav/ingest/dump.hpp"

#include <fstream>
#include <sstream>

namespace asmnav::ingest {

using nlohmann::json;

SchemaMismatch::SchemaMismatch(int found, const std::string& detail)
    : std::runtime_error("schema mismatch: file has version " + std::to_string(found) + ", expected " +
                         std::to_string(kSchemaVersion) + (detail.empty() ? "" : " (" + detail + ")")),
      found_(found)
{
}

namespace {

const char* kHex = "0123456789abcdef";

std::string bytes_to_hex(const std::vector<std::uint8_t>& bytes)
{
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out += kHex[b >> 4];
        out += kHex[b & 0xf];
    }
    return out;
}

std::vector<std::uint8_t> bytes_from_hex(const std::string& hex)
{
    if (hex.size() % 2 != 0)
        throw ParseFailure("odd-length byte string");
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        auto v = parse_address(hex.substr(i, 2));
        if (!v)
            throw ParseFailure("malformed byte string");
        out.push_back(static_cast<std::uint8_t>(*v));
    }
    return out;
}

Address addr(const json& j)
{
    auto v = parse_address(j.get<std::string>());
    if (!v)
        throw ParseFailure("malformed address '" + j.get<std::string>() + "'");
    return *v;
}

json range_json(const AddressRange& r) { return {{"start", format_address(r.start)}, {"end", format_address(r.end)}}; }

AddressRange range_from(const json& j)
{
    auto r = try_make_range(addr(j.at("start")), addr(j.at("end")));
    if (!r)
        throw ParseFailure("invalid address range");
    return *r;
}

template <class T>
json optional_json(const std::optional<T>& v)
{
    return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& j)
{
    if (j.is_null())
        return std::nullopt;
    return j.get<T>();
}

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw ParseFailure("inconsistent dump: " + what);
}

void check_references(const ProgramModel& m)
{
    for (std::size_t i = 0; i < m.blocks.size(); ++i) {
        require(m.blocks[i].id == i, "block ids must be dense");
        if (m.blocks[i].function_id)
            require(*m.blocks[i].function_id < m.functions.size(), "block references unknown function");
    }
    for (std::size_t i = 0; i < m.functions.size(); ++i)
        require(m.functions[i].id == i, "function ids must be dense");
    for (const auto& e : m.cfg_edges)
        require(e.from < m.blocks.size() && e.to < m.blocks.size(), "cfg edge references unknown block");
    for (const auto& e : m.call_edges)
        require(e.caller < m.functions.size() && e.callee < m.functions.size(),
                "call edge references unknown function");
    for (std::size_t i = 0; i < m.loops.size(); ++i) {
        const auto& l = m.loops[i];
        require(l.function_id < m.functions.size() && l.header_block < m.blocks.size(), "loop references");
        for (auto b : l.body_blocks)
            require(b < m.blocks.size(), "loop body references unknown block");
        if (l.parent)
            require(*l.parent < i, "loop parent must precede child");
        for (auto c : l.children)
            require(c < m.loops.size() && c > i, "loop child index");
    }
    for (std::size_t i = 0; i < m.inlines.size(); ++i) {
        const auto& n = m.inlines[i];
        require(n.root_function < m.functions.size(), "inline root references unknown function");
        if (n.parent)
            require(*n.parent < i, "inline parent must precede child");
        for (auto c : n.children)
            require(c < m.inlines.size() && c > i, "inline child index");
    }
    for (std::size_t i = 1; i < m.instructions.size(); ++i)
        require(m.instructions[i - 1].range().end <= m.instructions[i].address, "instructions must be sorted");
}

} // namespace

json ranges_to_json(std::span<const AddressRange> ranges)
{
    json out = json::array();
    for (const auto& r : ranges)
        out.push_back(range_json(r));
    return out;
}

RangeList ranges_from_json(const json& array)
{
    RangeList out;
    for (const auto& r : array)
        out.push_back(range_from(r));
    return out;
}

json model_to_json(const ProgramModel& m)
{
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["isa"] = m.isa;

    auto& instructions = doc["instructions"] = json::array();
    for (const auto& i : m.instructions) {
        json annotations = json::array();
        for (const auto& a : i.annotations)
            annotations.push_back({{"register", a.register_name}, {"names", a.names}});
        instructions.push_back({{"address", format_address(i.address)},
                                {"length", i.byte_length},
                                {"bytes", bytes_to_hex(i.raw_bytes)},
                                {"mnemonic", i.mnemonic},
                                {"operands", i.operand_text},
                                {"annotated", optional_json(i.annotated_operand_text)},
                                {"annotations", std::move(annotations)}});
    }

    auto& blocks = doc["blocks"] = json::array();
    for (const auto& b : m.blocks) {
        json addrs = json::array();
        for (auto a : b.instruction_addresses)
            addrs.push_back(format_address(a));
        blocks.push_back({{"id", b.id},
                          {"start", format_address(b.range.start)},
                          {"end", format_address(b.range.end)},
                          {"function", optional_json(b.function_id)},
                          {"instructions", std::move(addrs)}});
    }

    auto& edges = doc["cfg_edges"] = json::array();
    for (const auto& e : m.cfg_edges)
        edges.push_back({{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}});

    auto& functions = doc["functions"] = json::array();
    for (const auto& f : m.functions)
        functions.push_back({{"id", f.id},
                             {"name", f.name},
                             {"display_name", f.display_name},
                             {"entry", format_address(f.entry_address)},
                             {"ranges", ranges_to_json(f.ranges)},
                             {"external", f.external}});

    auto& calls = doc["call_edges"] = json::array();
    for (const auto& c : m.call_edges)
        calls.push_back({{"caller", c.caller}, {"callee", c.callee}, {"inlined", c.inlined}});

    auto& loops = doc["loops"] = json::array();
    for (const auto& l : m.loops)
        loops.push_back({{"id", l.id},
                         {"function", l.function_id},
                         {"header", l.header_block},
                         {"body", l.body_blocks},
                         {"ranges", ranges_to_json(l.ranges)},
                         {"parent", optional_json(l.parent)},
                         {"children", l.children},
                         {"depth", l.depth}});

    auto& inlines = doc["inlines"] = json::array();
    for (const auto& n : m.inlines) {
        json site = nullptr;
        if (n.call_site)
            site = {{"file", n.call_site->file}, {"line", n.call_site->line}};
        inlines.push_back({{"id", n.id},
                           {"root_function", n.root_function},
                           {"callee", n.callee_name},
                           {"ranges", ranges_to_json(n.ranges)},
                           {"call_site", std::move(site)},
                           {"parent", optional_json(n.parent)},
                           {"children", n.children},
                           {"depth", n.depth},
                           {"orphan", n.orphan}});
    }

    auto& lines = doc["line_map"] = json::array();
    for (const auto& l : m.line_map.mappings())
        lines.push_back({{"file", l.file}, {"line", l.line}, {"ranges", ranges_to_json(l.ranges)}});

    auto& vars = doc["var_map"] = json::array();
    for (const auto& v : m.variables)
        vars.push_back({{"name", v.variable_name},
                        {"register", v.register_name},
                        {"start", format_address(v.live_range.start)},
                        {"end", format_address(v.live_range.end)},
                        {"ambiguous", v.ambiguous}});

    doc["sources"] = m.sources;

    auto diag_list = [](const std::vector<Diagnostic>& ds) {
        json out = json::array();
        for (const auto& d : ds)
            out.push_back({{"kind", d.kind}, {"message", d.message}});
        return out;
    };
    json irreducible = json::array();
    for (auto [from, to] : m.diagnostics.irreducible_edges)
        irreducible.push_back({{"from", from}, {"to", to}});
    json dangling = json::array();
    for (const auto& d : m.diagnostics.dangling_edges)
        dangling.push_back({{"from", d.from}, {"target", format_address(d.target)}});
    doc["diagnostics"] = {{"parse_errors", diag_list(m.diagnostics.parse_errors)},
                          {"warnings", diag_list(m.diagnostics.warnings)},
                          {"irreducible_edges", std::move(irreducible)},
                          {"dangling_edges", std::move(dangling)},
                          {"unreachable_blocks", m.diagnostics.unreachable_blocks}};
    return doc;
}

ProgramModel model_from_json(const json& doc)
{
    if (!doc.is_object() || !doc.contains("schema_version"))
        throw ParseFailure("not a canonical dump: missing schema_version");
    if (!doc["schema_version"].is_number_integer())
        throw ParseFailure("schema_version must be an integer");
    int version = doc["schema_version"].get<int>();
    if (version != kSchemaVersion)
        throw SchemaMismatch(version, "");

    ProgramModel m;
    try {
        m.isa = doc.at("isa").get<std::string>();

        for (const auto& j : doc.at("instructions")) {
            Instruction i;
            i.address = addr(j.at("address"));
            i.byte_length = j.at("length").get<std::uint32_t>();
            i.raw_bytes = bytes_from_hex(j.at("bytes").get<std::string>());
            i.mnemonic = j.at("mnemonic").get<std::string>();
            i.operand_text = j.at("operands").get<std::string>();
            i.annotated_operand_text = optional_from<std::string>(j.at("annotated"));
            for (const auto& a : j.at("annotations"))
                i.annotations.push_back(
                    {a.at("register").get<std::string>(), a.at("names").get<std::vector<std::string>>()});
            require(i.byte_length >= 1, "instruction length must be positive");
            m.instructions.push_back(std::move(i));
        }

        for (const auto& j : doc.at("blocks")) {
            BasicBlock b;
            b.id = j.at("id").get<BlockId>();
            b.range = range_from(j);
            b.function_id = optional_from<FunctionId>(j.at("function"));
            for (const auto& a : j.at("instructions"))
                b.instruction_addresses.push_back(addr(a));
            m.blocks.push_back(std::move(b));
        }

        for (const auto& j : doc.at("cfg_edges")) {
            auto kind = edge_kind_from_string(j.at("kind").get<std::string>());
            require(kind.has_value(), "unknown edge kind");
            m.cfg_edges.push_back({j.at("from").get<BlockId>(), j.at("to").get<BlockId>(), *kind});
        }

        for (const auto& j : doc.at("functions"))
            m.functions.push_back({j.at("id").get<FunctionId>(), j.at("name").get<std::string>(),
                                   addr(j.at("entry")), ranges_from_json(j.at("ranges")),
                                   j.at("display_name").get<std::string>(), j.at("external").get<bool>()});

        for (const auto& j : doc.at("call_edges"))
            m.call_edges.push_back(
                {j.at("caller").get<FunctionId>(), j.at("callee").get<FunctionId>(), j.at("inlined").get<bool>()});

        for (const auto& j : doc.at("loops")) {
            LoopNode l;
            l.id = j.at("id").get<std::string>();
            l.function_id = j.at("function").get<FunctionId>();
            l.header_block = j.at("header").get<BlockId>();
            l.body_blocks = j.at("body").get<std::vector<BlockId>>();
            l.ranges = ranges_from_json(j.at("ranges"));
            l.parent = optional_from<LoopIndex>(j.at("parent"));
            l.children = j.at("children").get<std::vector<LoopIndex>>();
            l.depth = j.at("depth").get<std::uint32_t>();
            m.loops.push_back(std::move(l));
        }

        for (const auto& j : doc.at("inlines")) {
            InlineNode n;
            n.id = j.at("id").get<std::string>();
            n.root_function = j.at("root_function").get<FunctionId>();
            n.callee_name = j.at("callee").get<std::string>();
            n.ranges = ranges_from_json(j.at("ranges"));
            if (const auto& site = j.at("call_site"); !site.is_null())
                n.call_site = SourceLocation{site.at("file").get<std::string>(), site.at("line").get<std::uint32_t>()};
            n.parent = optional_from<InlineIndex>(j.at("parent"));
            n.children = j.at("children").get<std::vector<InlineIndex>>();
            n.depth = j.at("depth").get<std::uint32_t>();
            n.orphan = j.at("orphan").get<bool>();
            m.inlines.push_back(std::move(n));
        }

        std::vector<LineMapping> lines;
        for (const auto& j : doc.at("line_map"))
            lines.push_back({j.at("file").get<std::string>(), j.at("line").get<std::uint32_t>(),
                             ranges_from_json(j.at("ranges"))});
        m.line_map = LineMap(std::move(lines));

        for (const auto& j : doc.at("var_map")) {
            auto r = try_make_range(addr(j.at("start")), addr(j.at("end")));
            require(r.has_value(), "invalid variable live range");
            m.variables.push_back({j.at("name").get<std::string>(), j.at("register").get<std::string>(), *r,
                                   j.at("ambiguous").get<bool>()});
        }

        m.sources = doc.at("sources").get<std::map<std::string, std::vector<std::string>>>();

        const auto& d = doc.at("diagnostics");
        auto diag_list = [](const json& arr) {
            std::vector<Diagnostic> out;
            for (const auto& x : arr)
                out.push_back({x.at("kind").get<std::string>(), x.at("message").get<std::string>()});
            return out;
        };
        m.diagnostics.parse_errors = diag_list(d.at("parse_errors"));
        m.diagnostics.warnings = diag_list(d.at("warnings"));
        for (const auto& x : d.at("irreducible_edges"))
            m.diagnostics.irreducible_edges.emplace_back(x.at("from").get<BlockId>(), x.at("to").get<BlockId>());
        for (const auto& x : d.at("dangling_edges"))
            m.diagnostics.dangling_edges.push_back({x.at("from").get<BlockId>(), addr(x.at("target"))});
        m.diagnostics.unreachable_blocks = d.at("unreachable_blocks").get<std::vector<BlockId>>();
    } catch (const json::exception& e) {
        throw ParseFailure(std::string("malformed dump: ") + e.what());
    }

    check_references(m);
    return m;
}

void save_model(const ProgramModel& model, const std::filesystem::path& path)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        out << model_to_json(model).dump(1) << '\n';
        if (!out.flush())
            throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

ProgramModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ParseFailure(std::string("dump is not valid JSON: ") + e.what());
    }
    return model_from_json(doc);
}

} // namespace asmnav::ingest
