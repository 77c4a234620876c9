#include "asmnav/service/navigator.hpp"

#include "asmnav/analysis/isa.hpp"
#include "asmnav/core/names.hpp"
#include "asmnav/ingest/dump.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <limits>
#include <map>
#include <set>

namespace asmnav::service {

using selection::Origin;

namespace {

std::optional<std::uint64_t> parse_number(std::string_view s)
{
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
        return std::nullopt;
    return v;
}

const char* source_name(annotation::AnnotationSource s)
{
    return s == annotation::AnnotationSource::manual ? "manual" : "automated";
}

const char* match_kind(std::string_view name, std::string_view query)
{
    auto lower = [](std::string_view s) {
        std::string out(s);
        for (auto& c : out)
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return out;
    };
    auto n = lower(name), q = lower(query);
    if (n == q)
        return "exact";
    return n.starts_with(q) ? "prefix" : "substring";
}

json range_json(const AddressRange& r) { return {{"start", format_address(r.start)}, {"end", format_address(r.end)}}; }

} // namespace

Navigator::Navigator(ModelPtr model) : model_(std::move(model)), index_(selection::IntervalIndex::build(*model_)) {}

json Navigator::summary() const
{
    const auto& m = *model_;
    std::size_t externals = std::count_if(m.functions.begin(), m.functions.end(),
                                          [](const FunctionRecord& f) { return f.external; });
    return {{"schema_version", kSchemaVersion},
            {"isa", m.isa},
            {"instructions", m.instructions.size()},
            {"blocks", m.blocks.size()},
            {"cfg_edges", m.cfg_edges.size()},
            {"functions", m.functions.size() - externals},
            {"external_functions", externals},
            {"call_edges", m.call_edges.size()},
            {"loops", m.loops.size()},
            {"inline_nodes", m.inlines.size() - m.functions.size()},
            {"mapped_lines", m.line_map.mappings().size()},
            {"variables", m.variables.size()},
            {"sources", m.sources.size()},
            {"parse_errors", m.diagnostics.parse_errors.size()},
            {"warnings", m.diagnostics.warnings.size()}};
}

json Navigator::sources() const
{
    std::map<std::string, std::size_t> mapped;
    for (const auto& l : model_->line_map.mappings())
        ++mapped[l.file];
    for (const auto& [file, lines] : model_->sources)
        mapped.try_emplace(file, 0);

    json files = json::array();
    std::optional<std::string> best;
    std::size_t best_count = 0;
    for (const auto& [file, count] : mapped) {
        auto src = model_->sources.find(file);
        json entry = {{"file", file}, {"available", src != model_->sources.end()}, {"mapped_lines", count}};
        entry["line_count"] = src != model_->sources.end() ? json(src->second.size()) : json(nullptr);
        files.push_back(std::move(entry));
        if (!best || count > best_count) {
            best = file;
            best_count = count;
        }
    }
    return {{"files", std::move(files)}, {"default_file", best ? json(*best) : json(nullptr)}};
}

json Navigator::source(const std::string& file) const
{
    const auto& mappings = model_->line_map.mappings();
    std::set<std::uint32_t> mapped;
    for (const auto& l : mappings)
        if (l.file == file)
            mapped.insert(l.line);

    auto src = model_->sources.find(file);
    if (src == model_->sources.end()) {
        if (mapped.empty())
            throw selection::UnknownEntity("unknown source file '" + file + "'");
        return {{"file", file}, {"available", false}, {"mapped_lines", mapped}};
    }
    json lines = json::array();
    for (std::uint32_t n = 1; n <= src->second.size(); ++n)
        lines.push_back({{"line", n}, {"text", src->second[n - 1]}, {"mapped", mapped.count(n) > 0}});
    return {{"file", file}, {"available", true}, {"lines", std::move(lines)}};
}

json Navigator::disassembly(std::optional<AddressRange> window, std::size_t offset, std::size_t limit,
                            const std::vector<annotation::RenameRule>& rules) const
{
    const auto& m = *model_;
    std::span<const Instruction> all = m.instructions;
    if (window)
        all = m.instructions_in(*window);
    limit = std::min(limit, kMaxPageSize);
    const auto& isa = analysis::isa_by_name(m.isa);

    json rows = json::array();
    for (std::size_t k = offset; k < all.size() && k < offset + limit; ++k) {
        const auto& ins = all[k];
        auto rendered = annotation::render_operands(ins, rules);
        json annotations = json::array();
        for (const auto& a : rendered.annotations) {
            json entry = {{"register", a.register_name}, {"names", a.names}, {"source", source_name(a.source)}};
            entry["rule"] = a.rule_id ? json(*a.rule_id) : json(nullptr);
            annotations.push_back(std::move(entry));
        }
        const auto* block = m.block_at(ins.address);
        json row = {{"address", format_address(ins.address)},
                    {"length", ins.byte_length},
                    {"mnemonic", ins.mnemonic},
                    {"operands", ins.operand_text},
                    {"rendered_operands", rendered.text},
                    {"annotations", std::move(annotations)},
                    {"is_vector", analysis::classify_instruction(ins, isa).is_vector}};
        row["block"] = block ? json(block->id) : json(nullptr);
        row["function"] = block && block->function_id ? json(*block->function_id) : json(nullptr);
        rows.push_back(std::move(row));
    }
    return {{"total", all.size()}, {"offset", offset}, {"limit", limit}, {"instructions", std::move(rows)}};
}

selection::ResolvedSelection Navigator::resolve(const Origin& origin) const
{
    return selection::resolve(selection::make_selection(*model_, origin), *model_, index_);
}

json Navigator::selection(const Origin& origin) const { return resolved_to_json(resolve(origin), *model_); }

json Navigator::cfg(const std::vector<BlockId>& seeds, unsigned hops) const
{
    const auto& m = *model_;
    for (auto b : seeds)
        if (b >= m.blocks.size())
            throw selection::UnknownEntity("unknown block " + std::to_string(b));
    auto sub = selection::cfg_neighborhood(seeds, hops, m);
    std::set<BlockId> seed_set(seeds.begin(), seeds.end());
    std::set<BlockId> kept(sub.blocks.begin(), sub.blocks.end());

    std::map<BlockId, std::vector<std::string>> loops_of;
    json loops = json::array();
    for (const auto& l : m.loops) {
        json present = json::array();
        for (auto b : l.body_blocks)
            if (kept.count(b)) {
                present.push_back(b);
                loops_of[b].push_back(l.id);
            }
        if (!present.empty())
            loops.push_back({{"id", l.id}, {"depth", l.depth}, {"blocks", std::move(present)}});
    }

    json blocks = json::array();
    for (auto b : sub.blocks) {
        const auto& blk = m.blocks[b];
        std::string fname = blk.function_id ? m.functions[*blk.function_id].display_name : std::string("?");
        json entry = {{"id", b},
                      {"label", std::to_string(b) + " " + fname},
                      {"start", format_address(blk.range.start)},
                      {"end", format_address(blk.range.end)},
                      {"seed", seed_set.count(b) > 0},
                      {"loops", loops_of[b]}};
        entry["function"] = blk.function_id ? json(*blk.function_id) : json(nullptr);
        blocks.push_back(std::move(entry));
    }
    json edges = json::array();
    for (const auto& e : sub.edges)
        edges.push_back({{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}});
    return {{"k", hops}, {"seeds", seed_set}, {"blocks", std::move(blocks)}, {"edges", std::move(edges)},
            {"loops", std::move(loops)}};
}

json Navigator::loops(const std::optional<RangeList>& filter) const
{
    const auto& m = *model_;
    std::vector<bool> matched(m.loops.size(), !filter.has_value());
    std::vector<bool> keep(m.loops.size(), !filter.has_value());
    if (filter) {
        for (auto i : selection::query_ranges(index_.loops, range_union(*filter))) {
            matched[i] = true;
            for (std::optional<LoopIndex> p = i; p; p = m.loops[*p].parent)
                keep[*p] = true;
        }
    }

    std::function<json(LoopIndex)> node = [&](LoopIndex i) {
        const auto& l = m.loops[i];
        json children = json::array();
        for (auto c : l.children)
            if (keep[c])
                children.push_back(node(c));
        return json{{"id", l.id},
                    {"header", l.header_block},
                    {"blocks", l.body_blocks},
                    {"ranges", ingest::ranges_to_json(l.ranges)},
                    {"depth", l.depth},
                    {"matched", static_cast<bool>(matched[i])},
                    {"children", std::move(children)}};
    };

    std::map<FunctionId, json> by_function;
    for (LoopIndex i = 0; i < m.loops.size(); ++i)
        if (!m.loops[i].parent && keep[i]) {
            auto& entry = by_function[m.loops[i].function_id];
            if (entry.is_null()) {
                const auto& f = m.functions[m.loops[i].function_id];
                entry = {{"function", f.id}, {"name", f.name}, {"display_name", f.display_name},
                         {"loops", json::array()}};
            }
            entry["loops"].push_back(node(i));
        }
    json out = json::array();
    for (auto& [id, entry] : by_function)
        out.push_back(std::move(entry));
    return {{"filtered", filter.has_value()}, {"functions", std::move(out)}};
}

json Navigator::function_loops(FunctionId function) const
{
    const auto& f = model_->functions.at(function);
    auto all = loops(std::nullopt);
    for (auto& entry : all["functions"])
        if (entry["function"] == function)
            return entry;
    return {{"function", f.id}, {"name", f.name}, {"display_name", f.display_name}, {"loops", json::array()}};
}

json Navigator::inlining(const std::optional<RangeList>& filter) const
{
    const auto& m = *model_;
    std::vector<bool> matched(m.inlines.size(), !filter.has_value());
    std::vector<bool> keep(m.inlines.size(), !filter.has_value());
    if (filter) {
        for (auto i : selection::query_ranges(index_.inlines, range_union(*filter))) {
            matched[i] = true;
            for (std::optional<InlineIndex> p = i; p; p = m.inlines[*p].parent)
                keep[*p] = true;
        }
    }

    std::function<json(InlineIndex)> node = [&](InlineIndex i) {
        const auto& n = m.inlines[i];
        json children = json::array();
        for (auto c : n.children)
            if (keep[c])
                children.push_back(node(c));
        json out = {{"id", n.id},
                    {"name", n.callee_name},
                    {"display_name", elide_name(n.callee_name)},
                    {"ranges", ingest::ranges_to_json(n.ranges)},
                    {"depth", n.depth},
                    {"inlined", n.parent.has_value()},
                    {"orphan", n.orphan},
                    {"matched", static_cast<bool>(matched[i])},
                    {"children", std::move(children)}};
        out["call_site"] = n.call_site ? json{{"file", n.call_site->file}, {"line", n.call_site->line}} : json(nullptr);
        return out;
    };

    json roots = json::array();
    for (InlineIndex i = 0; i < m.inlines.size(); ++i)
        if (!m.inlines[i].parent && keep[i])
            roots.push_back(node(i));
    return {{"filtered", filter.has_value()}, {"roots", std::move(roots)}};
}

json Navigator::callgraph(const std::optional<RangeList>& filter) const
{
    const auto& m = *model_;
    std::set<FunctionId> focus;
    if (filter) {
        auto ranges = range_union(*filter);
        focus = selection::query_ranges(index_.functions, ranges);
        // Inlined callees have no ranges of their own; reach them by name.
        for (auto i : selection::query_ranges(index_.inlines, ranges))
            if (m.inlines[i].parent)
                if (auto f = m.function_by_name(m.inlines[i].callee_name))
                    focus.insert(*f);
    }

    std::set<FunctionId> keep;
    if (!filter) {
        for (const auto& f : m.functions)
            keep.insert(f.id);
    } else {
        keep = focus;
        for (const auto& e : m.call_edges)
            if (focus.count(e.caller) || focus.count(e.callee)) {
                keep.insert(e.caller);
                keep.insert(e.callee);
            }
    }

    json nodes = json::array();
    for (auto id : keep) {
        const auto& f = m.functions[id];
        nodes.push_back({{"id", f.id},
                         {"name", f.name},
                         {"display_name", f.display_name},
                         {"external", f.external},
                         {"focus", !filter || focus.count(id) > 0}});
    }
    json edges = json::array();
    for (const auto& e : m.call_edges)
        if (keep.count(e.caller) && keep.count(e.callee))
            edges.push_back({{"caller", e.caller}, {"callee", e.callee}, {"inlined", e.inlined}});
    return {{"filtered", filter.has_value()}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

json Navigator::search(std::string_view query, std::size_t limit) const
{
    json results = json::array();
    for (auto id : selection::search_functions(query, *model_, limit)) {
        const auto& f = model_->functions[id];
        results.push_back({{"id", f.id},
                           {"name", f.name},
                           {"display_name", f.display_name},
                           {"entry", format_address(f.entry_address)},
                           {"external", f.external},
                           {"match", match_kind(f.name, query)}});
    }
    return {{"query", query}, {"limit", limit}, {"results", std::move(results)}};
}

FunctionId Navigator::find_function(std::string_view name_or_id) const
{
    if (auto f = model_->function_by_name(name_or_id))
        return *f;
    if (auto n = parse_number(name_or_id); n && *n < model_->functions.size())
        return static_cast<FunctionId>(*n);
    throw selection::UnknownEntity("unknown function '" + std::string(name_or_id) + "'");
}

Origin Navigator::parse_origin(const json& o) const
{
    if (!o.is_object() || !o.contains("kind") || !o["kind"].is_string())
        throw BadRequest("origin must be an object with a string 'kind'");
    auto kind = o["kind"].get<std::string>();
    try {
        if (kind == "line") {
            auto first = o.at("line").get<std::uint32_t>();
            auto last = o.contains("last_line") ? o["last_line"].get<std::uint32_t>() : first;
            return selection::LineOrigin{o.at("file").get<std::string>(), first, last};
        }
        if (kind == "range") {
            RangeList ranges;
            if (o.contains("ranges"))
                for (const auto& r : o["ranges"]) {
                    auto s = parse_address(r.at("start").get<std::string>());
                    auto e = parse_address(r.at("end").get<std::string>());
                    if (!s || !e)
                        throw BadRequest("malformed address in range origin");
                    ranges.push_back({*s, *e});
                }
            else {
                auto s = parse_address(o.at("start").get<std::string>());
                auto e = parse_address(o.at("end").get<std::string>());
                if (!s || !e)
                    throw BadRequest("malformed address in range origin");
                ranges.push_back({*s, *e});
            }
            return selection::RangeOrigin{std::move(ranges)};
        }
        if (kind == "blocks" || kind == "block") {
            std::vector<BlockId> ids;
            if (o.contains("ids"))
                ids = o["ids"].get<std::vector<BlockId>>();
            else
                ids.push_back(o.at("id").get<BlockId>());
            return selection::BlockOrigin{std::move(ids)};
        }
        if (kind == "loop") {
            auto id = o.at("id").get<std::string>();
            auto loop = model_->loop_by_id(id);
            if (!loop)
                throw selection::UnknownEntity("unknown loop '" + id + "'");
            return selection::LoopOrigin{*loop};
        }
        if (kind == "function") {
            if (o.contains("name"))
                return selection::FunctionOrigin{find_function(o["name"].get<std::string>())};
            return selection::FunctionOrigin{o.at("id").get<FunctionId>()};
        }
        if (kind == "inline") {
            auto id = o.at("id").get<std::string>();
            auto node = model_->inline_by_id(id);
            if (!node)
                throw selection::UnknownEntity("unknown inline node '" + id + "'");
            return selection::InlineOrigin{*node};
        }
    } catch (const json::exception& e) {
        throw BadRequest(std::string("malformed origin: ") + e.what());
    }
    throw BadRequest("unknown origin kind '" + kind + "'");
}

json resolved_to_json(const selection::ResolvedSelection& r, const ProgramModel& model)
{
    json lines = json::array();
    for (const auto& l : r.source_lines)
        lines.push_back({{"file", l.file}, {"line", l.line}});
    json instructions = json::array();
    for (auto a : r.instructions)
        instructions.push_back(format_address(a));
    json loops = json::array();
    for (auto i : r.loops)
        loops.push_back(model.loops[i].id);
    json inlines = json::array();
    for (auto i : r.inline_nodes)
        inlines.push_back(model.inlines[i].id);
    return {{"ranges", ingest::ranges_to_json(r.ranges)},
            {"empty", r.empty()},
            {"source_lines", std::move(lines)},
            {"instructions", std::move(instructions)},
            {"blocks", r.blocks},
            {"loops", std::move(loops)},
            {"functions", r.functions},
            {"inline_nodes", std::move(inlines)}};
}

json annotations_to_json(const std::vector<annotation::RenameRule>& rules)
{
    json out = json::array();
    for (const auto& r : rules) {
        json entry = {{"id", r.id}, {"register", r.register_name}, {"new_name", r.new_name}};
        entry["scope"] = r.scope ? range_json(*r.scope) : json(nullptr);
        out.push_back(std::move(entry));
    }
    return {{"rules", std::move(out)}};
}

RangeList parse_range_list(std::string_view text)
{
    RangeList out;
    while (!text.empty()) {
        auto comma = text.find(',');
        auto item = text.substr(0, comma);
        auto dash = item.find('-');
        if (dash == std::string_view::npos)
            throw BadRequest("range '" + std::string(item) + "' must look like start-end");
        auto s = parse_address(item.substr(0, dash));
        auto e = parse_address(item.substr(dash + 1));
        if (!s || !e || *s >= *e)
            throw BadRequest("invalid range '" + std::string(item) + "'");
        out.push_back({*s, *e});
        if (comma == std::string_view::npos)
            break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

std::vector<BlockId> parse_id_list(std::string_view text)
{
    std::vector<BlockId> out;
    while (!text.empty()) {
        auto comma = text.find(',');
        auto item = text.substr(0, comma);
        auto n = parse_number(item);
        if (!n || *n > std::numeric_limits<BlockId>::max())
            throw BadRequest("invalid id '" + std::string(item) + "'");
        out.push_back(static_cast<BlockId>(*n));
        if (comma == std::string_view::npos)
            break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

} // namespace asmnav::service
