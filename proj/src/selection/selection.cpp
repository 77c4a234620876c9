#include "asmnav/selection/selection.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <tuple>

namespace asmnav::selection {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool file_known(const ProgramModel& model, std::string_view file)
{
    if (model.sources.count(std::string(file)))
        return true;
    const auto& m = model.line_map.mappings();
    auto it = std::lower_bound(m.begin(), m.end(), file,
                               [](const LineMapping& x, std::string_view f) { return x.file < f; });
    return it != m.end() && it->file == file;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

Selection make_selection(const ProgramModel& model, Origin origin)
{
    RangeList ranges = std::visit(
        overloaded{
            [&](const LineOrigin& o) {
                if (o.first_line == 0 || o.last_line < o.first_line)
                    throw UnknownEntity("invalid line span " + std::to_string(o.first_line) + ".." +
                                        std::to_string(o.last_line));
                if (!file_known(model, o.file))
                    throw UnknownEntity("unknown source file '" + o.file + "'");
                if (auto src = model.sources.find(o.file);
                    src != model.sources.end() && o.last_line > src->second.size())
                    throw UnknownEntity("line " + std::to_string(o.last_line) + " is past the end of '" + o.file + "'");
                RangeList out;
                const auto& m = model.line_map.mappings();
                auto it = std::lower_bound(m.begin(), m.end(), std::tuple(std::string_view(o.file), o.first_line),
                                           [](const LineMapping& x, const std::tuple<std::string_view, std::uint32_t>& k) {
                                               return std::tie(x.file, x.line) < k;
                                           });
                for (; it != m.end() && it->file == o.file && it->line <= o.last_line; ++it)
                    out.insert(out.end(), it->ranges.begin(), it->ranges.end());
                return out;
            },
            [&](const RangeOrigin& o) {
                for (const auto& r : o.ranges)
                    if (!r.valid())
                        throw UnknownEntity("invalid address range");
                return o.ranges;
            },
            [&](const BlockOrigin& o) {
                if (o.blocks.empty())
                    throw UnknownEntity("empty block selection");
                RangeList out;
                for (auto b : o.blocks) {
                    if (b >= model.blocks.size())
                        throw UnknownEntity("unknown block " + std::to_string(b));
                    out.push_back(model.blocks[b].range);
                }
                return out;
            },
            [&](const LoopOrigin& o) {
                if (o.loop >= model.loops.size())
                    throw UnknownEntity("unknown loop");
                return model.loops[o.loop].ranges;
            },
            [&](const FunctionOrigin& o) {
                if (o.function >= model.functions.size())
                    throw UnknownEntity("unknown function " + std::to_string(o.function));
                return model.functions[o.function].ranges;
            },
            [&](const InlineOrigin& o) {
                if (o.node >= model.inlines.size())
                    throw UnknownEntity("unknown inline node");
                return model.inlines[o.node].ranges;
            },
        },
        origin);
    return {std::move(origin), range_union(ranges)};
}

ResolvedSelection resolve(const Selection& selection, const ProgramModel& model, const IntervalIndex& index)
{
    ResolvedSelection out;
    out.ranges = selection.ranges;
    const auto& ranges = out.ranges;
    if (ranges.empty())
        return out;

    const auto& mappings = model.line_map.mappings();
    for (auto i : query_ranges(index.lines, ranges))
        out.source_lines.insert({mappings[i].file, mappings[i].line});
    out.blocks = query_ranges(index.blocks, ranges);
    out.functions = query_ranges(index.functions, ranges);
    out.loops = query_ranges(index.loops, ranges);
    out.inline_nodes = query_ranges(index.inlines, ranges);
    for (const auto& r : ranges)
        for (const auto& ins : model.instructions_in(r))
            out.instructions.insert(ins.address);

    // The origin already overlaps its own ranges; this only matters if an index
    // is out of step with the model.
    std::visit(overloaded{
                   [](const LineOrigin&) {},
                   [](const RangeOrigin&) {},
                   [&](const BlockOrigin& o) { out.blocks.insert(o.blocks.begin(), o.blocks.end()); },
                   [&](const LoopOrigin& o) { out.loops.insert(o.loop); },
                   [&](const FunctionOrigin& o) { out.functions.insert(o.function); },
                   [&](const InlineOrigin& o) { out.inline_nodes.insert(o.node); },
               },
               selection.origin);
    return out;
}

Subgraph cfg_neighborhood(std::span<const BlockId> seeds, unsigned hops, const ProgramModel& model,
                          bool expand_loops)
{
    const auto n = model.blocks.size();
    std::vector<std::vector<BlockId>> adjacent(n);
    for (const auto& e : model.cfg_edges) {
        adjacent[e.from].push_back(e.to);
        adjacent[e.to].push_back(e.from);
    }

    constexpr auto kUnseen = static_cast<unsigned>(-1);
    std::vector<unsigned> distance(n, kUnseen);
    std::deque<BlockId> queue;
    for (auto s : seeds)
        if (s < n && distance[s] == kUnseen) {
            distance[s] = 0;
            queue.push_back(s);
        }
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        if (distance[v] == hops)
            continue;
        for (auto w : adjacent[v])
            if (distance[w] == kUnseen) {
                distance[w] = distance[v] + 1;
                queue.push_back(w);
            }
    }

    std::vector<bool> keep(n, false);
    for (std::size_t v = 0; v < n; ++v)
        keep[v] = distance[v] != kUnseen;

    if (expand_loops) {
        std::vector<bool> seeded(n, false);
        for (auto s : seeds)
            if (s < n)
                seeded[s] = true;
        for (const auto& loop : model.loops) {
            bool touches = std::any_of(loop.body_blocks.begin(), loop.body_blocks.end(),
                                       [&](BlockId b) { return seeded[b]; });
            if (touches)
                for (auto b : loop.body_blocks)
                    keep[b] = true;
        }
    }

    Subgraph out;
    for (BlockId v = 0; v < n; ++v)
        if (keep[v])
            out.blocks.push_back(v);
    for (const auto& e : model.cfg_edges)
        if (keep[e.from] && keep[e.to])
            out.edges.push_back(e);
    return out;
}

std::vector<FunctionId> search_functions(std::string_view query, const ProgramModel& model, std::size_t limit)
{
    if (query.empty() || limit == 0)
        return {};
    auto needle = lower(query);

    struct Hit {
        int rank; // 0 exact, 1 prefix, 2 substring
        Address entry;
        FunctionId id;
    };
    std::vector<Hit> hits;
    for (const auto& f : model.functions) {
        auto name = lower(f.name);
        auto pos = name.find(needle);
        if (pos == std::string::npos)
            continue;
        int rank = name.size() == needle.size() ? 0 : pos == 0 ? 1 : 2;
        hits.push_back({rank, f.entry_address, f.id});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        return std::tie(a.rank, a.entry, a.id) < std::tie(b.rank, b.entry, b.id);
    });
    std::vector<FunctionId> out;
    for (std::size_t i = 0; i < hits.size() && i < limit; ++i)
        out.push_back(hits[i].id);
    return out;
}

} // namespace asmnav::selection
