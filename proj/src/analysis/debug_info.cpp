#include "asmnav/analysis/debug_info.hpp"

#include "asmnav/analysis/isa.hpp"
#include "asmnav/core/names.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <tuple>

namespace asmnav::analysis {

namespace {

std::string path_string(std::span<const std::uint32_t> path)
{
    std::string out;
    for (auto p : path)
        out += "/" + std::to_string(p);
    return out;
}

} // namespace

InlineForest build_inline_forest(std::span<const ingest::InlineRecord> records,
                                 std::span<const FunctionRecord> functions)
{
    InlineForest forest;

    std::map<std::string_view, FunctionId> by_name;
    for (const auto& f : functions)
        by_name.emplace(f.name, f.id);

    struct Group {
        std::string callee;
        RangeList ranges;
        std::optional<SourceLocation> call_site;
    };
    std::vector<std::map<std::vector<std::uint32_t>, Group>> groups(functions.size());

    for (const auto& r : records) {
        auto root = by_name.find(r.root_function);
        if (root == by_name.end()) {
            forest.problems.push_back({"OrphanInline", "inline record for '" + r.callee_name +
                                                           "' names unknown root function '" + r.root_function +
                                                           "'"});
            continue;
        }
        auto [it, fresh] = groups[root->second].try_emplace(r.path);
        auto& g = it->second;
        if (fresh) {
            g.callee = r.callee_name;
            g.call_site = r.call_site;
        } else if (g.callee != r.callee_name) {
            forest.problems.push_back({"InlineNameConflict", "path " + path_string(r.path) + " under '" +
                                                                 r.root_function + "' names both '" + g.callee +
                                                                 "' and '" + r.callee_name + "'"});
        }
        g.ranges.push_back(r.range);
    }

    for (const auto& f : functions) {
        auto root_index = static_cast<InlineIndex>(forest.nodes.size());
        InlineNode root;
        root.id = std::to_string(f.id);
        root.root_function = f.id;
        root.callee_name = f.name;
        root.ranges = f.ranges;
        forest.nodes.push_back(std::move(root));

        // Lexicographic path order is a preorder walk of the subtree.
        std::map<std::vector<std::uint32_t>, InlineIndex> placed{{{}, root_index}};
        for (auto& [path, g] : groups[f.id]) {
            std::vector<std::uint32_t> parent_path(path.begin(), path.end() - 1);
            auto parent = placed.find(parent_path);
            if (parent == placed.end()) {
                forest.problems.push_back({"MissingInlineParent", "inline path " + path_string(path) + " under '" +
                                                                      f.name + "' has no parent record"});
                continue;
            }
            auto index = static_cast<InlineIndex>(forest.nodes.size());
            InlineNode node;
            node.id = std::to_string(f.id) + path_string(path);
            node.root_function = f.id;
            node.callee_name = std::move(g.callee);
            node.ranges = range_union(g.ranges);
            node.call_site = std::move(g.call_site);
            node.parent = parent->second;
            node.depth = static_cast<std::uint32_t>(path.size());
            node.orphan = !ranges_contained(node.ranges, f.ranges);
            forest.nodes[parent->second].children.push_back(index);
            forest.nodes.push_back(std::move(node));
            placed.emplace(path, index);
        }
    }
    return forest;
}

std::vector<CallEdge> build_call_graph(std::span<const ingest::CallRecord> records,
                                       std::vector<FunctionRecord>& functions)
{
    std::map<std::string, FunctionId, std::less<>> by_name;
    for (const auto& f : functions)
        by_name.emplace(f.name, f.id);

    auto resolve = [&](const std::string& name) {
        if (auto it = by_name.find(name); it != by_name.end())
            return it->second;
        FunctionRecord placeholder;
        placeholder.id = static_cast<FunctionId>(functions.size());
        placeholder.name = name;
        placeholder.display_name = elide_name(name);
        placeholder.external = true;
        functions.push_back(placeholder);
        by_name.emplace(name, placeholder.id);
        return placeholder.id;
    };

    std::vector<CallEdge> edges;
    std::set<CallEdge> seen;
    for (const auto& r : records) {
        CallEdge e{resolve(r.caller), resolve(r.callee), r.inlined};
        if (seen.insert(e).second)
            edges.push_back(e);
    }
    return edges;
}

LineMap build_line_map(std::span<const ingest::LineRecord> records)
{
    std::vector<LineMapping> mappings;
    mappings.reserve(records.size());
    for (const auto& r : records)
        mappings.push_back({r.file, r.line, {r.range}});
    return LineMap(std::move(mappings));
}

std::string canonical_register(std::string_view name)
{
    if (!name.empty() && name.front() == '%')
        name.remove_prefix(1);
    std::string out(name);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string render_annotated_operands(std::string_view operands, std::span<const OperandAnnotation> annotations)
{
    std::string out;
    std::size_t i = 0;
    while (i < operands.size()) {
        if (!is_operand_token_char(operands[i])) {
            out += operands[i++];
            continue;
        }
        auto start = i;
        while (i < operands.size() && is_operand_token_char(operands[i]))
            ++i;
        auto token = operands.substr(start, i - start);
        out += token;
        auto key = canonical_register(token);
        for (const auto& a : annotations) {
            if (canonical_register(a.register_name) != key)
                continue;
            out += '<';
            for (std::size_t n = 0; n < a.names.size(); ++n) {
                if (n)
                    out += '|';
                out += a.names[n];
            }
            out += '>';
            break;
        }
    }
    return out;
}

VariableAnnotation annotate_variables(std::vector<Instruction> instructions,
                                      std::span<const ingest::VariableRecord> records)
{
    VariableAnnotation out;

    std::map<std::string, std::vector<std::size_t>> by_register;
    for (std::size_t k = 0; k < records.size(); ++k)
        by_register[canonical_register(records[k].register_name)].push_back(k);

    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& r = records[k];
        bool ambiguous = false;
        for (auto other : by_register[canonical_register(r.register_name)])
            if (other != k && records[other].name != r.name && records[other].range.overlaps(r.range))
                ambiguous = true;
        out.locations.push_back({r.name, r.register_name, r.range, ambiguous});
    }

    for (auto& ins : instructions) {
        ins.annotations.clear();
        ins.annotated_operand_text.reset();
        for (auto token : operand_tokens(ins.operand_text)) {
            auto key = canonical_register(token);
            auto regs = by_register.find(key);
            if (regs == by_register.end())
                continue;
            bool done = std::any_of(ins.annotations.begin(), ins.annotations.end(), [&](const OperandAnnotation& a) {
                return canonical_register(a.register_name) == key;
            });
            if (done)
                continue;
            OperandAnnotation a{std::string(token), {}};
            for (auto k : regs->second) {
                const auto& r = records[k];
                if (r.range.contains(ins.address) &&
                    std::find(a.names.begin(), a.names.end(), r.name) == a.names.end())
                    a.names.push_back(r.name);
            }
            if (!a.names.empty())
                ins.annotations.push_back(std::move(a));
        }
        if (!ins.annotations.empty())
            ins.annotated_operand_text = render_annotated_operands(ins.operand_text, ins.annotations);
    }
    out.instructions = std::move(instructions);
    return out;
}

} // namespace asmnav::analysis
