#include "asmnav/analysis/builder.hpp"

#include "asmnav/analysis/cfg.hpp"
#include "asmnav/analysis/debug_info.hpp"
#include "asmnav/analysis/dominators.hpp"
#include "asmnav/analysis/loops.hpp"
#include "asmnav/core/names.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace asmnav::analysis {

namespace {

constexpr std::uint32_t kMaxInferredLength = 15;

struct Listing {
    std::vector<Instruction> instructions;
    std::vector<std::optional<std::string>> owners; // symbol context per instruction
};

Listing collect_instructions(const std::vector<ingest::RawDisassemblyLine>& raw, Diagnostics& diag)
{
    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return raw[a].address < raw[b].address; });

    Listing out;
    for (std::size_t n = 0; n < order.size(); ++n) {
        const auto& r = raw[order[n]];
        Instruction ins;
        ins.address = r.address;
        ins.raw_bytes = r.raw_bytes;
        ins.mnemonic = r.mnemonic;
        ins.operand_text = r.operand_text;
        if (!r.raw_bytes.empty()) {
            ins.byte_length = static_cast<std::uint32_t>(r.raw_bytes.size());
        } else {
            // No encoding in the listing: infer the length from the next address.
            ins.byte_length = 1;
            if (n + 1 < order.size()) {
                auto next = raw[order[n + 1]].address;
                if (next > r.address && next - r.address <= kMaxInferredLength)
                    ins.byte_length = static_cast<std::uint32_t>(next - r.address);
            }
        }
        if (!out.instructions.empty()) {
            const auto& prev = out.instructions.back();
            if (prev.address == ins.address) {
                diag.warnings.push_back({"DuplicateInstruction", "duplicate instruction at " +
                                                                     format_address(ins.address) + " dropped"});
                continue;
            }
            if (prev.range().end > ins.address) {
                diag.warnings.push_back({"OverlappingInstruction", "instruction at " + format_address(ins.address) +
                                                                       " overlaps its predecessor; dropped"});
                continue;
            }
        }
        out.instructions.push_back(std::move(ins));
        out.owners.push_back(r.symbol_context);
    }
    return out;
}

std::vector<FunctionRecord> collect_functions(const Listing& listing,
                                              std::vector<std::optional<FunctionId>>& owner_ids)
{
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t k = 0; k < listing.instructions.size(); ++k)
        if (listing.owners[k])
            members[*listing.owners[k]].push_back(k);

    std::vector<FunctionRecord> functions;
    for (auto& [name, idx] : members) {
        FunctionRecord f;
        f.name = name;
        f.display_name = elide_name(name);
        f.entry_address = listing.instructions[idx.front()].address;
        RangeList ranges;
        for (auto k : idx)
            ranges.push_back(listing.instructions[k].range());
        f.ranges = range_union(ranges);
        functions.push_back(std::move(f));
    }
    std::stable_sort(functions.begin(), functions.end(),
                     [](const FunctionRecord& a, const FunctionRecord& b) { return a.entry_address < b.entry_address; });

    std::map<std::string_view, FunctionId> ids;
    for (FunctionId i = 0; i < functions.size(); ++i) {
        functions[i].id = i;
        ids.emplace(functions[i].name, i);
    }
    owner_ids.assign(listing.instructions.size(), std::nullopt);
    for (std::size_t k = 0; k < listing.instructions.size(); ++k)
        if (listing.owners[k])
            owner_ids[k] = ids.at(*listing.owners[k]);
    return functions;
}

void add_parse_issues(std::vector<Diagnostic>& out, const char* source, std::span<const ingest::ParseIssue> issues)
{
    for (const auto& i : issues)
        out.push_back({source, "line " + std::to_string(i.line_no) + ": " + i.message + ": " + i.text});
}

} // namespace

ProgramModel build_model(const AnalysisInput& input, const IsaTable& isa)
{
    ProgramModel model;
    model.isa = isa.name;
    auto& diag = model.diagnostics;
    add_parse_issues(diag.parse_errors, "disassembly", input.disassembly.errors);
    add_parse_issues(diag.parse_errors, "sidecar", input.sidecar.errors);
    add_parse_issues(diag.warnings, "disassembly", input.disassembly.warnings);

    auto listing = collect_instructions(input.disassembly.records, diag);
    std::vector<std::optional<FunctionId>> owner_ids;
    model.functions = collect_functions(listing, owner_ids);
    auto classify = isa.classifier();

    // Blocks never straddle a change of owning symbol.
    std::vector<Address> boundaries;
    for (std::size_t k = 0; k < listing.instructions.size(); ++k)
        if (k == 0 || owner_ids[k] != owner_ids[k - 1])
            boundaries.push_back(listing.instructions[k].address);
    model.blocks = partition_blocks(listing.instructions, classify, boundaries);
    {
        std::unordered_map<Address, std::size_t> position;
        for (std::size_t k = 0; k < listing.instructions.size(); ++k)
            position.emplace(listing.instructions[k].address, k);
        for (auto& b : model.blocks)
            b.function_id = owner_ids[position.at(b.range.start)];
    }

    auto cfg = build_cfg(model.blocks, listing.instructions, classify);
    model.cfg_edges = std::move(cfg.edges);
    diag.dangling_edges = std::move(cfg.dangling);

    // Per-function dominators and loops.
    std::vector<std::vector<BlockId>> blocks_of(model.functions.size());
    for (const auto& b : model.blocks)
        if (b.function_id)
            blocks_of[*b.function_id].push_back(b.id);

    std::vector<LoopNode> loops;
    for (const auto& f : model.functions) {
        const auto* entry = model.block_at(f.entry_address);
        if (!entry)
            continue;
        FunctionGraph fg(blocks_of[f.id], model.cfg_edges);
        DominatorTree dom(fg.graph, fg.local.at(entry->id));
        for (NodeIndex v = 0; v < fg.blocks.size(); ++v)
            if (!dom.reachable(v))
                diag.unreachable_blocks.push_back(fg.blocks[v]);

        auto forest = detect_loops(fg.graph, dom);
        for (auto [from, to] : forest.irreducible_edges)
            diag.irreducible_edges.emplace_back(fg.blocks[from], fg.blocks[to]);

        auto local = function_loops(fg, forest, f.id, model.blocks);
        auto offset = static_cast<LoopIndex>(loops.size());
        for (auto& l : local) {
            if (l.parent)
                *l.parent += offset;
            for (auto& c : l.children)
                c += offset;
            loops.push_back(std::move(l));
        }
    }
    model.loops = assign_loop_ids(std::move(loops), model.blocks, model.functions);

    // Call graph: sidecar records first, then direct calls seen in the listing.
    std::vector<ingest::CallRecord> calls = input.sidecar.sidecar.call_records;
    {
        std::unordered_map<Address, FunctionId> by_entry;
        for (const auto& f : model.functions)
            by_entry.emplace(f.entry_address, f.id);
        for (std::size_t k = 0; k < listing.instructions.size(); ++k) {
            const auto& ins = listing.instructions[k];
            auto t = classify(ins);
            if (t.kind != TransferKind::call || !t.target || !owner_ids[k])
                continue;
            if (auto callee = by_entry.find(*t.target); callee != by_entry.end())
                calls.push_back({model.functions[*owner_ids[k]].name, model.functions[callee->second].name,
                                 ins.address, false});
        }
    }
    model.call_edges = build_call_graph(calls, model.functions);

    auto inlines = build_inline_forest(input.sidecar.sidecar.inline_records, model.functions);
    model.inlines = std::move(inlines.nodes);
    diag.warnings.insert(diag.warnings.end(), inlines.problems.begin(), inlines.problems.end());

    model.line_map = build_line_map(input.sidecar.sidecar.line_records);

    auto vars = annotate_variables(std::move(listing.instructions), input.sidecar.sidecar.variable_records);
    model.instructions = std::move(vars.instructions);
    model.variables = std::move(vars.locations);

    model.sources = input.sources;
    return model;
}

ProgramModel build_model_from_text(std::string_view disassembly, std::string_view sidecar, const IsaTable& isa)
{
    AnalysisInput input;
    input.disassembly = ingest::parse_disassembly_text(disassembly);
    input.sidecar = ingest::parse_debug_sidecar(sidecar);
    return build_model(input, isa);
}

std::string cfg_to_dot(const ProgramModel& model, FunctionId function)
{
    std::ostringstream out;
    const auto& f = model.functions.at(function);
    auto escape = [](std::string_view s) {
        std::string e;
        for (char c : s) {
            if (c == '"' || c == '\\')
                e += '\\';
            e += c;
        }
        return e;
    };
    out << "digraph \"" << escape(f.display_name) << "\" {\n  node [shape=box];\n";
    for (const auto& b : model.blocks)
        if (b.function_id == function)
            out << "  b" << b.id << " [label=\"" << b.id << "\\n" << escape(f.display_name) << "\"];\n";
    for (const auto& e : model.cfg_edges) {
        if (model.blocks[e.from].function_id != function || model.blocks[e.to].function_id != function)
            continue;
        out << "  b" << e.from << " -> b" << e.to << " [label=\"" << to_string(e.kind) << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace asmnav::analysis
