#include "asmnav/selection/index.hpp"
#include "asmnav/selection/interval_tree.hpp"
#include "asmnav/selection/selection.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace asmnav;
using namespace asmnav::selection;

namespace {

// Every entity overlapping `ranges`, found by scanning the model.
ResolvedSelection resolve_by_scan(const ProgramModel& m, const RangeList& ranges)
{
    ResolvedSelection out;
    out.ranges = ranges;
    for (const auto& lm : m.line_map.mappings())
        if (ranges_overlap(lm.ranges, ranges))
            out.source_lines.insert({lm.file, lm.line});
    for (const auto& i : m.instructions)
        if (ranges_overlap(RangeList{i.range()}, ranges))
            out.instructions.insert(i.address);
    for (const auto& b : m.blocks)
        if (ranges_overlap(RangeList{b.range}, ranges))
            out.blocks.insert(b.id);
    for (LoopIndex i = 0; i < m.loops.size(); ++i)
        if (ranges_overlap(m.loops[i].ranges, ranges))
            out.loops.insert(i);
    for (const auto& f : m.functions)
        if (ranges_overlap(f.ranges, ranges))
            out.functions.insert(f.id);
    for (InlineIndex i = 0; i < m.inlines.size(); ++i)
        if (ranges_overlap(m.inlines[i].ranges, ranges))
            out.inline_nodes.insert(i);
    return out;
}

std::vector<Origin> every_origin(const ProgramModel& m)
{
    std::vector<Origin> out;
    for (const auto& lm : m.line_map.mappings())
        out.push_back(LineOrigin{lm.file, lm.line, lm.line});
    for (const auto& b : m.blocks)
        out.push_back(BlockOrigin{{b.id}});
    for (LoopIndex i = 0; i < m.loops.size(); ++i)
        out.push_back(LoopOrigin{i});
    for (const auto& f : m.functions)
        out.push_back(FunctionOrigin{f.id});
    for (InlineIndex i = 0; i < m.inlines.size(); ++i)
        out.push_back(InlineOrigin{i});
    return out;
}

} // namespace

TEST_CASE("interval tree agrees with a linear scan")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        IntervalTree<int> tree;
        std::vector<std::pair<AddressRange, int>> stored;
        int n = static_cast<int>(rng() % 60);
        for (int i = 0; i < n; ++i) {
            Address a = rng() % 1000;
            AddressRange r{a, a + 1 + rng() % 80};
            tree.insert(r, i);
            stored.push_back({r, i});
        }
        tree.freeze();
        for (int q = 0; q < 50; ++q) {
            Address a = rng() % 1100;
            AddressRange r{a, a + 1 + rng() % 40};
            auto got = tree.query(r);
            REQUIRE(std::set<int>(got.begin(), got.end()) == testing::overlaps_by_scan(stored, std::span(&r, 1)));
            REQUIRE(got.size() == std::set<int>(got.begin(), got.end()).size());
        }
    }
}

TEST_CASE("interval tree edges")
{
    IntervalTree<int> tree;
    tree.freeze();
    CHECK(tree.query({0, 100}).empty());
    tree.insert({10, 20}, 1);
    tree.insert({20, 30}, 2);
    tree.insert({0, ~Address{0}}, 3);
    tree.freeze();
    CHECK(tree.stab(19) == std::vector<int>{3, 1});
    CHECK(tree.stab(20).size() == 2);
    CHECK(tree.stab(~Address{0}).empty());
    CHECK(tree.query({5, 5}).empty());
}

TEST_CASE("resolve matches a full scan for every origin in every fixture")
{
    for (const auto& f : testing::all_fixtures()) {
        CAPTURE(f.name);
        auto m = testing::fixture_model(f.name);
        auto index = IntervalIndex::build(*m);
        for (const auto& origin : every_origin(*m)) {
            auto sel = make_selection(*m, origin);
            auto got = resolve(sel, *m, index);
            REQUIRE(got == resolve_by_scan(*m, sel.ranges));
        }
    }
}

TEST_CASE("resolve matches a full scan for random ranges")
{
    std::mt19937_64 rng(23);
    auto m = testing::fixture_model("real");
    auto index = IntervalIndex::build(*m);
    auto lo = m->instructions.front().address, hi = m->instructions.back().range().end;
    for (int q = 0; q < 500; ++q) {
        RangeList ranges;
        for (int k = 0, n = 1 + static_cast<int>(rng() % 3); k < n; ++k) {
            Address a = lo + rng() % (hi - lo);
            ranges.push_back({a, a + 1 + rng() % 64});
        }
        auto sel = make_selection(*m, RangeOrigin{ranges});
        REQUIRE(resolve(sel, *m, index) == resolve_by_scan(*m, range_union(ranges)));
    }
}

TEST_CASE("a source line resolves to its blocks, loops and function")
{
    auto m = testing::fixture_model("toy/nested");
    auto index = IntervalIndex::build(*m);
    auto r = resolve(make_selection(*m, LineOrigin{"nested.c", 4, 4}), *m, index);
    CHECK(r.ranges == RangeList{{0x1008, 0x1018}});
    CHECK(r.blocks == std::set<BlockId>{2});
    CHECK(r.loops == std::set<LoopIndex>{0, 1});
    CHECK(r.functions == std::set<FunctionId>{0});
    CHECK(r.instructions.size() == 4);
    CHECK(r.inline_nodes.size() == 3);

    auto span = resolve(make_selection(*m, LineOrigin{"nested.c", 2, 3}), *m, index);
    CHECK(span.source_lines == std::set<SourceLocation>{{"nested.c", 2}, {"nested.c", 3}});
}

TEST_CASE("a line with no code resolves to an empty selection")
{
    auto m = testing::fixture_model("toy/diamond");
    auto index = IntervalIndex::build(*m);
    auto r = resolve(make_selection(*m, LineOrigin{"diamond.c", 1, 1}), *m, index);
    CHECK(r.empty());
    CHECK(r.ranges.empty());
    auto gap = resolve(make_selection(*m, RangeOrigin{{{0x5000, 0x6000}}}), *m, index);
    CHECK(gap.empty());
}

TEST_CASE("unknown origins throw")
{
    auto m = testing::fixture_model("toy/diamond");
    CHECK_THROWS_AS(make_selection(*m, LineOrigin{"nope.c", 1, 1}), UnknownEntity);
    CHECK_THROWS_AS(make_selection(*m, LineOrigin{"diamond.c", 0, 0}), UnknownEntity);
    CHECK_THROWS_AS(make_selection(*m, LineOrigin{"diamond.c", 3, 2}), UnknownEntity);
    CHECK_THROWS_AS(make_selection(*m, LineOrigin{"diamond.c", 8, 8}), UnknownEntity);
    CHECK_THROWS_AS(make_selection(*m, BlockOrigin{{99}}), UnknownEntity);
    CHECK_THROWS_AS(make_selection(*m, BlockOrigin{{}}), UnknownEntity);
    CHECK_THROWS_AS(make_selection(*m, LoopOrigin{0}), UnknownEntity);
    CHECK_THROWS_AS(make_selection(*m, FunctionOrigin{7}), UnknownEntity);
    CHECK_THROWS_AS(make_selection(*m, InlineOrigin{7}), UnknownEntity);
    CHECK_THROWS_AS(make_selection(*m, RangeOrigin{{{0x20, 0x10}}}), UnknownEntity);
}

TEST_CASE("ranges are normalized on selection")
{
    auto m = testing::fixture_model("toy/diamond");
    auto sel = make_selection(*m, RangeOrigin{{{0x1010, 0x1014}, {0x1000, 0x1008}, {0x1004, 0x1010}}});
    CHECK(sel.ranges == RangeList{{0x1000, 0x1014}});
}

TEST_CASE("neighborhood agrees with relaxation for every block and hop count")
{
    for (const char* name : {"ltimes", "real", "toy/nested", "toy/calls", "toy/irreducible"}) {
        CAPTURE(name);
        auto m = testing::fixture_model(name);
        for (const auto& b : m->blocks)
            for (unsigned k : {0u, 1u, 2u, 3u, 6u}) {
                std::vector<BlockId> seeds{b.id};
                if (b.id + 5 < m->blocks.size())
                    seeds.push_back(b.id + 5);
                auto got = cfg_neighborhood(seeds, k, *m);
                auto expect = testing::neighborhood_by_relaxation(*m, seeds, k);
                REQUIRE(std::set<BlockId>(got.blocks.begin(), got.blocks.end()) == expect);
                REQUIRE(std::is_sorted(got.blocks.begin(), got.blocks.end()));
                for (const auto& e : m->cfg_edges) {
                    bool inside = expect.count(e.from) && expect.count(e.to);
                    REQUIRE(inside == (std::find(got.edges.begin(), got.edges.end(), e) != got.edges.end()));
                }
            }
    }
}

TEST_CASE("neighborhood of a loop block includes the whole loop even at zero hops")
{
    auto m = testing::fixture_model("toy/nested");
    std::vector<BlockId> seed{2};
    auto g = cfg_neighborhood(seed, 0, *m);
    CHECK(g.blocks == std::vector<BlockId>{1, 2, 3});
    auto bare = cfg_neighborhood(seed, 0, *m, false);
    CHECK(bare.blocks == std::vector<BlockId>{2});
    CHECK(bare.edges == std::vector<CfgEdge>{{2, 2, EdgeKind::branch_taken}});
    CHECK(kDefaultHops == 3);
}

TEST_CASE("function search ranks exact, prefix, then substring")
{
    auto m = testing::fixture_model("ltimes");
    auto hits = search_functions("main", *m, 10);
    REQUIRE_FALSE(hits.empty());
    CHECK(m->functions[hits[0]].name == "main");

    auto variants = search_functions("ltimes::run", *m, 10);
    REQUIRE(variants.size() >= 3);
    std::vector<std::string> names;
    for (auto id : variants)
        if (!m->functions[id].external)
            names.push_back(m->functions[id].name);
    REQUIRE(names.size() == 3);
    CHECK(names[0] == "LTIMES::runBaseVariant(int)");
    CHECK(names[1] == "LTIMES::runLambdaVariant(int)");
    CHECK(names[2] == "LTIMES::runRajaVariant(int)");

    CHECK(search_functions("variant", *m, 2).size() == 2);
    CHECK(search_functions("", *m, 10).empty());
    CHECK(search_functions("zzzz", *m, 10).empty());
    CHECK(search_functions("Variant", *m, 0).empty());
}

TEST_CASE("search ranking against a direct definition")
{
    auto m = testing::fixture_model("real");
    for (std::string q : {"a", "m", "_", "plt", "main", "e", "clones"}) {
        auto got = search_functions(q, *m, 1000);
        std::vector<std::tuple<int, Address, FunctionId>> expect;
        for (const auto& f : m->functions) {
            std::string n, l;
            for (char c : f.name)
                n += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            for (char c : q)
                l += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (n == l)
                expect.push_back({0, f.entry_address, f.id});
            else if (n.rfind(l, 0) == 0)
                expect.push_back({1, f.entry_address, f.id});
            else if (n.find(l) != std::string::npos)
                expect.push_back({2, f.entry_address, f.id});
        }
        std::sort(expect.begin(), expect.end());
        REQUIRE(got.size() == expect.size());
        for (std::size_t i = 0; i < got.size(); ++i)
            REQUIRE(got[i] == std::get<2>(expect[i]));
    }
}
