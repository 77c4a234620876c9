#include "asmnav/service/api.hpp"
#include "asmnav/service/query_expression.hpp"
#include "asmnav/service/server.hpp"

#include "fixtures.hpp"
#include "schemas.hpp"

#include <doctest.h>
#include <httplib.h>

#include <cstdlib>
#include <thread>

using namespace asmnav;
using namespace asmnav::service;

namespace {

using Type = json::value_t;

// Checks that `j` is an object whose listed keys have the listed JSON types.
// Unsigned and signed integers are treated alike.
void expect_shape(const json& j, std::initializer_list<std::pair<const char*, Type>> keys)
{
    REQUIRE(j.is_object());
    for (const auto& [key, type] : keys) {
        CAPTURE(key);
        REQUIRE(j.contains(key));
        auto t = j.at(key).type();
        if (t == Type::number_unsigned)
            t = Type::number_integer;
        auto want = type == Type::number_unsigned ? Type::number_integer : type;
        CHECK(t == want);
    }
}

constexpr auto kStr = Type::string;
constexpr auto kInt = Type::number_integer;
constexpr auto kBool = Type::boolean;
constexpr auto kArr = Type::array;

Request get(std::string path, std::map<std::string, std::string> params = {})
{
    return {"GET", std::move(path), std::move(params), "", kDefaultSession};
}

Request post(std::string path, const json& body, std::string session = kDefaultSession)
{
    return {"POST", std::move(path), {}, body.dump(), std::move(session)};
}

json body_of(const Response& r) { return json::parse(r.body); }

void expect_error(const Response& r, int status, const char* kind)
{
    CHECK(r.status == status);
    auto j = body_of(r);
    REQUIRE(j.contains("error"));
    CHECK(j["error"]["kind"] == kind);
    CHECK(j["error"]["message"].is_string());
}

} // namespace

TEST_CASE("summary and sources")
{
    Api api(testing::fixture_model("ltimes"));
    auto r = api.handle(get("/api/summary"));
    REQUIRE(r.status == 200);
    auto s = body_of(r);
    expect_shape(s, {{"schema_version", kInt}, {"isa", kStr}, {"instructions", kInt}, {"blocks", kInt},
                     {"cfg_edges", kInt}, {"functions", kInt}, {"external_functions", kInt}, {"call_edges", kInt},
                     {"loops", kInt}, {"inline_nodes", kInt}, {"mapped_lines", kInt}, {"variables", kInt},
                     {"sources", kInt}, {"parse_errors", kInt}, {"warnings", kInt}});
    const auto& m = api.navigator().model();
    CHECK(s["instructions"] == m.instructions.size());
    CHECK(s["blocks"] == m.blocks.size());
    CHECK(s["loops"] == m.loops.size());

    auto src = body_of(api.handle(get("/api/sources")));
    expect_shape(src, {{"files", kArr}});
    REQUIRE_FALSE(src["files"].empty());
    for (const auto& f : src["files"])
        expect_shape(f, {{"file", kStr}, {"available", kBool}, {"mapped_lines", kInt}});
    CHECK(src["default_file"] == "ltimes.cpp");
}

TEST_CASE("source text with mapped flags")
{
    Api api(testing::fixture_model("toy/diamond"));
    auto j = body_of(api.handle(get("/api/source/diamond.c")));
    expect_shape(j, {{"file", kStr}, {"available", kBool}, {"lines", kArr}});
    REQUIRE(j["lines"].size() == 7);
    expect_shape(j["lines"][0], {{"line", kInt}, {"text", kStr}, {"mapped", kBool}});
    CHECK(j["lines"][0]["mapped"] == false);
    CHECK(j["lines"][1]["mapped"] == true);
    CHECK(j["lines"][2]["text"] == "  if (x == y)");
    expect_error(api.handle(get("/api/source/other.c")), 404, "UnknownEntity");
}

TEST_CASE("source file names are url-decoded")
{
    Api api(testing::fixture_model("real"));
    auto files = body_of(api.handle(get("/api/sources")))["files"];
    for (const auto& f : files) {
        std::string name = f["file"];
        std::string encoded;
        for (char c : name)
            encoded += c == '/' ? std::string("%2F") : std::string(1, c);
        auto r = api.handle(get("/api/source/" + encoded));
        CAPTURE(name);
        CHECK(r.status == 200);
        CHECK(body_of(r)["file"] == name);
    }
}

TEST_CASE("disassembly pages and windows")
{
    Api api(testing::fixture_model("ltimes"));
    auto all = body_of(api.handle(get("/api/disassembly", {{"limit", "10"}})));
    expect_shape(all, {{"total", kInt}, {"offset", kInt}, {"limit", kInt}, {"instructions", kArr}});
    CHECK(all["total"] == 111);
    REQUIRE(all["instructions"].size() == 10);
    expect_shape(all["instructions"][0], {{"address", kStr}, {"length", kInt}, {"mnemonic", kStr},
                                          {"operands", kStr}, {"rendered_operands", kStr}, {"annotations", kArr},
                                          {"is_vector", kBool}, {"block", kInt}, {"function", kInt}});

    auto page = body_of(api.handle(get("/api/disassembly", {{"offset", "105"}, {"limit", "10"}})));
    CHECK(page["instructions"].size() == 6);

    auto win = body_of(api.handle(get("/api/disassembly", {{"start", "0x401020"}, {"end", "0x401030"}})));
    REQUIRE_FALSE(win["instructions"].empty());
    for (const auto& i : win["instructions"]) {
        auto a = *parse_address(i["address"].get<std::string>());
        CHECK(a < 0x401030);
    }

    auto capped = body_of(api.handle(get("/api/disassembly", {{"limit", "999999"}})));
    CHECK(capped["limit"] == kMaxPageSize);

    expect_error(api.handle(get("/api/disassembly", {{"start", "zz"}})), 400, "BadRequest");
    expect_error(api.handle(get("/api/disassembly", {{"start", "0x20"}, {"end", "0x10"}})), 400, "BadRequest");
    expect_error(api.handle(get("/api/disassembly", {{"limit", "-1"}})), 400, "BadRequest");
}

TEST_CASE("vector instructions are flagged")
{
    Api api(testing::fixture_model("ltimes"));
    auto all = body_of(api.handle(get("/api/disassembly", {{"limit", "5000"}})));
    bool ymm = false;
    for (const auto& i : all["instructions"])
        if (i["operands"].get<std::string>().find("%ymm") != std::string::npos) {
            CHECK(i["is_vector"] == true);
            ymm = true;
        }
    CHECK(ymm);
}

TEST_CASE("selection endpoint for every origin kind")
{
    Api api(testing::fixture_model("toy/nested"));
    auto check = [&](const json& origin) {
        auto r = api.handle(post("/api/selection", {{"origin", origin}}));
        CAPTURE(origin.dump());
        REQUIRE(r.status == 200);
        auto j = body_of(r);
        expect_shape(j, {{"ranges", kArr}, {"empty", kBool}, {"source_lines", kArr}, {"instructions", kArr},
                         {"blocks", kArr}, {"loops", kArr}, {"functions", kArr}, {"inline_nodes", kArr}});
        return j;
    };
    auto line = check({{"kind", "line"}, {"file", "nested.c"}, {"line", 4}});
    CHECK(line["blocks"] == json::array({2}));
    CHECK(line["loops"] == json::array({"loop1", "loop1.1"}));
    auto range = check({{"kind", "range"}, {"start", "0x1000"}, {"end", "0x1004"}});
    CHECK(range["blocks"] == json::array({0}));
    check({{"kind", "range"}, {"ranges", {{{"start", "0x1000"}, {"end", "0x1004"}}}}});
    check({{"kind", "blocks"}, {"ids", {1, 2}}});
    auto loop = check({{"kind", "loop"}, {"id", "loop1.1"}});
    CHECK(loop["loops"] == json::array({"loop1", "loop1.1"}));
    check({{"kind", "function"}, {"name", "saxpy2d"}});
    check({{"kind", "inline"}, {"id", "0/1"}});
    auto empty = check({{"kind", "line"}, {"file", "nested.c"}, {"line", 1}});
    CHECK(empty["empty"] == true);

    expect_error(api.handle(post("/api/selection", {{"origin", {{"kind", "loop"}, {"id", "loop9"}}}})), 404,
                 "UnknownEntity");
    expect_error(api.handle(post("/api/selection", {{"origin", {{"kind", "planet"}}}})), 400, "BadRequest");
    expect_error(api.handle(post("/api/selection", {{"nope", 1}})), 400, "BadRequest");
    expect_error(api.handle({"POST", "/api/selection", {}, "{not json", kDefaultSession}), 400, "BadRequest");
    expect_error(api.handle(get("/api/selection")), 405, "MethodNotAllowed");
}

TEST_CASE("cfg neighborhood endpoint")
{
    Api api(testing::fixture_model("toy/diamond"));
    auto j = body_of(api.handle(get("/api/cfg", {{"blocks", "0"}, {"k", "1"}})));
    expect_shape(j, {{"k", kInt}, {"seeds", kArr}, {"blocks", kArr}, {"edges", kArr}, {"loops", kArr}});
    REQUIRE(j["blocks"].size() == 3);
    expect_shape(j["blocks"][0], {{"id", kInt}, {"label", kStr}, {"start", kStr}, {"end", kStr}, {"seed", kBool},
                                  {"loops", kArr}, {"function", kInt}});
    CHECK(j["blocks"][0]["label"] == "0 pick");
    CHECK(j["edges"].size() == 2);
    expect_shape(j["edges"][0], {{"from", kInt}, {"to", kInt}, {"kind", kStr}});

    auto dflt = body_of(api.handle(get("/api/cfg", {{"blocks", "0"}})));
    CHECK(dflt["k"] == 3);
    CHECK(dflt["blocks"].size() == 4);

    expect_error(api.handle(get("/api/cfg")), 400, "BadRequest");
    expect_error(api.handle(get("/api/cfg", {{"blocks", "x"}})), 400, "BadRequest");
    expect_error(api.handle(get("/api/cfg", {{"blocks", "0"}, {"k", "1001"}})), 400, "BadRequest");
    expect_error(api.handle(get("/api/cfg", {{"blocks", "40"}})), 404, "UnknownEntity");
}

TEST_CASE("hierarchy endpoints")
{
    Api api(testing::fixture_model("ltimes"));
    auto loops = body_of(api.handle(get("/api/loops")));
    expect_shape(loops, {{"filtered", kBool}, {"functions", kArr}});
    std::size_t count = 0;
    std::function<void(const json&)> walk = [&](const json& l) {
        expect_shape(l, {{"id", kStr}, {"header", kInt}, {"blocks", kArr}, {"ranges", kArr}, {"depth", kInt},
                         {"matched", kBool}, {"children", kArr}});
        ++count;
        for (const auto& c : l["children"])
            walk(c);
    };
    for (const auto& f : loops["functions"]) {
        expect_shape(f, {{"function", kInt}, {"name", kStr}, {"display_name", kStr}, {"loops", kArr}});
        for (const auto& l : f["loops"])
            walk(l);
    }
    CHECK(count == 13);

    auto inl = body_of(api.handle(get("/api/inlining")));
    expect_shape(inl, {{"filtered", kBool}, {"roots", kArr}});
    expect_shape(inl["roots"][0], {{"id", kStr}, {"name", kStr}, {"display_name", kStr}, {"ranges", kArr},
                                   {"depth", kInt}, {"inlined", kBool}, {"orphan", kBool}, {"matched", kBool},
                                   {"children", kArr}});

    auto cg = body_of(api.handle(get("/api/callgraph")));
    expect_shape(cg, {{"filtered", kBool}, {"nodes", kArr}, {"edges", kArr}});
    expect_shape(cg["nodes"][0], {{"id", kInt}, {"name", kStr}, {"display_name", kStr}, {"external", kBool},
                                  {"focus", kBool}});
    expect_shape(cg["edges"][0], {{"caller", kInt}, {"callee", kInt}, {"inlined", kBool}});

    // Filtering to one loop keeps it and its ancestors only.
    const auto& m = api.navigator().model();
    auto deep = m.loops[*m.loop_by_id("loop3.1.1.2")];
    auto text = format_address(deep.ranges[0].start) + "-" + format_address(deep.ranges[0].end);
    auto filtered = body_of(api.handle(get("/api/loops", {{"selection", text}})));
    CHECK(filtered["filtered"] == true);
    REQUIRE(filtered["functions"].size() == 1);
    auto node = filtered["functions"][0]["loops"][0];
    for (const char* id : {"loop3", "loop3.1", "loop3.1.1"}) {
        CHECK(node["id"] == id);
        REQUIRE(node["children"].size() >= 1);
        node = node["children"].back();
    }
    CHECK(node["id"] == "loop3.1.1.2");
    CHECK(node["matched"] == true);

    expect_error(api.handle(get("/api/loops", {{"selection", "garbage"}})), 400, "BadRequest");
}

TEST_CASE("search endpoint")
{
    Api api(testing::fixture_model("ltimes"));
    auto j = body_of(api.handle(get("/api/search", {{"q", "variant"}})));
    expect_shape(j, {{"query", kStr}, {"limit", kInt}, {"results", kArr}});
    REQUIRE(j["results"].size() >= 3);
    expect_shape(j["results"][0], {{"id", kInt}, {"name", kStr}, {"display_name", kStr}, {"entry", kStr},
                                   {"external", kBool}, {"match", kStr}});
    CHECK(body_of(api.handle(get("/api/search", {{"q", "variant"}, {"limit", "1"}})))["results"].size() == 1);
    CHECK(body_of(api.handle(get("/api/search")))["results"].empty());
}

TEST_CASE("renames are per session and show up in disassembly")
{
    Api api(testing::fixture_model("ltimes"));
    auto rule = api.handle(post("/api/annotations/rename", {{"register", "%rcx"}, {"new_name", "count"}}, "alice"));
    REQUIRE(rule.status == 200);
    auto r = body_of(rule);
    expect_shape(r, {{"id", kInt}, {"register", kStr}, {"new_name", kStr}});
    CHECK(r["scope"].is_null());

    auto scoped = post("/api/annotations/rename",
                       {{"register", "rax"}, {"new_name", "acc"}, {"scope", {{"start", "0x401100"}, {"end", "0x401170"}}}},
                       "alice");
    CHECK(api.handle(scoped).status == 200);

    auto mine = get("/api/annotations");
    mine.session = "alice";
    CHECK(body_of(api.handle(mine))["rules"].size() == 2);
    CHECK(body_of(api.handle(get("/api/annotations")))["rules"].empty());

    auto dis = get("/api/disassembly", {{"limit", "5000"}});
    dis.session = "alice";
    std::size_t manual = 0;
    auto alice_rows = body_of(api.handle(dis));
    for (const auto& i : alice_rows["instructions"])
        for (const auto& a : i["annotations"])
            if (a["source"] == "manual") {
                ++manual;
                CHECK(a["rule"].is_number());
            }
    CHECK(manual > 0);
    auto default_rows = body_of(api.handle(get("/api/disassembly", {{"limit", "5000"}})));
    for (const auto& i : default_rows["instructions"])
        for (const auto& a : i["annotations"])
            CHECK(a["source"] == "automated");

    Request del{"DELETE", "/api/annotations/rename", {{"id", "1"}}, "", "alice"};
    auto left = body_of(api.handle(del));
    CHECK(left["rules"].size() == 1);
    expect_error(api.handle(del), 404, "UnknownRule");
    expect_error(api.handle({"DELETE", "/api/annotations/rename", {}, "", "alice"}), 400, "BadRequest");
    expect_error(api.handle(post("/api/annotations/rename", {{"register", "rax"}, {"new_name", ""}})), 400,
                 "InvalidRule");
    expect_error(api.handle(post("/api/annotations/rename", {{"register", "rax"}})), 400, "BadRequest");
    expect_error(api.handle(post("/api/annotations/rename",
                                 {{"register", "rax"}, {"new_name", "x"}, {"scope", {{"start", "0x10"}, {"end", "0x10"}}}})),
                 400, "InvalidRule");
    expect_error(api.handle(get("/api/annotations/rename")), 405, "MethodNotAllowed");
}

TEST_CASE("unknown routes")
{
    Api api(testing::fixture_model("toy/diamond"));
    expect_error(api.handle(get("/api/nothing")), 404, "NotFound");
    expect_error(api.handle(get("/elsewhere")), 404, "NotFound");
    expect_error(api.handle({"DELETE", "/api/summary", {}, "", kDefaultSession}), 405, "MethodNotAllowed");
}

TEST_CASE("every query expression matches its endpoint")
{
    Api api(testing::fixture_model("toy/nested"));
    const auto& nav = api.navigator();
    CHECK(evaluate_query(nav, "summary") == body_of(api.handle(get("/api/summary"))));
    CHECK(evaluate_query(nav, "loops") == body_of(api.handle(get("/api/loops"))));
    CHECK(evaluate_query(nav, "inlining") == body_of(api.handle(get("/api/inlining"))));
    CHECK(evaluate_query(nav, "callgraph") == body_of(api.handle(get("/api/callgraph"))));
    CHECK(evaluate_query(nav, "source nested.c") == body_of(api.handle(get("/api/source/nested.c"))));
    CHECK(evaluate_query(nav, "neighborhood 2 k=1") ==
          body_of(api.handle(get("/api/cfg", {{"blocks", "2"}, {"k", "1"}}))));
    CHECK(evaluate_query(nav, "search sax") == body_of(api.handle(get("/api/search", {{"q", "sax"}}))));
    CHECK(evaluate_query(nav, "resolve line nested.c:4") ==
          body_of(api.handle(
              post("/api/selection", {{"origin", {{"kind", "line"}, {"file", "nested.c"}, {"line", 4}}}}))));
    CHECK_THROWS_AS(evaluate_query(nav, "fly away"), BadRequest);
    CHECK_THROWS_AS(evaluate_query(nav, "resolve loop loop7"), selection::UnknownEntity);
    CHECK_THROWS_AS(evaluate_query(nav, ""), BadRequest);
}

TEST_CASE("bind addresses")
{
    auto b = parse_bind_address("0.0.0.0:9000");
    CHECK(b.host == "0.0.0.0");
    CHECK(b.port == 9000);
    CHECK(parse_bind_address(":81").host == "127.0.0.1");
    CHECK_THROWS_AS(parse_bind_address("localhost"), BadRequest);
    CHECK_THROWS_AS(parse_bind_address("h:70000"), BadRequest);
    CHECK_THROWS_AS(parse_bind_address("h:"), BadRequest);

    ::unsetenv(kBindEnvVar);
    CHECK(effective_bind_address("").port == 8080);
    CHECK(effective_bind_address("127.0.0.1:1234").port == 1234);
    ::setenv(kBindEnvVar, "127.0.0.1:4321", 1);
    CHECK(effective_bind_address("127.0.0.1:1234").port == 4321);
    ::unsetenv(kBindEnvVar);
}

TEST_CASE("http round trip")
{
    Server server(testing::fixture_model("toy/nested"));
    int port = server.bind({"127.0.0.1", 0});
    REQUIRE(port > 0);
    std::thread t([&] { server.run(); });

    httplib::Client client("127.0.0.1", port);
    client.set_connection_timeout(5);
    httplib::Result res;
    for (int attempt = 0; attempt < 50 && !(res = client.Get("/api/summary")); ++attempt)
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type").starts_with("application/json"));
    CHECK(json::parse(res->body) == server.api().navigator().summary());

    auto sel = client.Post("/api/selection", R"({"origin":{"kind":"blocks","ids":[2]}})", "application/json");
    REQUIRE(sel);
    CHECK(json::parse(sel->body)["loops"] == json::array({"loop1", "loop1.1"}));

    auto cfg = client.Get("/api/cfg?blocks=2&k=0");
    REQUIRE(cfg);
    CHECK(json::parse(cfg->body)["blocks"].size() == 3);

    httplib::Headers bob{{"X-Session", "bob"}};
    auto add = client.Post("/api/annotations/rename", bob, R"({"register":"r1","new_name":"row"})",
                           "application/json");
    REQUIRE(add);
    CHECK(add->status == 200);
    CHECK(json::parse(client.Get("/api/annotations", bob)->body)["rules"].size() == 1);
    CHECK(json::parse(client.Get("/api/annotations?session=bob")->body)["rules"].size() == 1);
    CHECK(json::parse(client.Get("/api/annotations")->body)["rules"].empty());
    auto del = client.Delete("/api/annotations/rename?id=1", bob);
    REQUIRE(del);
    CHECK(del->status == 200);

    auto missing = client.Get("/api/loops?selection=0x5-0x1");
    REQUIRE(missing);
    CHECK(missing->status == 400);
    CHECK(json::parse(missing->body)["error"]["kind"] == "BadRequest");

    server.stop();
    t.join();
}

TEST_CASE("schema validator rejects documents that break the contract")
{
    const auto& rule = testing::endpoint_schema("rename_rule");
    CHECK(testing::schema_errors(json::parse(R"({"id":1,"register":"rax","new_name":"a","scope":null})"), rule).empty());
    CHECK(testing::schema_errors(json::parse(R"({"id":1,"register":"rax","new_name":"a"})"), rule).size() == 1);
    CHECK(testing::schema_errors(json::parse(R"({"id":0,"register":"rax","new_name":"a","scope":null})"), rule).size() ==
          1);
    CHECK(testing::schema_errors(json::parse(R"({"id":1,"register":2,"new_name":"a","scope":null,"x":1})"), rule)
              .size() == 2);
    auto loops = testing::endpoint_schema("loops");
    auto bad = json::parse(R"({"filtered":false,"functions":[{"function":0,"name":"f","display_name":"f","loops":[
        {"id":"loop1","header":0,"blocks":[0],"ranges":[],"depth":1,"matched":true,"children":[{"id":7}]}]}]})");
    CHECK_FALSE(testing::schema_errors(bad, loops).empty());
    CHECK_THROWS(testing::endpoint_schema("$defs"));
}
