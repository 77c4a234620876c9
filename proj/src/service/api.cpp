#include "asmnav/service/api.hpp"

#include <charconv>
#include <limits>

namespace asmnav::service {

namespace {

constexpr std::string_view kApiPrefix = "/api/";

std::optional<std::string> param(const Request& r, const std::string& key)
{
    auto it = r.params.find(key);
    if (it == r.params.end())
        return std::nullopt;
    return it->second;
}

std::size_t size_param(const Request& r, const std::string& key, std::size_t fallback)
{
    auto text = param(r, key);
    if (!text)
        return fallback;
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
    if (text->empty() || ec != std::errc{} || p != text->data() + text->size())
        throw BadRequest("parameter '" + key + "' must be a non-negative integer");
    return v;
}

Address address_param(const Request& r, const std::string& key)
{
    auto text = param(r, key);
    auto a = text ? parse_address(*text) : std::nullopt;
    if (!a)
        throw BadRequest("parameter '" + key + "' must be a hex address");
    return *a;
}

std::optional<RangeList> selection_param(const Request& r)
{
    auto text = param(r, "selection");
    if (!text)
        return std::nullopt;
    return parse_range_list(*text);
}

json parse_body(const Request& r)
{
    try {
        return json::parse(r.body);
    } catch (const json::parse_error& e) {
        throw BadRequest(std::string("body is not valid JSON: ") + e.what());
    }
}

Response ok(const json& body) { return {200, body.dump()}; }

std::string url_decode(std::string_view s)
{
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            unsigned v = 0;
            auto [p, ec] = std::from_chars(s.data() + i + 1, s.data() + i + 3, v, 16);
            if (ec == std::errc{} && p == s.data() + i + 3) {
                out.push_back(static_cast<char>(v));
                i += 2;
                continue;
            }
        }
        out.push_back(s[i]);
    }
    return out;
}

} // namespace

json error_body(std::string_view kind, std::string_view message)
{
    return {{"error", {{"kind", kind}, {"message", message}}}};
}

Api::Api(ModelPtr model) : navigator_(std::move(model)) {}

annotation::AnnotationStore& Api::session(const std::string& name)
{
    std::lock_guard lock(sessions_mutex_);
    auto& slot = sessions_[name];
    if (!slot)
        slot = std::make_unique<annotation::AnnotationStore>();
    return *slot;
}

Response Api::handle(const Request& request)
{
    try {
        return dispatch(request);
    } catch (const BadRequest& e) {
        return {400, error_body("BadRequest", e.what()).dump()};
    } catch (const annotation::InvalidRule& e) {
        return {400, error_body("InvalidRule", e.what()).dump()};
    } catch (const selection::UnknownEntity& e) {
        return {404, error_body("UnknownEntity", e.what()).dump()};
    } catch (const annotation::UnknownRule& e) {
        return {404, error_body("UnknownRule", e.what()).dump()};
    }
}

Response Api::dispatch(const Request& r)
{
    const auto& nav = navigator_;
    if (!r.path.starts_with(kApiPrefix))
        return {404, error_body("NotFound", "no such endpoint").dump()};
    std::string_view route = std::string_view(r.path).substr(kApiPrefix.size());
    auto method_not_allowed = [&] { return Response{405, error_body("MethodNotAllowed", r.method + " " + r.path).dump()}; };

    if (route == "summary")
        return r.method == "GET" ? ok(nav.summary()) : method_not_allowed();
    if (route == "sources")
        return r.method == "GET" ? ok(nav.sources()) : method_not_allowed();
    if (route.starts_with("source/")) {
        if (r.method != "GET")
            return method_not_allowed();
        return ok(nav.source(url_decode(route.substr(7))));
    }
    if (route == "disassembly") {
        if (r.method != "GET")
            return method_not_allowed();
        std::optional<AddressRange> window;
        if (param(r, "start") || param(r, "end")) {
            auto start = param(r, "start") ? address_param(r, "start") : Address{0};
            auto end = param(r, "end") ? address_param(r, "end") : std::numeric_limits<Address>::max();
            if (start >= end)
                throw BadRequest("disassembly window must have start < end");
            window = AddressRange{start, end};
        }
        auto snapshot = session(r.session).snapshot();
        return ok(nav.disassembly(window, size_param(r, "offset", 0), size_param(r, "limit", kDefaultPageSize),
                                  *snapshot));
    }
    if (route == "selection") {
        if (r.method != "POST")
            return method_not_allowed();
        auto body = parse_body(r);
        if (!body.is_object() || !body.contains("origin"))
            throw BadRequest("body must be {\"origin\": {...}}");
        return ok(nav.selection(nav.parse_origin(body["origin"])));
    }
    if (route == "cfg") {
        if (r.method != "GET")
            return method_not_allowed();
        auto blocks = param(r, "blocks");
        if (!blocks || blocks->empty())
            throw BadRequest("cfg needs 'blocks'");
        auto k = size_param(r, "k", selection::kDefaultHops);
        if (k > 1000)
            throw BadRequest("k is too large");
        return ok(nav.cfg(parse_id_list(*blocks), static_cast<unsigned>(k)));
    }
    if (route == "loops")
        return r.method == "GET" ? ok(nav.loops(selection_param(r))) : method_not_allowed();
    if (route == "inlining")
        return r.method == "GET" ? ok(nav.inlining(selection_param(r))) : method_not_allowed();
    if (route == "callgraph")
        return r.method == "GET" ? ok(nav.callgraph(selection_param(r))) : method_not_allowed();
    if (route == "search") {
        if (r.method != "GET")
            return method_not_allowed();
        return ok(nav.search(param(r, "q").value_or(""), size_param(r, "limit", kDefaultSearchLimit)));
    }
    if (route == "annotations")
        return r.method == "GET" ? ok(annotations_to_json(session(r.session).list_renames())) : method_not_allowed();
    if (route == "annotations/rename") {
        auto& store = session(r.session);
        if (r.method == "POST") {
            auto body = parse_body(r);
            std::optional<AddressRange> scope;
            std::string reg, name;
            try {
                reg = body.at("register").get<std::string>();
                name = body.at("new_name").get<std::string>();
                if (body.contains("scope") && !body["scope"].is_null()) {
                    auto s = parse_address(body["scope"].at("start").get<std::string>());
                    auto e = parse_address(body["scope"].at("end").get<std::string>());
                    if (!s || !e)
                        throw BadRequest("scope addresses must be hex");
                    scope = AddressRange{*s, *e};
                }
            } catch (const json::exception& e) {
                throw BadRequest(std::string("malformed rename: ") + e.what());
            }
            auto rule = store.add_rename(std::move(reg), std::move(name), scope);
            return ok(annotations_to_json({rule})["rules"][0]);
        }
        if (r.method == "DELETE") {
            if (!param(r, "id"))
                throw BadRequest("rename deletion needs 'id'");
            store.remove_rename(size_param(r, "id", 0));
            return ok(annotations_to_json(store.list_renames()));
        }
        return method_not_allowed();
    }
    return {404, error_body("NotFound", "no such endpoint").dump()};
}

} // namespace asmnav::service
