#include "asmnav/service/server.hpp"

#include <httplib.h>

#include <charconv>
#include <cstdlib>

namespace asmnav::service {

namespace {

constexpr const char* kJson = "application/json; charset=utf-8";

Request to_request(const httplib::Request& req)
{
    Request r;
    r.method = req.method;
    r.path = req.path;
    r.body = req.body;
    for (const auto& [k, v] : req.params)
        r.params.emplace(k, v);
    if (auto s = req.get_header_value("X-Session"); !s.empty())
        r.session = s;
    else if (auto it = r.params.find("session"); it != r.params.end() && !it->second.empty())
        r.session = it->second;
    return r;
}

} // namespace

BindAddress parse_bind_address(std::string_view text)
{
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos)
        throw BadRequest("bind address must look like host:port");
    BindAddress out;
    out.host = std::string(text.substr(0, colon));
    if (out.host.empty())
        out.host = "127.0.0.1";
    auto port = text.substr(colon + 1);
    auto [p, ec] = std::from_chars(port.data(), port.data() + port.size(), out.port);
    if (port.empty() || ec != std::errc{} || p != port.data() + port.size() || out.port < 0 || out.port > 65535)
        throw BadRequest("bad port in bind address '" + std::string(text) + "'");
    return out;
}

BindAddress effective_bind_address(std::string_view requested)
{
    if (const char* env = std::getenv(kBindEnvVar); env && *env)
        return parse_bind_address(env);
    return parse_bind_address(requested.empty() ? kDefaultBind : requested);
}

struct Server::Impl {
    httplib::Server http;
};

Server::Server(ModelPtr model) : api_(std::move(model)), impl_(std::make_unique<Impl>())
{
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        auto out = api_.handle(to_request(req));
        res.status = out.status;
        res.set_content(out.body, kJson);
    };
    impl_->http.Get(R"(/api/.*)", handler);
    impl_->http.Post(R"(/api/.*)", handler);
    impl_->http.Delete(R"(/api/.*)", handler);
}

Server::~Server() { stop(); }

int Server::bind(const BindAddress& address)
{
    int port = address.port;
    if (port == 0)
        port = impl_->http.bind_to_any_port(address.host);
    else if (!impl_->http.bind_to_port(address.host, port))
        port = -1;
    if (port < 0)
        throw std::runtime_error("cannot bind " + address.host + ":" + std::to_string(address.port));
    return port;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::stop() { impl_->http.stop(); }

} // namespace asmnav::service
