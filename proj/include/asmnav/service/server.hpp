#pragma once

#include "asmnav/service/api.hpp"

#include <memory>
#include <string>

namespace asmnav::service {

inline constexpr const char* kBindEnvVar = "ASMNAV_BIND";
inline constexpr const char* kDefaultBind = "127.0.0.1:8080";

struct BindAddress {
    std::string host;
    int port = 0;
};

/// "host:port" or ":port". Throws BadRequest.
BindAddress parse_bind_address(std::string_view text);
/// The environment variable wins over `requested` when set.
BindAddress effective_bind_address(std::string_view requested);

/// HTTP front end over Api. Port 0 picks a free port.
class Server {
public:
    explicit Server(ModelPtr model);
    ~Server();

    /// Binds and returns the port actually used. Throws std::runtime_error.
    int bind(const BindAddress& address);
    /// Blocks until stop().
    void run();
    void stop();

    Api& api() { return api_; }

private:
    struct Impl;
    Api api_;
    std::unique_ptr<Impl> impl_;
};

} // namespace asmnav::service
