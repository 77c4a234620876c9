#pragma once

#include "asmnav/annotation/store.hpp"
#include "asmnav/service/navigator.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace asmnav::service {

inline constexpr const char* kDefaultSession = "default";

struct Request {
    std::string method; // "GET", "POST", "DELETE"
    std::string path;   // "/api/summary"
    std::map<std::string, std::string> params;
    std::string body;
    std::string session = kDefaultSession;
};

struct Response {
    int status = 200;
    std::string body;
};

/// Transport-independent REST handler. Read endpoints are pure functions of the
/// model and the request; annotation endpoints touch only the caller's session.
class Api {
public:
    explicit Api(ModelPtr model);

    Response handle(const Request& request);

    const Navigator& navigator() const { return navigator_; }
    annotation::AnnotationStore& session(const std::string& name);

private:
    Response dispatch(const Request& request);

    Navigator navigator_;
    std::mutex sessions_mutex_;
    std::map<std::string, std::unique_ptr<annotation::AnnotationStore>> sessions_;
};

json error_body(std::string_view kind, std::string_view message);

} // namespace asmnav::service
