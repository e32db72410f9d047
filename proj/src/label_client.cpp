#include <httplib.h>

#include <cstdlib>
#include <json.hpp>

#include "strata/core.hpp"
#include "strata/labeling.hpp"

namespace strata {

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Endpoint split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorCode::InvalidConfig, "label endpoint must be a URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpLabelClient::HttpLabelClient(Options options) : options_(std::move(options)) {
    split_url(options_.endpoint);
}

std::string HttpLabelClient::complete(const LabelRequest& request) {
    const char* key = std::getenv(options_.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
        throw Error(ErrorCode::ServiceUnavailable, "environment variable " + options_.api_key_env + " is not set");

    const Endpoint ep = split_url(options_.endpoint);
    httplib::Client client(ep.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    nlohmann::json body = {
        {"model", options_.model},
        {"temperature", 0},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
    };
    httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};
    auto res = client.Post(ep.path, headers, body.dump(), "application/json");
    if (!res) throw Error(ErrorCode::ServiceUnavailable, "request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw Error(ErrorCode::ServiceUnavailable, "HTTP status " + std::to_string(res->status));

    try {
        const auto reply = nlohmann::json::parse(res->body);
        if (reply.contains("choices")) return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        if (reply.contains("label")) return reply.at("label").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ServiceUnavailable, std::string("unreadable reply: ") + e.what());
    }
    throw Error(ErrorCode::ServiceUnavailable, "reply carries no label");
}

}  // namespace strata
