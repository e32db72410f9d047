#include <doctest.h>

#include <httplib.h>

#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "strata/core.hpp"
#include "strata/labeling.hpp"

using namespace strata;

namespace {

struct FakeServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::string last_auth;
    nlohmann::json last_body;

    FakeServer() {
        server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            last_auth = req.get_header_value("Authorization");
            last_body = nlohmann::json::parse(req.body);
            const nlohmann::json reply = {
                {"choices", {{{"message", {{"role", "assistant"}, {"content", "Covid vaccine news\n"}}}}}}};
            res.set_content(reply.dump(), "application/json");
        });
        server.Post("/slow", [](const httplib::Request&, httplib::Response& res) {
            std::this_thread::sleep_for(std::chrono::milliseconds{800});
            res.set_content("{\"label\":\"late\"}", "application/json");
        });
        server.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
            res.status = 500;
            res.set_content("oops", "text/plain");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~FakeServer() {
        server.stop();
        thread.join();
    }
    std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port) + path; }
};

ErrorCode failure_code(LabelClient& client) {
    try {
        client.complete({"prompt", {"doc"}});
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Io;
}

}  // namespace

TEST_CASE("http label client speaks the chat-completions protocol") {
    FakeServer fake;
    ::setenv("STRATA_TEST_LABEL_KEY", "secret-token", 1);
    HttpLabelClient::Options opts;
    opts.endpoint = fake.url("/v1/chat/completions");
    opts.api_key_env = "STRATA_TEST_LABEL_KEY";
    opts.model = "test-model";
    HttpLabelClient client(opts);

    const std::vector<std::string> docs{"covid vaccine rollout", "vaccine trial results"};
    const auto label = llm_label(docs, client, {}, 3);
    CHECK(label == "Covid vaccine news");
    CHECK(fake.last_auth == "Bearer secret-token");
    CHECK(fake.last_body["model"] == "test-model");
    const auto prompt = fake.last_body["messages"][0]["content"].get<std::string>();
    CHECK(prompt.find("covid vaccine rollout") != std::string::npos);
}

TEST_CASE("http label client failures") {
    FakeServer fake;
    ::setenv("STRATA_TEST_LABEL_KEY", "k", 1);
    HttpLabelClient::Options opts;
    opts.api_key_env = "STRATA_TEST_LABEL_KEY";

    opts.endpoint = fake.url("/slow");
    opts.timeout = std::chrono::milliseconds{200};
    HttpLabelClient slow(opts);
    CHECK(failure_code(slow) == ErrorCode::ServiceUnavailable);

    opts.endpoint = fake.url("/broken");
    HttpLabelClient broken(opts);
    CHECK(failure_code(broken) == ErrorCode::ServiceUnavailable);

    opts.api_key_env = "STRATA_TEST_LABEL_KEY_UNSET";
    ::unsetenv("STRATA_TEST_LABEL_KEY_UNSET");
    HttpLabelClient keyless(opts);
    CHECK(failure_code(keyless) == ErrorCode::ServiceUnavailable);

    opts.endpoint = "http://127.0.0.1:1/nothing";
    opts.api_key_env = "STRATA_TEST_LABEL_KEY";
    HttpLabelClient refused(opts);
    CHECK(failure_code(refused) == ErrorCode::ServiceUnavailable);
}
