#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "toolkg/error.hpp"
#include "toolkg/providers.hpp"

using namespace toolkg;

namespace {

// Loopback server with scripted handlers, stopped on destruction.
struct StubServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~StubServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
  RemoteEndpoint endpoint(const std::string& path, int attempts = 3) const {
    return {"http://127.0.0.1:" + std::to_string(port) + path, "secret", attempts, 5};
  }
};

}  // namespace

TEST_SUITE("remote") {
  TEST_CASE("embedding round trip with bearer key") {
    StubServer s;
    std::string auth;
    s.server.Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
      auth = req.get_header_value("Authorization");
      const auto body = nlohmann::json::parse(req.body);
      auto vectors = nlohmann::json::array();
      for (std::size_t i = 0; i < body["texts"].size(); ++i) vectors.push_back({1.0 * i, 1.0});
      res.set_content(nlohmann::json{{"vectors", vectors}}.dump(), "application/json");
    });
    s.start();
    RemoteEmbedder e(s.endpoint("/embed"));
    std::vector<std::string> texts = {"a", "b", "c"};
    const auto out = e.embed(texts);
    CHECK(out.size() == 3);
    CHECK(out[2].values == std::vector<double>{2.0, 1.0});
    CHECK(auth == "Bearer secret");
  }

  TEST_CASE("server errors are retried, auth errors are not") {
    StubServer s;
    std::atomic<int> flaky_calls{0}, auth_calls{0};
    s.server.Post("/flaky", [&](const httplib::Request&, httplib::Response& res) {
      if (++flaky_calls < 3) {
        res.status = 503;
        return;
      }
      res.set_content(R"({"text": "{\"is_valid\": true}"})", "application/json");
    });
    s.server.Post("/auth", [&](const httplib::Request&, httplib::Response& res) {
      ++auth_calls;
      res.status = 401;
    });
    s.start();
    RemoteGenerator g(s.endpoint("/flaky"));
    GeneratorRequest req{"p", SchemaTag::SequenceVerdict, "a>b", {}};
    CHECK(g.generate(req).parsed["is_valid"] == true);
    CHECK(flaky_calls == 3);

    RemoteGenerator denied(s.endpoint("/auth"));
    CHECK_THROWS_AS(denied.generate(req), Error);
    CHECK(auth_calls == 1);
  }

  TEST_CASE("rerank with a missing score breaks the contract") {
    StubServer s;
    s.server.Post("/rerank", [&](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"scores": [0.5]})", "application/json");
    });
    s.start();
    RemoteReranker r(s.endpoint("/rerank"));
    std::vector<RerankCandidate> cands = {{"a", "x"}, {"b", "y"}};
    try {
      r.rerank("q", cands);
      FAIL("expected contract error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ProviderContract);
    }
  }

  TEST_CASE("unreachable endpoint surfaces a provider error") {
    RemoteEmbedder e({"http://127.0.0.1:1/embed", "", 2, 1});
    std::vector<std::string> texts = {"a"};
    try {
      e.embed(texts);
      FAIL("expected provider error");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::Provider);
    }
  }
}
