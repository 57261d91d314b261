#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "rerank/apiclient.hpp"
#include "rerank/testing/scripted_server.hpp"

using namespace rerank;

namespace {

std::vector<Document> two_docs() {
    Document d0;
    d0.doc_id = std::int64_t(10);
    d0.text = "first document";
    d0.metadata["source"] = std::string("alpha");
    Document d1;
    d1.doc_id = std::string("doc-b");
    d1.text = "second document";
    d1.metadata["source"] = std::string("beta");
    return {d0, d1};
}

ApiConfig config_for(const testing::ScriptedServer& server) {
    ApiConfig config;
    config.endpoint_url = server.url("/v1/rerank");
    config.credential = "super-secret-key-123";
    config.model_name = "rerank-english-v3.0";
    config.timeout_ms = 2000;
    config.max_retries = 2;
    config.backoff_base_ms = 1;
    return config;
}

constexpr const char* kTwoDocBody =
    R"({"results":[{"index":1,"relevance_score":0.9},{"index":0,"relevance_score":0.2}]})";

}  // namespace

TEST_CASE("api_rerank maps indices back to the original documents") {
    testing::ScriptedServer server({{200, kTwoDocBody}});
    const auto docs = two_docs();
    const auto results = api_rerank(config_for(server), "q", docs);

    REQUIRE(results.size() == 2);
    CHECK(results.has_scores());
    CHECK(results.at(0).doc_id() == DocId(std::string("doc-b")));
    CHECK(results.at(0).text() == "second document");
    CHECK(results.at(0).document.metadata.at("source") == MetaValue(std::string("beta")));
    CHECK(*results.at(0).score == 0.9);
    CHECK(results.at(1).doc_id() == DocId(std::int64_t(10)));
    CHECK(*results.at(1).score == 0.2);

    // wire body: documents as bare texts, model name, no top_n
    const auto body = nlohmann::json::parse(server.requests().at(0));
    CHECK(body["model"] == "rerank-english-v3.0");
    CHECK(body["query"] == "q");
    CHECK(body["documents"] == nlohmann::json::array({"first document", "second document"}));
    CHECK_FALSE(body.contains("top_n"));
}

TEST_CASE("api_rerank forwards top_n and omits unscored docs by default") {
    testing::ScriptedServer server({{200, R"({"results":[{"index":1,"relevance_score":0.9}]})"}});
    const auto results = api_rerank(config_for(server), "q", two_docs(), 1);
    REQUIRE(results.size() == 1);
    CHECK(results.at(0).doc_id() == DocId(std::string("doc-b")));
    const auto body = nlohmann::json::parse(server.requests().at(0));
    CHECK(body["top_n"] == 1);
}

TEST_CASE("include_unscored appends missing docs after the scored ones") {
    testing::ScriptedServer server({{200, R"({"results":[{"index":1,"relevance_score":0.9}]})"}});
    ApiConfig config = config_for(server);
    config.include_unscored = true;
    const auto results = HostedApiClient(config).rerank("q", two_docs(), 1);
    REQUIRE(results.size() == 2);
    CHECK(results.at(0).doc_id() == DocId(std::string("doc-b")));
    CHECK(results.at(1).doc_id() == DocId(std::int64_t(10)));
    // appended docs tie at the lowest returned score and keep overall coherence
    CHECK(*results.at(1).score == 0.9);
    CHECK(*results.at(0).score >= *results.at(1).score);
}

TEST_CASE("ordering is recomputed locally, not trusted from wire order") {
    // server returns entries highest-score-last
    testing::ScriptedServer server(
        {{200,
          R"({"results":[{"index":0,"relevance_score":0.1},{"index":1,"relevance_score":0.8}]})"}});
    const auto results = api_rerank(config_for(server), "q", two_docs());
    CHECK(*results.at(0).score == 0.8);
    CHECK(*results.at(1).score == 0.1);
}

TEST_CASE("malformed responses are rejected") {
    const auto docs = two_docs();

    SUBCASE("invalid JSON") {
        testing::ScriptedServer server({{200, "{not json"}});
        CHECK_THROWS_AS(api_rerank(config_for(server), "q", docs), MalformedResponse);
    }
    SUBCASE("index out of range") {
        testing::ScriptedServer server({{200, R"({"results":[{"index":5,"relevance_score":1.0}]})"}});
        CHECK_THROWS_AS(api_rerank(config_for(server), "q", docs), MalformedResponse);
    }
    SUBCASE("negative index") {
        testing::ScriptedServer server(
            {{200, R"({"results":[{"index":-1,"relevance_score":1.0}]})"}});
        CHECK_THROWS_AS(api_rerank(config_for(server), "q", docs), MalformedResponse);
    }
    SUBCASE("duplicate index") {
        testing::ScriptedServer server(
            {{200,
              R"({"results":[{"index":0,"relevance_score":1.0},{"index":0,"relevance_score":0.5}]})"}});
        CHECK_THROWS_AS(api_rerank(config_for(server), "q", docs), MalformedResponse);
    }
    SUBCASE("non-numeric score") {
        testing::ScriptedServer server(
            {{200, R"({"results":[{"index":0,"relevance_score":"NaN"}]})"}});
        CHECK_THROWS_AS(api_rerank(config_for(server), "q", docs), MalformedResponse);
    }
    SUBCASE("missing results array") {
        testing::ScriptedServer server({{200, R"({"outcome":[]})"}});
        CHECK_THROWS_AS(api_rerank(config_for(server), "q", docs), MalformedResponse);
    }
}

TEST_CASE("401 and 403 raise AuthError without retrying") {
    for (int status : {401, 403}) {
        testing::ScriptedServer server({{status, R"({"message":"bad key"})"}});
        CHECK_THROWS_AS(api_rerank(config_for(server), "q", two_docs()), AuthError);
        CHECK(server.request_count() == 1);
    }
}

TEST_CASE("429 is retried with backoff and then succeeds") {
    testing::ScriptedServer server({{429, "slow down"}, {200, kTwoDocBody}});
    const HostedApiClient client(config_for(server));
    const auto results = client.rerank("q", two_docs());
    CHECK(results.size() == 2);
    CHECK(server.request_count() == 2);
    const RetryTelemetry telemetry = client.telemetry();
    CHECK(telemetry.requests == 1);
    CHECK(telemetry.attempts == 2);
    CHECK(telemetry.retries == 1);
}

TEST_CASE("retry bound: total attempts are at most 1 + max_retries") {
    testing::ScriptedServer server({{429, "slow down"}});
    ApiConfig config = config_for(server);
    config.max_retries = 3;
    const HostedApiClient client(config);
    CHECK_THROWS_AS(client.rerank("q", two_docs()), RateLimited);
    CHECK(server.request_count() == 4);
    CHECK(client.telemetry().attempts == 4);
}

TEST_CASE("timeouts surface as Timeout") {
    testing::ScriptedServer server({{200, kTwoDocBody, "application/json", /*delay_ms=*/1500}});
    ApiConfig config = config_for(server);
    config.timeout_ms = 100;
    CHECK_THROWS_AS(api_rerank(config, "q", two_docs()), Timeout);
}

TEST_CASE("unreachable endpoints surface as Timeout") {
    ApiConfig config;
    config.endpoint_url = "http://127.0.0.1:1/rerank";  // nothing listens here
    config.credential = "k";
    config.model_name = "m";
    config.timeout_ms = 200;
    CHECK_THROWS_AS(api_rerank(config, "q", two_docs()), Timeout);
}

TEST_CASE("the credential never appears in rendered errors") {
    const std::string secret = "super-secret-key-123";
    auto check_error = [&](auto&& fn) {
        try {
            fn();
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find(secret) == std::string::npos);
            CHECK(e.detail().find(secret) == std::string::npos);
        }
    };

    SUBCASE("auth error echoing the credential in the body") {
        testing::ScriptedServer server({{401, "rejected key super-secret-key-123"}});
        check_error([&] { api_rerank(config_for(server), "q", two_docs()); });
    }
    SUBCASE("malformed response echoing the credential") {
        testing::ScriptedServer server({{200, "super-secret-key-123 {bad"}});
        check_error([&] { api_rerank(config_for(server), "q", two_docs()); });
    }
    SUBCASE("unexpected status echoing the credential") {
        testing::ScriptedServer server({{418, "super-secret-key-123"}});
        check_error([&] { api_rerank(config_for(server), "q", two_docs()); });
    }
}

TEST_CASE("score_documents returns wire scores aligned to input order") {
    testing::ScriptedServer server({{200, kTwoDocBody}});
    const HostedApiClient client(config_for(server));
    const auto scores = client.score_documents("q", two_docs());
    CHECK(scores == std::vector<double>{0.2, 0.9});
}

TEST_CASE("score_documents insists on full coverage") {
    testing::ScriptedServer server({{200, R"({"results":[{"index":0,"relevance_score":0.5}]})"}});
    const HostedApiClient client(config_for(server));
    CHECK_THROWS_AS(client.score_documents("q", two_docs()), MalformedResponse);
}

TEST_CASE("empty endpoint is rejected at construction") {
    ApiConfig config;
    config.credential = "k";
    CHECK_THROWS_AS(HostedApiClient{config}, BackendInitFailure);
}
