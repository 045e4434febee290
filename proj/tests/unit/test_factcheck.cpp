#include <gtest/gtest.h>

#include <chrono>

#include "../support/fakes.hpp"
#include "../support/support.hpp"
#include "claimguard/factcheck/factcheck.hpp"

using namespace claimguard;
using namespace claimguard::factcheck;
using claimguard::test::fenced;

namespace {

nlohmann::json review_body(const std::string& rating, const std::string& url = "https://fc.example/r/1") {
    return {{"claims",
             {{{"text", "reviewed claim"},
               {"claimReview",
                {{{"publisher", {{"name", "Checker"}}},
                  {"url", url},
                  {"textualRating", rating},
                  {"reviewDate", "2023-04-01T00:00:00Z"}}}}}}}};
}

FixtureSet fixtures(const std::string& query, int status, const std::string& body) {
    FixtureSet f;
    f.by_query[query] = {status, body};
    return f;
}

std::shared_ptr<gateway::MockProvider> analyzer(double confidence = 0.7) {
    auto p = std::make_shared<gateway::MockProvider>();
    p->set_default({fenced({{"label", "true"}, {"evidence", "panel view"}, {"confidence", confidence}})});
    return p;
}

} // namespace

TEST(RatingMap, NormalizesAndMaps) {
    const auto m = RatingMap::defaults();
    EXPECT_EQ(m.map("Pants on Fire!"), Label::False);
    EXPECT_EQ(m.map("  MOSTLY   true "), Label::True);
    EXPECT_EQ(m.map("Misleading."), Label::False);
    EXPECT_EQ(m.map("Half True"), Label::Nei);
    EXPECT_EQ(m.map(""), Label::Nei);
    EXPECT_EQ(RatingMap::normalize("Pants-on--Fire!!"), "pants on fire");
    const auto custom = RatingMap::from_json(nlohmann::json::parse(R"([{"pattern": "Half True", "label": "true"}])"));
    EXPECT_EQ(custom.map("half-true"), Label::True);
    EXPECT_EQ(custom.map("false"), Label::Nei);
}

TEST(ClaimsSearch, ParsesShape) {
    const auto m = parse_claims_search(review_body("False").dump());
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m[0].publisher, "Checker");
    EXPECT_EQ(m[0].textual_rating, "False");
    EXPECT_EQ(m[0].url, "https://fc.example/r/1");
    EXPECT_TRUE(parse_claims_search("{}").empty());
    EXPECT_THROW(parse_claims_search("not json"), InvalidArgument);
    EXPECT_THROW(parse_claims_search(R"({"claims": 5})"), InvalidArgument);
    EXPECT_THROW(parse_claims_search(R"({"claims": [{"claimReview": {}}]})"), InvalidArgument);
}

TEST(ClaimSearchClient, MatchNoMatchAndDegradedPaths) {
    FixtureSet f;
    f.by_query["matched"] = {200, review_body("False").dump()};
    f.by_query["quota"] = {429, "{}"};
    f.by_query["down"] = {503, ""};
    f.by_query["garbled"] = {200, "{\"claims\": [ {"};
    f.by_query["nourl"] = {200, review_body("True", "").dump()};
    auto transport = std::make_shared<FixtureTransport>(f);
    ClaimSearchConfig cfg;
    cfg.api_key = "k";
    ClaimSearchClient client(cfg, transport);

    const auto m = client.query("matched");
    ASSERT_TRUE(m.match);
    EXPECT_FALSE(m.warning);
    EXPECT_FALSE(client.query("unknown").match);
    for (const char* q : {"quota", "down", "garbled", "nourl"}) {
        const auto l = client.query(q);
        EXPECT_FALSE(l.match) << q;
        EXPECT_TRUE(l.warning) << q;
    }
}

TEST(ClaimSearchClient, CachesSuccessfulLookupsOnly) {
    FixtureSet f;
    f.by_query["matched"] = {200, review_body("False").dump()};
    f.by_query["quota"] = {429, "{}"};
    auto transport = std::make_shared<FixtureTransport>(f);
    ClaimSearchClient client({}, transport);
    client.query("matched");
    EXPECT_TRUE(client.query("  matched ").from_cache);
    client.query("quota");
    client.query("quota");
    EXPECT_EQ(transport->requests(), 3u);
    EXPECT_EQ(client.requests_sent(), 3u);

    ClaimSearchConfig no_cache;
    no_cache.cache_ttl = std::chrono::seconds(0);
    ClaimSearchClient uncached(no_cache, transport);
    uncached.query("matched");
    uncached.query("matched");
    EXPECT_EQ(transport->requests(), 5u);
}

TEST(ClaimSearchClient, TalksToLocalServerAndSendsKey) {
    MockFactCheckServer server(fixtures("rates rose", 200, review_body("Mostly True").dump()));
    ClaimSearchConfig cfg;
    cfg.endpoint = server.endpoint();
    cfg.api_key = "secret-key";
    ClaimSearchClient client(cfg, net::make_default_transport());
    const auto l = client.query("rates rose");
    ASSERT_TRUE(l.match);
    EXPECT_EQ(l.match->textual_rating, "Mostly True");
    EXPECT_EQ(server.last_key(), "secret-key");
    EXPECT_EQ(server.requests(), 1u);
}

TEST(ClaimSearchClient, UnreachableEndpointDegrades) {
    ClaimSearchConfig cfg;
    cfg.endpoint = "http://127.0.0.1:1/v1alpha1/claims:search";
    cfg.timeout = std::chrono::milliseconds(500);
    ClaimSearchClient client(cfg, net::make_default_transport());
    const auto l = client.query("anything");
    EXPECT_FALSE(l.match);
    EXPECT_TRUE(l.warning);
}

TEST(TokenBucket, ThrottlesAfterBurst) {
    TokenBucket bucket(50.0, 2.0);
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 5; ++i) bucket.acquire();
    const auto elapsed = std::chrono::steady_clock::now() - start;
    EXPECT_GE(elapsed, std::chrono::milliseconds(50));
    EXPECT_THROW(TokenBucket(0.0, 1.0), InvalidArgument);
}

TEST(FactCheckPipeline, ExternalMatchHasMaximalConfidence) {
    FactCheckMatch m{"reviewed", "Pants on Fire", "Checker", "https://fc.example/x", std::nullopt};
    const auto r = to_result(m, RatingMap::defaults());
    EXPECT_EQ(r.route(), RouteTag::ExternalMatch);
    EXPECT_EQ(r.label(), Label::False);
    EXPECT_EQ(r.confidence(), 1.0);
    EXPECT_EQ(r.source(), SourceAttribution::external_factcheck("https://fc.example/x"));
    EXPECT_NE(r.evidence().find("Checker"), std::string::npos);
}

TEST(FactCheckPipeline, FallbackAndDisabledFallback) {
    auto client = std::make_shared<test::FixedFactCheck>();
    auto llm = analyzer();
    FactCheckPipeline with_fallback(client, llm, {});
    FactCheckTrace trace;
    const auto r = with_fallback.verify(Claim("c", "text"), &trace);
    EXPECT_EQ(r.route(), RouteTag::LlmFallback);
    EXPECT_EQ(r.source(), SourceAttribution::parametric());
    EXPECT_DOUBLE_EQ(r.confidence(), 0.7);
    EXPECT_EQ(trace.exchanges.size(), 1u);

    FactCheckConfig external_only;
    external_only.llm_fallback = false;
    FactCheckPipeline no_fallback(client, llm, external_only);
    const auto n = no_fallback.verify(Claim("c", "text"));
    EXPECT_EQ(n.label(), Label::Nei);
    EXPECT_EQ(n.confidence(), 0.0);
    EXPECT_EQ(llm->total_calls(), 1u);
    EXPECT_EQ(client->calls(), 2u);
}

TEST(FactCheckPipeline, AnalyzerFailureGivesPlaceholder) {
    auto llm = std::make_shared<gateway::MockProvider>();
    llm->set_default({"", false, 500});
    FactCheckPipeline p(std::make_shared<test::FixedFactCheck>(), llm, {});
    const auto r = p.verify(Claim("c", "text"));
    EXPECT_EQ(r.confidence(), 0.0);
    EXPECT_EQ(r.route(), RouteTag::LlmFallback);
}
