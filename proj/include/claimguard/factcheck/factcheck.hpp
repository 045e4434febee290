#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "claimguard/core/types.hpp"
#include "claimguard/gateway/analysis.hpp"
#include "claimguard/net/http.hpp"

namespace claimguard::factcheck {

struct FactCheckMatch {
    std::string matched_claim_text;
    std::string textual_rating;
    std::string publisher;
    std::string url;
    std::optional<std::string> review_date;

    bool operator==(const FactCheckMatch&) const = default;
};

nlohmann::json to_json(const FactCheckMatch& m);

/// Ordered (pattern -> label) rules over normalized ratings; first exact
/// match wins, anything unmatched is nei. Normalization lowercases and turns
/// every run of non-alphanumerics into one space, so "Pants on Fire!"
/// matches "pants on fire".
class RatingMap {
public:
    struct Rule {
        std::string pattern;
        Label label;
    };

    explicit RatingMap(std::vector<Rule> rules);

    static RatingMap defaults();
    /// [{"pattern": "...", "label": "true|false|nei"}, ...]
    static RatingMap from_json(const nlohmann::json& j);

    Label map(std::string_view textual_rating) const;
    const std::vector<Rule>& rules() const noexcept { return rules_; }

    static std::string normalize(std::string_view rating);

private:
    std::vector<Rule> rules_;
};

/// Result of one external lookup. Degraded lookups (outage, quota, bad
/// payload) have no match and carry a warning.
struct Lookup {
    std::optional<FactCheckMatch> match;
    std::vector<FactCheckMatch> candidates;
    std::optional<std::string> warning;
    bool from_cache = false;
};

class FactCheckClient {
public:
    virtual ~FactCheckClient() = default;
    virtual Lookup query(std::string_view claim) = 0;
};

/// Reads a claims:search response body. Throws InvalidArgument when the
/// payload does not have the expected shape.
std::vector<FactCheckMatch> parse_claims_search(std::string_view body);

class TokenBucket {
public:
    TokenBucket(double tokens_per_second, double burst);

    /// Blocks until a token is available.
    void acquire();

private:
    std::mutex mutex_;
    double rate_;
    double capacity_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
};

struct ClaimSearchConfig {
    std::string endpoint = "https://factchecktools.googleapis.com/v1alpha1/claims:search";
    std::string api_key;  // sent as the `key` parameter, never logged
    std::chrono::seconds cache_ttl{3600};
    double requests_per_second = 5.0;
    double burst = 5.0;
    std::chrono::milliseconds timeout{15000};
};

/// Client for the claims:search wire shape (query + key parameters; response
/// claims[].text, claims[].claimReview[].{textualRating, publisher.name, url,
/// reviewDate}). Uses the first review of the first claim. Lookups are
/// cached per claim fingerprint for cache_ttl.
class ClaimSearchClient final : public FactCheckClient {
public:
    ClaimSearchClient(ClaimSearchConfig config, std::shared_ptr<net::HttpTransport> transport = nullptr);

    Lookup query(std::string_view claim) override;

    std::size_t requests_sent() const;

private:
    struct CacheEntry {
        Lookup lookup;
        std::chrono::steady_clock::time_point stored;
    };

    ClaimSearchConfig config_;
    std::shared_ptr<net::HttpTransport> transport_;
    TokenBucket bucket_;
    mutable std::shared_mutex cache_mutex_;
    std::map<std::string, CacheEntry> cache_;
    mutable std::mutex stats_mutex_;
    std::size_t requests_ = 0;
};

/// Canned responses keyed by query text.
///
///   {"responses": [{"query": "...", "status": 200, "body": {...}}],
///    "default": {"status": 200, "body": {}}}
///
/// "body" may be a JSON value or a raw string (to serve malformed payloads).
struct FixtureSet {
    struct Response {
        int status = 200;
        std::string body = "{}";
    };

    std::map<std::string, Response> by_query;
    Response fallback;

    static FixtureSet from_json(const nlohmann::json& j);
    static FixtureSet from_file(const std::filesystem::path& path);

    const Response& lookup(const std::string& query) const;
};

/// In-process transport that answers claims:search GETs from fixtures.
class FixtureTransport final : public net::HttpTransport {
public:
    explicit FixtureTransport(FixtureSet fixtures);

    net::HttpResponse send(const net::HttpRequest& request) override;

    std::size_t requests() const;

private:
    FixtureSet fixtures_;
    mutable std::mutex mutex_;
    std::size_t requests_ = 0;
};

/// Local HTTP server speaking the claims:search shape, for tests and demos.
class MockFactCheckServer {
public:
    explicit MockFactCheckServer(FixtureSet fixtures);
    ~MockFactCheckServer();

    MockFactCheckServer(const MockFactCheckServer&) = delete;
    MockFactCheckServer& operator=(const MockFactCheckServer&) = delete;

    /// Base URL of the claims:search endpoint, e.g. http://127.0.0.1:PORT/v1alpha1/claims:search
    std::string endpoint() const;

    void set_fixtures(FixtureSet fixtures);
    std::size_t requests() const;
    /// The `key` parameter of the most recent request.
    std::string last_key() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Maximal-confidence result from an external match.
PipelineResult to_result(const FactCheckMatch& match, const RatingMap& map);

struct FactCheckTrace {
    std::string claim_id;
    std::vector<FactCheckMatch> candidates;
    std::optional<std::string> warning;
    std::vector<gateway::Exchange> exchanges;
    std::optional<std::string> error;

    nlohmann::json to_json() const;
};

struct FactCheckConfig {
    gateway::ModelProfile analyzer = gateway::ModelProfile::defaults(gateway::ModelId::FactCheckAnalyzer);
    gateway::ExpertRoleSet roles = gateway::ExpertRoleSet::defaults();
    RatingMap ratings = RatingMap::defaults();
    bool llm_fallback = true;  // false: external lookup only
};

/// External lookup first; on no match, role-based analysis labelled
/// "Parametric Knowledge". Analyzer failures become the nei/0 placeholder.
class FactCheckPipeline {
public:
    FactCheckPipeline(std::shared_ptr<FactCheckClient> client,
                      std::shared_ptr<gateway::CompletionProvider> analyzer, FactCheckConfig config);

    PipelineResult verify(const Claim& claim, FactCheckTrace* trace = nullptr) const;

private:
    std::shared_ptr<FactCheckClient> client_;
    std::shared_ptr<gateway::CompletionProvider> analyzer_;
    FactCheckConfig config_;
};

} // namespace claimguard::factcheck
