#include "claimguard/factcheck/factcheck.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "claimguard/util/text.hpp"

namespace claimguard::factcheck {

nlohmann::json to_json(const FactCheckMatch& m) {
    return {
        {"matched_claim_text", m.matched_claim_text},
        {"textual_rating", m.textual_rating},
        {"publisher", m.publisher},
        {"url", m.url},
        {"review_date", m.review_date ? nlohmann::json(*m.review_date) : nlohmann::json(nullptr)},
    };
}

// ---------------------------------------------------------------------------
// RatingMap

RatingMap::RatingMap(std::vector<Rule> rules) : rules_(std::move(rules)) {
    for (auto& r : rules_) r.pattern = normalize(r.pattern);
}

RatingMap RatingMap::defaults() {
    std::vector<Rule> rules;
    for (const char* p : {"true", "mostly true", "correct", "accurate"}) rules.push_back({p, Label::True});
    for (const char* p : {"false", "mostly false", "pants on fire", "fake", "incorrect", "misleading"}) {
        rules.push_back({p, Label::False});
    }
    return RatingMap(std::move(rules));
}

RatingMap RatingMap::from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw InvalidArgument("rating map must be an array of {pattern, label}");
    std::vector<Rule> rules;
    for (const auto& r : j) {
        rules.push_back({r.at("pattern").get<std::string>(), parse_label(r.at("label").get<std::string>())});
    }
    return RatingMap(std::move(rules));
}

std::string RatingMap::normalize(std::string_view rating) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : rating) {
        if (std::isalnum(c)) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            pending_space = true;
        }
    }
    return out;
}

Label RatingMap::map(std::string_view textual_rating) const {
    const auto norm = normalize(textual_rating);
    for (const auto& r : rules_) {
        if (r.pattern == norm) return r.label;
    }
    return Label::Nei;
}

// ---------------------------------------------------------------------------
// Wire parsing

std::vector<FactCheckMatch> parse_claims_search(std::string_view body) {
    const auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw InvalidArgument("claims:search response is not a JSON object");
    std::vector<FactCheckMatch> out;
    if (!j.contains("claims")) return out;
    const auto& claims = j.at("claims");
    if (!claims.is_array()) throw InvalidArgument("'claims' is not an array");
    const auto str = [](const nlohmann::json& o, const char* key) -> std::string {
        return o.is_object() && o.contains(key) && o.at(key).is_string() ? o.at(key).get<std::string>() : "";
    };
    for (const auto& c : claims) {
        if (!c.is_object()) throw InvalidArgument("claim entry is not an object");
        if (!c.contains("claimReview")) continue;
        const auto& reviews = c.at("claimReview");
        if (!reviews.is_array()) throw InvalidArgument("'claimReview' is not an array");
        for (const auto& r : reviews) {
            if (!r.is_object()) throw InvalidArgument("review entry is not an object");
            FactCheckMatch m;
            m.matched_claim_text = str(c, "text");
            m.textual_rating = str(r, "textualRating");
            m.publisher = r.contains("publisher") ? str(r.at("publisher"), "name") : "";
            m.url = str(r, "url");
            if (auto d = str(r, "reviewDate"); !d.empty()) m.review_date = d;
            out.push_back(std::move(m));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// TokenBucket

TokenBucket::TokenBucket(double tokens_per_second, double burst)
    : rate_(tokens_per_second), capacity_(std::max(1.0, burst)), tokens_(capacity_),
      last_(std::chrono::steady_clock::now()) {
    if (!(rate_ > 0.0)) throw InvalidArgument("token bucket rate must be positive");
}

void TokenBucket::acquire() {
    for (;;) {
        std::chrono::duration<double> wait{};
        {
            std::lock_guard lock(mutex_);
            const auto now = std::chrono::steady_clock::now();
            tokens_ = std::min(capacity_, tokens_ + rate_ * std::chrono::duration<double>(now - last_).count());
            last_ = now;
            if (tokens_ >= 1.0) {
                tokens_ -= 1.0;
                return;
            }
            wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
        }
        std::this_thread::sleep_for(wait);
    }
}

// ---------------------------------------------------------------------------
// ClaimSearchClient

ClaimSearchClient::ClaimSearchClient(ClaimSearchConfig config, std::shared_ptr<net::HttpTransport> transport)
    : config_(std::move(config)), transport_(transport ? std::move(transport) : net::make_default_transport()),
      bucket_(config_.requests_per_second, config_.burst) {}

Lookup ClaimSearchClient::query(std::string_view claim) {
    const auto key = util::fingerprint(util::trim(claim));
    {
        std::shared_lock lock(cache_mutex_);
        if (const auto it = cache_.find(key);
            it != cache_.end() && std::chrono::steady_clock::now() - it->second.stored < config_.cache_ttl) {
            auto hit = it->second.lookup;
            hit.from_cache = true;
            return hit;
        }
    }

    const auto degraded = [](std::string warning) {
        spdlog::warn("fact-check lookup degraded to fallback: {}", warning);
        Lookup l;
        l.warning = std::move(warning);
        return l;
    };

    net::HttpRequest req;
    req.method = "GET";
    req.url = fmt::format("{}?query={}", config_.endpoint, net::url_encode(util::trim(claim)));
    if (!config_.api_key.empty()) req.url += "&key=" + net::url_encode(config_.api_key);
    req.timeout = config_.timeout;

    bucket_.acquire();
    {
        std::lock_guard lock(stats_mutex_);
        ++requests_;
    }
    net::HttpResponse resp;
    try {
        resp = transport_->send(req);
    } catch (const net::TransportError& e) {
        return degraded(fmt::format("fact-check API unavailable: {}", e.what()));
    }
    if (resp.status == 429) return degraded("fact-check API quota exceeded (HTTP 429)");
    if (resp.status != 200) return degraded(fmt::format("fact-check API unavailable (HTTP {})", resp.status));

    Lookup lookup;
    try {
        lookup.candidates = parse_claims_search(resp.body);
    } catch (const InvalidArgument& e) {
        return degraded(fmt::format("malformed fact-check response: {}", e.what()));
    }
    if (!lookup.candidates.empty()) {
        const auto& first = lookup.candidates.front();
        if (first.url.empty()) return degraded("first fact-check review has no URL");
        lookup.match = first;
    }
    std::unique_lock lock(cache_mutex_);
    cache_[key] = {lookup, std::chrono::steady_clock::now()};
    return lookup;
}

std::size_t ClaimSearchClient::requests_sent() const {
    std::lock_guard lock(stats_mutex_);
    return requests_;
}

// ---------------------------------------------------------------------------
// Fixtures

FixtureSet FixtureSet::from_json(const nlohmann::json& j) {
    const auto response = [](const nlohmann::json& r) {
        Response out;
        out.status = r.value("status", 200);
        if (r.contains("body")) {
            const auto& b = r.at("body");
            out.body = b.is_string() ? b.get<std::string>() : b.dump();
        }
        return out;
    };
    FixtureSet set;
    for (const auto& r : j.value("responses", nlohmann::json::array())) {
        set.by_query[std::string(util::trim(r.at("query").get<std::string>()))] = response(r);
    }
    if (j.contains("default")) set.fallback = response(j.at("default"));
    return set;
}

FixtureSet FixtureSet::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open fact-check fixtures", path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("fact-check fixtures " + path.string() + " are not valid JSON: " + e.what());
    }
    return from_json(j);
}

const FixtureSet::Response& FixtureSet::lookup(const std::string& query) const {
    const auto it = by_query.find(std::string(util::trim(query)));
    return it == by_query.end() ? fallback : it->second;
}

FixtureTransport::FixtureTransport(FixtureSet fixtures) : fixtures_(std::move(fixtures)) {}

net::HttpResponse FixtureTransport::send(const net::HttpRequest& request) {
    {
        std::lock_guard lock(mutex_);
        ++requests_;
    }
    const auto params = net::query_params(request.url);
    const auto it = params.find("query");
    if (request.method != "GET" || it == params.end()) return {400, R"({"error":"missing query"})"};
    const auto& r = fixtures_.lookup(it->second);
    return {r.status, r.body};
}

std::size_t FixtureTransport::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

// ---------------------------------------------------------------------------
// Pipeline

PipelineResult to_result(const FactCheckMatch& match, const RatingMap& map) {
    const auto publisher = match.publisher.empty() ? std::string("Unknown publisher") : match.publisher;
    auto evidence = fmt::format("{}: {}", publisher, match.textual_rating);
    if (!match.matched_claim_text.empty()) evidence += fmt::format(". Reviewed claim: \"{}\"", match.matched_claim_text);
    return {PipelineId::FactCheck,
            RouteTag::ExternalMatch,
            map.map(match.textual_rating),
            std::move(evidence),
            SourceAttribution::external_factcheck(match.url),
            1.0};
}

nlohmann::json FactCheckTrace::to_json() const {
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : candidates) cands.push_back(factcheck::to_json(c));
    nlohmann::json exch = nlohmann::json::array();
    for (const auto& e : exchanges) exch.push_back({{"prompt", e.prompt}, {"completion", e.completion}});
    return {
        {"claim_id", claim_id},
        {"candidates", std::move(cands)},
        {"warning", warning ? nlohmann::json(*warning) : nlohmann::json(nullptr)},
        {"exchanges", std::move(exch)},
        {"error", error ? nlohmann::json(*error) : nlohmann::json(nullptr)},
    };
}

FactCheckPipeline::FactCheckPipeline(std::shared_ptr<FactCheckClient> client,
                                     std::shared_ptr<gateway::CompletionProvider> analyzer,
                                     FactCheckConfig config)
    : client_(std::move(client)), analyzer_(std::move(analyzer)), config_(std::move(config)) {
    if (!client_) throw InvalidArgument("fact-check pipeline needs a client");
    if (config_.llm_fallback && !analyzer_) throw InvalidArgument("LLM fallback needs an analyzer provider");
}

PipelineResult FactCheckPipeline::verify(const Claim& claim, FactCheckTrace* trace) const {
    if (trace) trace->claim_id = claim.id;
    Lookup lookup;
    try {
        lookup = client_->query(claim.text);
    } catch (const Error& e) {
        lookup.warning = e.what();
    }
    if (trace) {
        trace->candidates = lookup.candidates;
        trace->warning = lookup.warning;
    }
    if (lookup.match) return to_result(*lookup.match, config_.ratings);

    if (!config_.llm_fallback) {
        return {PipelineId::FactCheck, RouteTag::LlmFallback, Label::Nei, "<no external fact-check match>",
                SourceAttribution::parametric(), 0.0};
    }
    std::vector<gateway::Exchange> exchanges;
    try {
        const auto a = gateway::role_based_analysis(*analyzer_, config_.analyzer, claim.text, config_.roles,
                                                    &exchanges);
        if (trace) trace->exchanges = std::move(exchanges);
        return {PipelineId::FactCheck, RouteTag::LlmFallback, a.label, a.evidence,
                SourceAttribution::parametric(), a.confidence};
    } catch (const gateway::GatewayError& e) {
        if (trace) {
            trace->exchanges = std::move(exchanges);
            trace->error = e.what();
        }
        return PipelineResult::placeholder(PipelineId::FactCheck, RouteTag::LlmFallback, e.what());
    }
}

} // namespace claimguard::factcheck
