#include "claimguard/gateway/provider.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "claimguard/util/backoff.hpp"
#include "claimguard/util/text.hpp"

namespace claimguard::gateway {

std::string_view to_string(ModelId id) noexcept {
    switch (id) {
    case ModelId::RagModel1: return "rag_model_1";
    case ModelId::RagModel2: return "rag_model_2";
    case ModelId::FactCheckAnalyzer: return "factcheck_analyzer";
    }
    return "rag_model_1";
}

ModelId parse_model_id(std::string_view s) {
    if (s == "rag_model_1") return ModelId::RagModel1;
    if (s == "rag_model_2") return ModelId::RagModel2;
    if (s == "factcheck_analyzer") return ModelId::FactCheckAnalyzer;
    throw InvalidArgument("unknown model id '" + std::string(s) +
                          "' (expected rag_model_1, rag_model_2 or factcheck_analyzer)");
}

ModelProfile ModelProfile::defaults(ModelId id) {
    ModelProfile p;
    p.id = id;
    switch (id) {
    case ModelId::RagModel1:
    case ModelId::FactCheckAnalyzer: p.model_name = "meta-llama/Llama-3.3-70B-Instruct"; break;
    case ModelId::RagModel2: p.model_name = "mistralai/Mixtral-8x7B-Instruct-v0.1"; break;
    }
    return p;
}

// ---------------------------------------------------------------------------
// MockProvider

MockProvider::Reply MockProvider::Reply::from_json(const nlohmann::json& j) {
    Reply r;
    if (j.is_string()) {
        r.text = j.get<std::string>();
    } else if (j.is_object() && j.contains("text")) {
        r.text = j.at("text").get<std::string>();
    } else if (j.is_object() && j.value("timeout", false)) {
        r.timeout = true;
    } else if (j.is_object() && j.contains("error")) {
        r.error_status = j.at("error").get<int>();
    } else {
        throw InvalidArgument("mock reply must be a string, {text}, {timeout} or {error}");
    }
    return r;
}

MockProvider::MockProvider(std::vector<Rule> rules, std::optional<Reply> fallback)
    : rules_(std::move(rules)), consumed_(rules_.size(), 0), fallback_(std::move(fallback)) {
    for (const auto& r : rules_) {
        if (r.replies.empty()) throw InvalidArgument("mock rule without replies");
        if (!r.fingerprint && !r.contains) throw InvalidArgument("mock rule needs fingerprint or contains");
    }
}

std::shared_ptr<MockProvider> MockProvider::from_json(const nlohmann::json& script) {
    std::vector<Rule> rules;
    for (const auto& jr : script.value("rules", nlohmann::json::array())) {
        Rule rule;
        const auto model = jr.value("model", std::string("*"));
        if (model != "*") rule.model = parse_model_id(model);
        if (jr.contains("fingerprint")) rule.fingerprint = jr.at("fingerprint").get<std::string>();
        if (jr.contains("contains")) rule.contains = jr.at("contains").get<std::string>();
        if (jr.contains("responses")) {
            for (const auto& r : jr.at("responses")) rule.replies.push_back(Reply::from_json(r));
        } else if (jr.contains("response")) {
            rule.replies.push_back(Reply::from_json(jr.at("response")));
        }
        rules.push_back(std::move(rule));
    }
    std::optional<Reply> fallback;
    if (script.contains("default") && !script.at("default").is_null()) {
        fallback = Reply::from_json(script.at("default"));
    }
    return std::make_shared<MockProvider>(std::move(rules), std::move(fallback));
}

std::shared_ptr<MockProvider> MockProvider::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mock script", path.string());
    nlohmann::json script;
    try {
        in >> script;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("mock script " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(script);
}

void MockProvider::script(ModelId model, const std::string& prompt, Reply reply) {
    script_sequence(model, prompt, {std::move(reply)});
}

void MockProvider::script_sequence(ModelId model, const std::string& prompt, std::vector<Reply> replies) {
    if (replies.empty()) throw InvalidArgument("mock rule without replies");
    std::lock_guard lock(mutex_);
    rules_.push_back({model, util::fingerprint(prompt), std::nullopt, std::move(replies)});
    consumed_.push_back(0);
}

void MockProvider::set_default(Reply reply) {
    std::lock_guard lock(mutex_);
    fallback_ = std::move(reply);
}

std::string MockProvider::complete(const ModelProfile& profile, const std::string& prompt) {
    if (prompt.empty()) throw InvalidArgument("prompt is empty");
    Reply reply;
    {
        std::lock_guard lock(mutex_);
        seen_[profile.id].push_back(prompt);
        const auto fp = util::fingerprint(prompt);
        const auto model_ok = [&](const Rule& r) { return !r.model || *r.model == profile.id; };

        std::optional<std::size_t> chosen;
        for (std::size_t i = 0; i < rules_.size() && !chosen; ++i) {
            if (model_ok(rules_[i]) && rules_[i].fingerprint == fp) chosen = i;
        }
        for (std::size_t i = 0; i < rules_.size() && !chosen; ++i) {
            if (model_ok(rules_[i]) && rules_[i].contains && prompt.find(*rules_[i].contains) != std::string::npos) {
                chosen = i;
            }
        }
        if (chosen) {
            const auto& replies = rules_[*chosen].replies;
            reply = replies[std::min(consumed_[*chosen], replies.size() - 1)];
            ++consumed_[*chosen];
        } else if (fallback_) {
            reply = *fallback_;
        } else {
            throw GatewayError(GatewayError::Kind::ProviderError,
                               fmt::format("no scripted response for {} prompt {}", to_string(profile.id), fp),
                               404);
        }
    }
    if (reply.timeout) {
        throw GatewayError(GatewayError::Kind::Timeout,
                           fmt::format("{} timed out (scripted)", to_string(profile.id)));
    }
    if (reply.error_status != 0) {
        throw GatewayError(GatewayError::Kind::ProviderError,
                           fmt::format("{} returned HTTP {} (scripted)", to_string(profile.id), reply.error_status),
                           reply.error_status);
    }
    return reply.text;
}

std::size_t MockProvider::calls(ModelId model) const {
    std::lock_guard lock(mutex_);
    const auto it = seen_.find(model);
    return it == seen_.end() ? 0 : it->second.size();
}

std::size_t MockProvider::total_calls() const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& [_, prompts] : seen_) n += prompts.size();
    return n;
}

std::vector<std::string> MockProvider::prompts(ModelId model) const {
    std::lock_guard lock(mutex_);
    const auto it = seen_.find(model);
    return it == seen_.end() ? std::vector<std::string>{} : it->second;
}

// ---------------------------------------------------------------------------
// HttpChatProvider

HttpChatProvider::HttpChatProvider(std::shared_ptr<net::HttpTransport> transport, EnvLookup env)
    : transport_(transport ? std::move(transport) : net::make_default_transport()),
      env_(env ? std::move(env) : EnvLookup([](const std::string& name) -> std::optional<std::string> {
          const char* v = std::getenv(name.c_str());
          return v ? std::optional<std::string>(v) : std::nullopt;
      })) {}

std::counting_semaphore<64>& HttpChatProvider::slot_for(const ModelProfile& profile) {
    std::lock_guard lock(slots_mutex_);
    auto& slot = slots_[profile.id];
    if (!slot) {
        slot = std::make_unique<std::counting_semaphore<64>>(
            static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(profile.max_in_flight, 1, 64)));
    }
    return *slot;
}

std::string HttpChatProvider::complete(const ModelProfile& profile, const std::string& prompt) {
    if (prompt.empty()) throw InvalidArgument("prompt is empty");
    if (profile.endpoint.empty()) {
        throw GatewayError(GatewayError::Kind::ProviderError,
                           fmt::format("{} has no endpoint configured", to_string(profile.id)));
    }
    net::HttpRequest req;
    req.method = "POST";
    req.url = profile.endpoint;
    req.timeout = profile.timeout;
    req.body = nlohmann::json{
        {"model", profile.model_name},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", profile.temperature},
        {"max_tokens", profile.max_tokens},
    }.dump();
    if (!profile.api_key_env.empty()) {
        if (auto key = env_(profile.api_key_env); key && !key->empty()) {
            req.headers["Authorization"] = "Bearer " + *key;
        }
    }

    auto& slot = slot_for(profile);
    std::string last_error;
    int last_status = 0;
    for (int attempt = 0; attempt < std::max(1, profile.max_attempts); ++attempt) {
        if (attempt > 0) util::backoff_sleep(attempt - 1, profile.backoff_base);
        net::HttpResponse resp;
        try {
            slot.acquire();
            struct Permit {
                std::counting_semaphore<64>& sem;
                ~Permit() { sem.release(); }
            } permit{slot};
            resp = transport_->send(req);
        } catch (const net::TransportError& e) {
            if (e.kind() == net::TransportError::Kind::Timeout) {
                throw GatewayError(GatewayError::Kind::Timeout,
                                   fmt::format("{} timed out: {}", to_string(profile.id), e.what()));
            }
            throw GatewayError(GatewayError::Kind::ProviderError,
                               fmt::format("{} unreachable: {}", to_string(profile.id), e.what()));
        }
        if (resp.status == 429 || resp.status >= 500) {
            last_status = resp.status;
            last_error = fmt::format("{} returned HTTP {}", to_string(profile.id), resp.status);
            spdlog::warn("{}; retrying", last_error);
            continue;
        }
        if (resp.status != 200) {
            throw GatewayError(GatewayError::Kind::ProviderError,
                               fmt::format("{} returned HTTP {}", to_string(profile.id), resp.status),
                               resp.status);
        }
        const auto body = nlohmann::json::parse(resp.body, nullptr, false);
        const nlohmann::json::json_pointer ptr(profile.response_pointer);
        if (body.is_discarded() || !body.contains(ptr) || !body.at(ptr).is_string()) {
            throw GatewayError(GatewayError::Kind::ProviderError,
                               fmt::format("{} response has no text at {}", to_string(profile.id),
                                           profile.response_pointer),
                               resp.status);
        }
        return body.at(ptr).get<std::string>();
    }
    throw GatewayError(GatewayError::Kind::ProviderError, last_error, last_status);
}

// ---------------------------------------------------------------------------
// CachingProvider

CachingProvider::CachingProvider(std::shared_ptr<CompletionProvider> inner) : inner_(std::move(inner)) {
    if (!inner_) throw InvalidArgument("caching provider needs an inner provider");
}

std::string CachingProvider::complete(const ModelProfile& profile, const std::string& prompt) {
    const auto key = std::make_pair(profile.id, prompt);
    {
        std::lock_guard lock(mutex_);
        if (const auto it = cache_.find(key); it != cache_.end()) {
            ++hits_;
            return it->second;
        }
    }
    auto text = inner_->complete(profile, prompt);
    std::lock_guard lock(mutex_);
    cache_.emplace(key, text);
    return text;
}

std::size_t CachingProvider::hits() const {
    std::lock_guard lock(mutex_);
    return hits_;
}

} // namespace claimguard::gateway
