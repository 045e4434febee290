#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "claimguard/core/errors.hpp"
#include "claimguard/net/http.hpp"

namespace claimguard::gateway {

enum class ModelId { RagModel1, RagModel2, FactCheckAnalyzer };

std::string_view to_string(ModelId id) noexcept;
ModelId parse_model_id(std::string_view s);

enum class ConfidenceScale { Unit, Percent };

struct ModelProfile {
    ModelId id = ModelId::RagModel1;
    std::string model_name;
    std::string endpoint;
    std::string api_key_env;  // name of the variable holding the bearer token
    std::string response_pointer = "/choices/0/message/content";
    double temperature = 0.0;
    int max_tokens = 512;
    std::chrono::milliseconds timeout{60000};
    std::size_t max_in_flight = 4;
    int max_attempts = 3;
    std::chrono::milliseconds backoff_base{500};
    ConfidenceScale confidence_scale = ConfidenceScale::Unit;

    static ModelProfile defaults(ModelId id);
};

class GatewayError : public Error {
public:
    enum class Kind { Timeout, ProviderError, ParseFailure };

    GatewayError(Kind kind, const std::string& what, int status = 0)
        : Error(what), kind_(kind), status_(status) {}

    Kind kind() const noexcept { return kind_; }
    int status() const noexcept { return status_; }

private:
    Kind kind_;
    int status_;
};

/// Completion contract. Failures are GatewayError with kind Timeout or
/// ProviderError.
class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual std::string complete(const ModelProfile& profile, const std::string& prompt) = 0;
};

/// Scripted provider for offline runs and tests.
///
/// Script file (JSON):
///   {"default": <reply>?,
///    "rules": [{"model": "rag_model_1" | "*",
///               "fingerprint": "<16 hex>" | "contains": "<substring>",
///               "response": <reply> | "responses": [<reply>, ...]}]}
/// A reply is a string (completion text), {"text": "..."},
/// {"timeout": true} or {"error": <status>}. A "responses" list is consumed
/// in order and its last entry repeats. Fingerprint rules win over contains
/// rules; contains rules are tried in file order.
class MockProvider final : public CompletionProvider {
public:
    struct Reply {
        std::string text;
        bool timeout = false;
        int error_status = 0;

        static Reply from_json(const nlohmann::json& j);
    };

    struct Rule {
        std::optional<ModelId> model;  // nullopt matches any model
        std::optional<std::string> fingerprint;
        std::optional<std::string> contains;
        std::vector<Reply> replies;
    };

    MockProvider() = default;
    explicit MockProvider(std::vector<Rule> rules, std::optional<Reply> fallback = std::nullopt);

    static std::shared_ptr<MockProvider> from_json(const nlohmann::json& script);
    static std::shared_ptr<MockProvider> from_file(const std::filesystem::path& path);

    /// Adds a rule keyed on (model, prompt fingerprint).
    void script(ModelId model, const std::string& prompt, Reply reply);
    void script_sequence(ModelId model, const std::string& prompt, std::vector<Reply> replies);
    void set_default(Reply reply);

    std::string complete(const ModelProfile& profile, const std::string& prompt) override;

    std::size_t calls(ModelId model) const;
    std::size_t total_calls() const;
    std::vector<std::string> prompts(ModelId model) const;

private:
    mutable std::mutex mutex_;
    std::vector<Rule> rules_;
    std::vector<std::size_t> consumed_;
    std::optional<Reply> fallback_;
    std::map<ModelId, std::vector<std::string>> seen_;
};

/// Chat-completions style HTTP provider: POSTs
/// {"model", "messages": [{"role": "user", "content"}], "temperature", "max_tokens"}
/// and reads the completion at profile.response_pointer.
class HttpChatProvider final : public CompletionProvider {
public:
    using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

    explicit HttpChatProvider(std::shared_ptr<net::HttpTransport> transport = nullptr,
                              EnvLookup env = nullptr);

    std::string complete(const ModelProfile& profile, const std::string& prompt) override;

private:
    std::counting_semaphore<64>& slot_for(const ModelProfile& profile);

    std::shared_ptr<net::HttpTransport> transport_;
    EnvLookup env_;
    std::mutex slots_mutex_;
    std::map<ModelId, std::unique_ptr<std::counting_semaphore<64>>> slots_;
};

/// Memoizes successful completions by (model, prompt). Used by the threshold
/// sweep so grid points share model responses.
class CachingProvider final : public CompletionProvider {
public:
    explicit CachingProvider(std::shared_ptr<CompletionProvider> inner);

    std::string complete(const ModelProfile& profile, const std::string& prompt) override;

    std::size_t hits() const;

private:
    std::shared_ptr<CompletionProvider> inner_;
    mutable std::mutex mutex_;
    std::map<std::pair<ModelId, std::string>, std::string> cache_;
    std::size_t hits_ = 0;
};

} // namespace claimguard::gateway
