#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "claimguard/core/errors.hpp"
#include "claimguard/embedding/embedder.hpp"
#include "claimguard/factcheck/factcheck.hpp"
#include "claimguard/gateway/analysis.hpp"
#include "claimguard/rag/rag_pipeline.hpp"

namespace claimguard::config {

/// Invalid or inconsistent configuration. The CLI maps it to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the real process environment.
EnvLookup process_env();

/// "" or "none": unconfigured; "mock:<path>": scripted file; "http": live.
struct ProviderSpec {
    enum class Kind { Unconfigured, Mock, Http };

    Kind kind = Kind::Unconfigured;
    std::filesystem::path mock_path;

    static ProviderSpec parse(const std::string& text);
    std::string to_string() const;
};

struct Settings {
    rag::TierThresholds thresholds;
    std::size_t k = 5;
    std::size_t nprobe = 8;
    std::optional<std::size_t> nlist;
    std::uint64_t index_seed = 0;

    embedding::EmbedderConfig::Kind embedder_kind = embedding::EmbedderConfig::Kind::DeterministicLocal;
    std::size_t dimension = embedding::kDefaultDimension;
    std::string embedding_endpoint;
    std::string embedding_api_key_env;
    std::size_t embedding_max_in_flight = 4;

    ProviderSpec llm;
    ProviderSpec factcheck;

    std::map<gateway::ModelId, gateway::ModelProfile> models;

    std::string factcheck_endpoint;
    std::string factcheck_api_key_env;
    std::chrono::seconds factcheck_cache_ttl{3600};
    double factcheck_rps = 5.0;
    factcheck::RatingMap ratings = factcheck::RatingMap::defaults();

    gateway::ExpertRoleSet roles = gateway::ExpertRoleSet::defaults();

    std::size_t workers = 4;
    std::chrono::milliseconds deadline{120000};

    const gateway::ModelProfile& model(gateway::ModelId id) const { return models.at(id); }

    /// Effective settings as JSON. Holds variable names for secrets, never
    /// their values.
    nlohmann::json to_json() const;
};

/// Every recognised key with its default value.
nlohmann::json default_settings_json();

/// Layers, lowest to highest precedence: defaults, file, environment,
/// explicit overrides.
///
/// Environment: each leaf key maps to CLAIMGUARD_<PATH>, the dotted path
/// upper-cased with dots as underscores (thresholds.high ->
/// CLAIMGUARD_THRESHOLDS_HIGH). Overrides use the dotted path. Values for
/// non-string keys are parsed as JSON.
struct SettingsSources {
    std::optional<std::filesystem::path> file;
    /// Applied after the file. Relative mock paths resolve against base_dir.
    std::optional<nlohmann::json> document;
    std::filesystem::path document_base_dir;
    EnvLookup env;
    std::vector<std::pair<std::string, std::string>> overrides;
};

nlohmann::json merged_settings_json(const SettingsSources& sources);
Settings load_settings(const SettingsSources& sources);

/// Typed view of a fully merged document. Throws ConfigError.
Settings settings_from_json(const nlohmann::json& j);

/// Environment variable name for a dotted key.
std::string env_name(const std::string& dotted_key);

} // namespace claimguard::config
