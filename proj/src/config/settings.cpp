#include "claimguard/config/settings.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include <fmt/format.h>

#include "claimguard/index/ivf_index.hpp"

namespace claimguard::config {

namespace {

using nlohmann::json;

json model_defaults(gateway::ModelId id) {
    const auto p = gateway::ModelProfile::defaults(id);
    return {
        {"model_name", p.model_name},
        {"endpoint", p.endpoint},
        {"api_key_env", "HF_API_TOKEN"},
        {"response_pointer", p.response_pointer},
        {"temperature", p.temperature},
        {"max_tokens", p.max_tokens},
        {"timeout_ms", p.timeout.count()},
        {"max_in_flight", p.max_in_flight},
        {"max_attempts", p.max_attempts},
        {"backoff_ms", p.backoff_base.count()},
        {"confidence_scale", "unit"},
    };
}

std::string join(const std::vector<std::string>& path) {
    std::string out;
    for (const auto& p : path) {
        if (!out.empty()) out += '.';
        out += p;
    }
    return out;
}

void merge_into(json& base, const json& patch, std::vector<std::string>& path, const std::string& origin) {
    if (!patch.is_object()) {
        throw ConfigError(fmt::format("{}: '{}' must be an object", origin, path.empty() ? "<root>" : join(path)));
    }
    for (const auto& [key, value] : patch.items()) {
        path.push_back(key);
        if (!base.contains(key)) throw ConfigError(fmt::format("{}: unknown setting '{}'", origin, join(path)));
        auto& slot = base[key];
        if (slot.is_object()) {
            merge_into(slot, value, path, origin);
        } else {
            slot = value;
        }
        path.pop_back();
    }
}

void collect_leaves(const json& j, std::vector<std::string>& path, std::vector<std::string>& out) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            path.push_back(key);
            collect_leaves(value, path, out);
            path.pop_back();
        }
    } else {
        out.push_back(join(path));
    }
}

json::json_pointer pointer_for(const std::string& dotted) {
    std::string p;
    std::size_t start = 0;
    while (start <= dotted.size()) {
        const auto dot = dotted.find('.', start);
        p += '/';
        p += dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return json::json_pointer(p);
}

// String-typed keys take the raw text; everything else is parsed as JSON.
json coerce(const json& current_default, const std::string& raw, const std::string& what) {
    if (current_default.is_string()) return raw;
    auto parsed = json::parse(raw, nullptr, false);
    if (parsed.is_discarded()) throw ConfigError(fmt::format("{}: value is not valid JSON", what));
    return parsed;
}

void resolve_mock_path(json& file, const char* key, const std::filesystem::path& base_dir) {
    if (!file.contains("providers") || !file["providers"].is_object()) return;
    auto& providers = file["providers"];
    if (!providers.contains(key) || !providers[key].is_string()) return;
    auto spec = providers[key].get<std::string>();
    if (spec.rfind("mock:", 0) != 0) return;
    std::filesystem::path p(spec.substr(5));
    if (p.is_relative()) providers[key] = "mock:" + (base_dir / p).lexically_normal().string();
}

template <class T>
T get(const json& root, const std::string& dotted) {
    try {
        return root.at(pointer_for(dotted)).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(fmt::format("setting '{}' has the wrong type", dotted));
    }
}

std::size_t get_count(const json& root, const std::string& dotted, std::size_t minimum) {
    const auto& v = root.at(pointer_for(dotted));
    if (!v.is_number_integer() || v.get<std::int64_t>() < static_cast<std::int64_t>(minimum)) {
        throw ConfigError(fmt::format("setting '{}' must be an integer >= {}", dotted, minimum));
    }
    return v.get<std::size_t>();
}

} // namespace

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
}

ProviderSpec ProviderSpec::parse(const std::string& text) {
    ProviderSpec spec;
    if (text.empty() || text == "none") return spec;
    if (text == "http") {
        spec.kind = Kind::Http;
        return spec;
    }
    if (text.rfind("mock:", 0) == 0 && text.size() > 5) {
        spec.kind = Kind::Mock;
        spec.mock_path = text.substr(5);
        return spec;
    }
    throw ConfigError(fmt::format("provider must be 'none', 'http' or 'mock:<path>' (got '{}')", text));
}

std::string ProviderSpec::to_string() const {
    switch (kind) {
    case Kind::Unconfigured: return "none";
    case Kind::Http: return "http";
    case Kind::Mock: return "mock:" + mock_path.string();
    }
    return "none";
}

std::string env_name(const std::string& dotted_key) {
    std::string out = "CLAIMGUARD_";
    for (char c : dotted_key) {
        out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
}

json default_settings_json() {
    const auto default_roles = gateway::ExpertRoleSet::defaults();
    json roles = default_roles.roles();
    return {
        {"thresholds", {{"high", 0.6}, {"med", 0.4}}},
        {"retrieval", {{"k", 5}, {"nprobe", 8}, {"nlist", nullptr}, {"seed", index::kDefaultTrainingSeed}}},
        {"embedding",
         {{"kind", "deterministic_local"},
          {"dimension", embedding::kDefaultDimension},
          {"endpoint", ""},
          {"api_key_env", "EMBEDDING_API_TOKEN"},
          {"max_in_flight", 4}}},
        {"providers", {{"llm", ""}, {"factcheck", ""}}},
        {"models",
         {{"rag_model_1", model_defaults(gateway::ModelId::RagModel1)},
          {"rag_model_2", model_defaults(gateway::ModelId::RagModel2)},
          {"factcheck_analyzer", model_defaults(gateway::ModelId::FactCheckAnalyzer)}}},
        {"factcheck",
         {{"endpoint", factcheck::ClaimSearchConfig{}.endpoint},
          {"api_key_env", "FACTCHECK_API_KEY"},
          {"cache_ttl_s", 3600},
          {"requests_per_second", 5.0},
          {"rating_map", nullptr}}},
        {"roles", std::move(roles)},
        {"runtime", {{"workers", 4}, {"deadline_ms", 120000}}},
    };
}

json merged_settings_json(const SettingsSources& sources) {
    auto merged = default_settings_json();
    std::vector<std::string> path;

    if (sources.file) {
        std::ifstream in(*sources.file);
        if (!in) throw IoError("cannot read settings file", sources.file->string());
        auto file = json::parse(in, nullptr, false);
        if (file.is_discarded()) {
            throw ConfigError(fmt::format("settings file {} is not valid JSON", sources.file->string()));
        }
        if (file.is_object()) {
            const auto dir = sources.file->parent_path();
            resolve_mock_path(file, "llm", dir);
            resolve_mock_path(file, "factcheck", dir);
        }
        merge_into(merged, file, path, sources.file->string());
    }
    if (sources.document) {
        auto doc = *sources.document;
        if (doc.is_object()) {
            resolve_mock_path(doc, "llm", sources.document_base_dir);
            resolve_mock_path(doc, "factcheck", sources.document_base_dir);
        }
        merge_into(merged, doc, path, "settings");
    }

    std::vector<std::string> leaves;
    collect_leaves(default_settings_json(), path, leaves);
    if (sources.env) {
        for (const auto& key : leaves) {
            const auto name = env_name(key);
            if (auto value = sources.env(name)) {
                auto& slot = merged.at(pointer_for(key));
                slot = coerce(slot, *value, name);
            }
        }
    }

    for (const auto& [key, value] : sources.overrides) {
        if (std::find(leaves.begin(), leaves.end(), key) == leaves.end()) {
            throw ConfigError(fmt::format("unknown setting '{}'", key));
        }
        auto& slot = merged.at(pointer_for(key));
        slot = coerce(slot, value, key);
    }
    return merged;
}

Settings load_settings(const SettingsSources& sources) {
    return settings_from_json(merged_settings_json(sources));
}

Settings settings_from_json(const json& j) {
    Settings s;
    s.thresholds.high = get<double>(j, "thresholds.high");
    s.thresholds.med = get<double>(j, "thresholds.med");
    try {
        s.thresholds.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    s.k = get_count(j, "retrieval.k", 1);
    s.nprobe = get_count(j, "retrieval.nprobe", 1);
    if (!j.at("retrieval").at("nlist").is_null()) s.nlist = get_count(j, "retrieval.nlist", 1);
    s.index_seed = get<std::uint64_t>(j, "retrieval.seed");

    const auto kind = get<std::string>(j, "embedding.kind");
    if (kind == "deterministic_local") {
        s.embedder_kind = embedding::EmbedderConfig::Kind::DeterministicLocal;
    } else if (kind == "remote_http") {
        s.embedder_kind = embedding::EmbedderConfig::Kind::RemoteHttp;
    } else {
        throw ConfigError(fmt::format("embedding.kind must be deterministic_local or remote_http (got '{}')", kind));
    }
    s.dimension = get_count(j, "embedding.dimension", 1);
    s.embedding_endpoint = get<std::string>(j, "embedding.endpoint");
    s.embedding_api_key_env = get<std::string>(j, "embedding.api_key_env");
    s.embedding_max_in_flight = get_count(j, "embedding.max_in_flight", 1);
    if (s.embedder_kind == embedding::EmbedderConfig::Kind::RemoteHttp && s.embedding_endpoint.empty()) {
        throw ConfigError("embedding.endpoint is required for remote_http embeddings");
    }

    s.llm = ProviderSpec::parse(get<std::string>(j, "providers.llm"));
    s.factcheck = ProviderSpec::parse(get<std::string>(j, "providers.factcheck"));

    for (const auto id : {gateway::ModelId::RagModel1, gateway::ModelId::RagModel2,
                          gateway::ModelId::FactCheckAnalyzer}) {
        const std::string base = "models." + std::string(to_string(id)) + ".";
        auto p = gateway::ModelProfile::defaults(id);
        p.model_name = get<std::string>(j, base + "model_name");
        p.endpoint = get<std::string>(j, base + "endpoint");
        p.api_key_env = get<std::string>(j, base + "api_key_env");
        p.response_pointer = get<std::string>(j, base + "response_pointer");
        p.temperature = get<double>(j, base + "temperature");
        p.max_tokens = static_cast<int>(get_count(j, base + "max_tokens", 1));
        p.timeout = std::chrono::milliseconds(get_count(j, base + "timeout_ms", 1));
        p.max_in_flight = get_count(j, base + "max_in_flight", 1);
        if (p.max_in_flight > 64) throw ConfigError(base + "max_in_flight must be at most 64");
        p.max_attempts = static_cast<int>(get_count(j, base + "max_attempts", 1));
        p.backoff_base = std::chrono::milliseconds(get_count(j, base + "backoff_ms", 0));
        const auto scale = get<std::string>(j, base + "confidence_scale");
        if (scale == "unit") {
            p.confidence_scale = gateway::ConfidenceScale::Unit;
        } else if (scale == "percent") {
            p.confidence_scale = gateway::ConfidenceScale::Percent;
        } else {
            throw ConfigError(base + "confidence_scale must be 'unit' or 'percent'");
        }
        s.models.emplace(id, std::move(p));
    }

    s.factcheck_endpoint = get<std::string>(j, "factcheck.endpoint");
    s.factcheck_api_key_env = get<std::string>(j, "factcheck.api_key_env");
    s.factcheck_cache_ttl = std::chrono::seconds(get_count(j, "factcheck.cache_ttl_s", 0));
    s.factcheck_rps = get<double>(j, "factcheck.requests_per_second");
    if (!(s.factcheck_rps > 0.0)) throw ConfigError("factcheck.requests_per_second must be positive");
    try {
        const auto& map = j.at("factcheck").at("rating_map");
        if (!map.is_null()) s.ratings = factcheck::RatingMap::from_json(map);
        s.roles = gateway::ExpertRoleSet(get<std::vector<std::string>>(j, "roles"));
    } catch (const Error& e) {
        throw ConfigError(e.what());
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("factcheck.rating_map: {}", e.what()));
    }

    s.workers = get_count(j, "runtime.workers", 1);
    s.deadline = std::chrono::milliseconds(get_count(j, "runtime.deadline_ms", 1));
    return s;
}

json Settings::to_json() const {
    json models_json = json::object();
    for (const auto& [id, p] : models) {
        models_json[std::string(claimguard::gateway::to_string(id))] = {
            {"model_name", p.model_name},
            {"endpoint", p.endpoint},
            {"api_key_env", p.api_key_env},
            {"temperature", p.temperature},
            {"max_tokens", p.max_tokens},
            {"confidence_scale", p.confidence_scale == gateway::ConfidenceScale::Percent ? "percent" : "unit"},
        };
    }
    return {
        {"thresholds", {{"high", thresholds.high}, {"med", thresholds.med}}},
        {"retrieval", {{"k", k}, {"nprobe", nprobe}, {"nlist", nlist ? json(*nlist) : json(nullptr)}}},
        {"embedding",
         {{"kind", embedder_kind == embedding::EmbedderConfig::Kind::RemoteHttp ? "remote_http"
                                                                                : "deterministic_local"},
          {"dimension", dimension},
          {"endpoint", embedding_endpoint},
          {"api_key_env", embedding_api_key_env}}},
        {"providers", {{"llm", llm.to_string()}, {"factcheck", factcheck.to_string()}}},
        {"models", std::move(models_json)},
        {"factcheck", {{"endpoint", factcheck_endpoint}, {"api_key_env", factcheck_api_key_env}}},
        {"roles", roles.roles()},
        {"runtime", {{"workers", workers}, {"deadline_ms", deadline.count()}}},
    };
}

} // namespace claimguard::config
