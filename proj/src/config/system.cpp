#include "claimguard/config/system.hpp"

#include <array>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace claimguard::config {

namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 5> kVariants = {{
    {Variant::Full, "full"},
    {Variant::FactCheckPipelineOnly, "factcheck_pipeline_only"},
    {Variant::ExternalFactCheckOnly, "external_factcheck_only"},
    {Variant::Rag1Only, "rag1_only"},
    {Variant::Rag2Only, "rag2_only"},
}};

class UnconfiguredProvider final : public gateway::CompletionProvider {
public:
    std::string complete(const gateway::ModelProfile& profile, const std::string&) override {
        throw gateway::GatewayError(gateway::GatewayError::Kind::ProviderError,
                                    fmt::format("no completion provider configured for {}",
                                                gateway::to_string(profile.id)));
    }
};

class UnconfiguredFactCheck final : public factcheck::FactCheckClient {
public:
    factcheck::Lookup query(std::string_view) override {
        factcheck::Lookup l;
        l.warning = "fact-check provider not configured";
        return l;
    }
};

bool has_value(const EnvLookup& env, const std::string& name) {
    if (!env || name.empty()) return false;
    const auto v = env(name);
    return v && !v->empty();
}

bool llm_reachable(const Settings& s) {
    switch (s.llm.kind) {
    case ProviderSpec::Kind::Mock: return true;
    case ProviderSpec::Kind::Http:
        for (const auto& [id, p] : s.models) {
            if (!p.endpoint.empty()) return true;
        }
        return false;
    case ProviderSpec::Kind::Unconfigured: return false;
    }
    return false;
}

bool factcheck_reachable(const Settings& s, const EnvLookup& env) {
    switch (s.factcheck.kind) {
    case ProviderSpec::Kind::Mock: return true;
    case ProviderSpec::Kind::Http: return has_value(env, s.factcheck_api_key_env);
    case ProviderSpec::Kind::Unconfigured: return false;
    }
    return false;
}

} // namespace

std::string_view to_string(Variant v) noexcept {
    for (const auto& [variant, name] : kVariants) {
        if (variant == v) return name;
    }
    return "full";
}

std::vector<std::string> variant_names() {
    std::vector<std::string> out;
    for (const auto& [variant, name] : kVariants) out.emplace_back(name);
    return out;
}

Variant parse_variant(std::string_view name) {
    for (const auto& [variant, n] : kVariants) {
        if (n == name) return variant;
    }
    throw ConfigError(fmt::format("unknown variant '{}'; valid variants: {}", name,
                                  fmt::join(variant_names(), ", ")));
}

bool all_providers_unconfigured(const Settings& settings, const EnvLookup& env) {
    return !llm_reachable(settings) && !factcheck_reachable(settings, env);
}

std::shared_ptr<const embedding::Embedder> build_embedder(const Settings& settings, const EnvLookup& env,
                                                          std::shared_ptr<net::HttpTransport> transport) {
    embedding::EmbedderConfig ec;
    ec.kind = settings.embedder_kind;
    ec.dimension = settings.dimension;
    ec.remote.endpoint = settings.embedding_endpoint;
    ec.remote.dimension = settings.dimension;
    ec.remote.max_in_flight = settings.embedding_max_in_flight;
    if (ec.kind == embedding::EmbedderConfig::Kind::RemoteHttp && env) {
        ec.remote.api_key = env(settings.embedding_api_key_env).value_or("");
    }
    return embedding::make_embedder(ec, std::move(transport));
}

Components build_components(const Settings& settings, const EnvLookup& env,
                            std::shared_ptr<net::HttpTransport> transport) {
    Components c;

    c.embedder = build_embedder(settings, env, transport);

    switch (settings.llm.kind) {
    case ProviderSpec::Kind::Mock:
        try {
            c.llm = gateway::MockProvider::from_file(settings.llm.mock_path);
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
        break;
    case ProviderSpec::Kind::Http:
        c.llm = std::make_shared<gateway::HttpChatProvider>(transport, env);
        break;
    case ProviderSpec::Kind::Unconfigured:
        spdlog::warn("no completion provider configured; model-backed routes will yield placeholders");
        c.llm = std::make_shared<UnconfiguredProvider>();
        break;
    }

    factcheck::ClaimSearchConfig fc;
    fc.endpoint = settings.factcheck_endpoint;
    fc.cache_ttl = settings.factcheck_cache_ttl;
    fc.requests_per_second = settings.factcheck_rps;
    fc.burst = std::max(1.0, settings.factcheck_rps);
    switch (settings.factcheck.kind) {
    case ProviderSpec::Kind::Mock: {
        factcheck::FixtureSet fixtures;
        try {
            fixtures = factcheck::FixtureSet::from_file(settings.factcheck.mock_path);
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
        // Offline fixtures: no reason to throttle.
        fc.requests_per_second = 1e6;
        fc.burst = 1e6;
        c.factcheck = std::make_shared<factcheck::ClaimSearchClient>(
            fc, std::make_shared<factcheck::FixtureTransport>(std::move(fixtures)));
        break;
    }
    case ProviderSpec::Kind::Http:
        if (!has_value(env, settings.factcheck_api_key_env)) {
            spdlog::warn("fact-check API key variable {} is not set; external lookups disabled",
                         settings.factcheck_api_key_env);
            c.factcheck = std::make_shared<UnconfiguredFactCheck>();
            break;
        }
        fc.api_key = *env(settings.factcheck_api_key_env);
        c.factcheck = std::make_shared<factcheck::ClaimSearchClient>(fc, transport);
        break;
    case ProviderSpec::Kind::Unconfigured:
        c.factcheck = std::make_shared<UnconfiguredFactCheck>();
        break;
    }
    return c;
}

engine::Pipelines make_pipelines(const Settings& settings, const Components& components,
                                 std::shared_ptr<const index::IvfIndex> index, Variant variant) {
    if (!index) {
        auto empty = std::make_shared<index::IvfIndex>(index::IvfIndex::flat(components.embedder->dimension()));
        empty->freeze();
        index = std::move(empty);
    }
    if (index->dimension() != components.embedder->dimension()) {
        throw ConfigError(fmt::format("index dimension {} does not match embedder dimension {}",
                                      index->dimension(), components.embedder->dimension()));
    }

    const auto rag = [&](PipelineId id, gateway::ModelId model) {
        rag::RagConfig rc;
        rc.thresholds = settings.thresholds;
        rc.k = settings.k;
        rc.nprobe = settings.nprobe;
        rc.profile = settings.model(model);
        rc.roles = settings.roles;
        return std::make_shared<const rag::RagPipeline>(id, index, components.embedder, components.llm,
                                                        std::move(rc));
    };
    const auto fact = [&](bool fallback) {
        factcheck::FactCheckConfig fc;
        fc.analyzer = settings.model(gateway::ModelId::FactCheckAnalyzer);
        fc.roles = settings.roles;
        fc.ratings = settings.ratings;
        fc.llm_fallback = fallback;
        return std::make_shared<const factcheck::FactCheckPipeline>(components.factcheck, components.llm,
                                                                    std::move(fc));
    };

    engine::Pipelines p;
    switch (variant) {
    case Variant::Full:
        p.rag1 = rag(PipelineId::Rag1, gateway::ModelId::RagModel1);
        p.rag2 = rag(PipelineId::Rag2, gateway::ModelId::RagModel2);
        p.factcheck = fact(true);
        break;
    case Variant::FactCheckPipelineOnly: p.factcheck = fact(true); break;
    case Variant::ExternalFactCheckOnly: p.factcheck = fact(false); break;
    case Variant::Rag1Only: p.rag1 = rag(PipelineId::Rag1, gateway::ModelId::RagModel1); break;
    case Variant::Rag2Only: p.rag2 = rag(PipelineId::Rag2, gateway::ModelId::RagModel2); break;
    }
    return p;
}

} // namespace claimguard::config
