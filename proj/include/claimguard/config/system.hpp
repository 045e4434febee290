#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "claimguard/config/settings.hpp"
#include "claimguard/engine/verifier.hpp"

namespace claimguard::config {

/// Which pipelines take part. Disabled pipelines contribute placeholders.
enum class Variant {
    Full,                   // rag1 + rag2 + fact-check with LLM fallback
    FactCheckPipelineOnly,  // fact-check with LLM fallback
    ExternalFactCheckOnly,  // fact-check lookup, no fallback
    Rag1Only,
    Rag2Only,
};

std::string_view to_string(Variant v) noexcept;
/// Throws ConfigError listing the valid names.
Variant parse_variant(std::string_view name);
std::vector<std::string> variant_names();

/// Thrown when no provider at all is usable in live mode (CLI exit code 4).
class NoProvidersConfigured : public Error {
public:
    using Error::Error;
};

struct Components {
    std::shared_ptr<const embedding::Embedder> embedder;
    std::shared_ptr<gateway::CompletionProvider> llm;
    std::shared_ptr<factcheck::FactCheckClient> factcheck;
};

/// Builds embedder, completion provider and fact-check client. Secrets are
/// read through `env` by the variable names in the settings and are not
/// retained anywhere else. `transport` (optional) replaces the HTTP client
/// for every live component.
Components build_components(const Settings& settings, const EnvLookup& env,
                            std::shared_ptr<net::HttpTransport> transport = nullptr);

std::shared_ptr<const embedding::Embedder> build_embedder(const Settings& settings, const EnvLookup& env,
                                                          std::shared_ptr<net::HttpTransport> transport = nullptr);

/// True when neither an LLM nor a fact-check source can be reached.
bool all_providers_unconfigured(const Settings& settings, const EnvLookup& env);

/// `index` may be null; RAG pipelines then search an empty index and always
/// take the role-based route.
engine::Pipelines make_pipelines(const Settings& settings, const Components& components,
                                 std::shared_ptr<const index::IvfIndex> index, Variant variant);

} // namespace claimguard::config
