#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "claimguard/core/types.hpp"
#include "claimguard/embedding/embedder.hpp"
#include "claimguard/gateway/analysis.hpp"
#include "claimguard/index/ivf_index.hpp"

namespace claimguard::rag {

struct TierThresholds {
    double high = 0.6;
    double med = 0.4;

    /// Throws InvalidArgument unless 0 <= med <= high <= 1.
    void validate() const;

    /// Tier 1 at s >= high, Tier 2 at med <= s < high, Tier 3 below med.
    RouteTag route_for(double s_max) const noexcept;
};

struct RagConfig {
    TierThresholds thresholds;
    std::size_t k = 5;
    std::size_t nprobe = 8;
    gateway::ModelProfile profile;
    gateway::ExpertRoleSet roles = gateway::ExpertRoleSet::defaults();
};

/// What happened inside one verify() call, for the audit log.
struct RagTrace {
    std::string claim_id;
    PipelineId pipeline = PipelineId::Rag1;
    std::optional<RouteTag> route;
    std::optional<double> s_max;
    std::vector<std::string> doc_ids;
    std::vector<gateway::Exchange> exchanges;
    std::optional<std::string> error;

    nlohmann::json to_json() const;
};

/// Retrieve, route by best similarity, and produce a PipelineResult.
///
///   no hits          -> role-based analysis, "Parametric Knowledge"
///   s_max >= high    -> stored label/evidence/origin of the best document,
///                       confidence s_max, no model call
///   med <= s < high  -> model reasoning over all hits; source kept only when
///                       the model says it used the context; confidence is the
///                       mean of s_max and the model's confidence
///   s_max < med      -> role-based analysis, "Parametric Knowledge"
///
/// Model failures become the nei/0 placeholder. verify() is reentrant.
class RagPipeline {
public:
    RagPipeline(PipelineId id, std::shared_ptr<const index::IvfIndex> index,
                std::shared_ptr<const embedding::Embedder> embedder,
                std::shared_ptr<gateway::CompletionProvider> provider, RagConfig config);

    PipelineResult verify(const Claim& claim, RagTrace* trace = nullptr) const;

    /// Routing step on already-retrieved hits (any order).
    PipelineResult resolve(const Claim& claim, std::span<const index::SearchHit> hits,
                           RagTrace* trace = nullptr) const;

    PipelineId id() const noexcept { return id_; }
    const RagConfig& config() const noexcept { return config_; }

private:
    PipelineResult role_based(const Claim& claim, RagTrace* trace) const;

    PipelineId id_;
    std::shared_ptr<const index::IvfIndex> index_;
    std::shared_ptr<const embedding::Embedder> embedder_;
    std::shared_ptr<gateway::CompletionProvider> provider_;
    RagConfig config_;
};

} // namespace claimguard::rag
