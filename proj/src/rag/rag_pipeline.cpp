#include "claimguard/rag/rag_pipeline.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace claimguard::rag {

void TierThresholds::validate() const {
    if (!(0.0 <= med && med <= high && high <= 1.0)) {
        throw InvalidArgument(fmt::format("thresholds must satisfy 0 <= med <= high <= 1 (got high={}, med={})",
                                          high, med));
    }
}

RouteTag TierThresholds::route_for(double s_max) const noexcept {
    if (s_max >= high) return RouteTag::Tier1Direct;
    if (s_max >= med) return RouteTag::Tier2Hybrid;
    return RouteTag::Tier3RoleBased;
}

nlohmann::json RagTrace::to_json() const {
    nlohmann::json exch = nlohmann::json::array();
    for (const auto& e : exchanges) exch.push_back({{"prompt", e.prompt}, {"completion", e.completion}});
    return {
        {"claim_id", claim_id},
        {"pipeline", to_string(pipeline)},
        {"route", route ? nlohmann::json(to_string(*route)) : nlohmann::json(nullptr)},
        {"s_max", s_max ? nlohmann::json(*s_max) : nlohmann::json(nullptr)},
        {"doc_ids", doc_ids},
        {"exchanges", std::move(exch)},
        {"error", error ? nlohmann::json(*error) : nlohmann::json(nullptr)},
    };
}

RagPipeline::RagPipeline(PipelineId id, std::shared_ptr<const index::IvfIndex> index,
                         std::shared_ptr<const embedding::Embedder> embedder,
                         std::shared_ptr<gateway::CompletionProvider> provider, RagConfig config)
    : id_(id), index_(std::move(index)), embedder_(std::move(embedder)), provider_(std::move(provider)),
      config_(std::move(config)) {
    if (id_ == PipelineId::FactCheck) throw InvalidArgument("RAG pipeline id must be rag1 or rag2");
    if (!index_ || !embedder_ || !provider_) throw InvalidArgument("RAG pipeline is missing a dependency");
    if (config_.k == 0) throw InvalidArgument("retrieval depth k must be at least 1");
    config_.thresholds.validate();
}

PipelineResult RagPipeline::verify(const Claim& claim, RagTrace* trace) const {
    if (trace) {
        trace->claim_id = claim.id;
        trace->pipeline = id_;
    }
    std::vector<index::SearchHit> hits;
    try {
        hits = index_->search(embedder_->embed(claim.text), config_.k, config_.nprobe);
    } catch (const Error& e) {
        spdlog::warn("{} retrieval failed for claim {}: {}", to_string(id_), claim.id, e.what());
        if (trace) trace->error = e.what();
        return PipelineResult::placeholder(id_, RouteTag::Tier3RoleBased, e.what());
    }
    return resolve(claim, hits, trace);
}

PipelineResult RagPipeline::role_based(const Claim& claim, RagTrace* trace) const {
    std::vector<gateway::Exchange> exchanges;
    try {
        const auto a = gateway::role_based_analysis(*provider_, config_.profile, claim.text, config_.roles,
                                                    &exchanges);
        if (trace) trace->exchanges = std::move(exchanges);
        return {id_, RouteTag::Tier3RoleBased, a.label, a.evidence, SourceAttribution::parametric(), a.confidence};
    } catch (const gateway::GatewayError& e) {
        if (trace) {
            trace->exchanges = std::move(exchanges);
            trace->error = e.what();
        }
        return PipelineResult::placeholder(id_, RouteTag::Tier3RoleBased, e.what());
    }
}

PipelineResult RagPipeline::resolve(const Claim& claim, std::span<const index::SearchHit> hits,
                                    RagTrace* trace) const {
    if (trace) {
        trace->claim_id = claim.id;
        trace->pipeline = id_;
    }
    if (hits.empty()) {
        if (trace) trace->route = RouteTag::Tier3RoleBased;
        return role_based(claim, trace);
    }

    std::vector<index::SearchHit> ranked(hits.begin(), hits.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.score != b.score ? a.score > b.score : a.document.doc_id < b.document.doc_id;
    });
    const auto& best = ranked.front();
    const double s_max = best.score;
    const RouteTag route = config_.thresholds.route_for(s_max);
    if (trace) {
        trace->route = route;
        trace->s_max = s_max;
        for (const auto& h : ranked) trace->doc_ids.push_back(h.document.doc_id);
    }

    switch (route) {
    case RouteTag::Tier1Direct: {
        const auto& doc = best.document;
        auto evidence = doc.evidence_text.empty() ? "Claim on record: " + doc.claim_text : doc.evidence_text;
        return {id_, route, doc.label, std::move(evidence), SourceAttribution::retrieved(doc.origin),
                std::clamp(s_max, 0.0, 1.0)};
    }
    case RouteTag::Tier2Hybrid: {
        std::vector<gateway::Exchange> exchanges;
        try {
            const auto a = gateway::model_reasoning(*provider_, config_.profile, claim.text, ranked, &exchanges);
            if (trace) trace->exchanges = std::move(exchanges);
            auto source = a.used_context ? SourceAttribution::retrieved(best.document.origin)
                                         : SourceAttribution::parametric();
            return {id_, route, a.label, a.evidence, std::move(source), (s_max + a.confidence) / 2.0};
        } catch (const gateway::GatewayError& e) {
            if (trace) {
                trace->exchanges = std::move(exchanges);
                trace->error = e.what();
            }
            return PipelineResult::placeholder(id_, route, e.what());
        }
    }
    default: return role_based(claim, trace);
    }
}

} // namespace claimguard::rag
