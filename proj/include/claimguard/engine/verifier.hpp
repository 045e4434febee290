#pragma once

#include <chrono>
#include <memory>

#include <nlohmann/json.hpp>

#include "claimguard/core/types.hpp"
#include "claimguard/factcheck/factcheck.hpp"
#include "claimguard/rag/rag_pipeline.hpp"

namespace claimguard::engine {

/// A null pipeline is disabled and contributes the nei/0 placeholder.
struct Pipelines {
    std::shared_ptr<const rag::RagPipeline> rag1;
    std::shared_ptr<const rag::RagPipeline> rag2;
    std::shared_ptr<const factcheck::FactCheckPipeline> factcheck;
};

struct Verification {
    VerdictReport report;
    /// {"claim_id", "rag1", "rag2", "factcheck", "verdict"}; disabled or
    /// timed-out pipelines have a null trace.
    nlohmann::json trace;
};

/// Runs the three pipelines concurrently and integrates their results.
/// A pipeline still running at the deadline is abandoned and replaced by a
/// placeholder; its thread finishes on its own.
class ClaimVerifier {
public:
    explicit ClaimVerifier(Pipelines pipelines,
                           std::chrono::milliseconds deadline = std::chrono::milliseconds(120000));

    Verification verify(const Claim& claim) const;

    const Pipelines& pipelines() const noexcept { return pipelines_; }
    std::chrono::milliseconds deadline() const noexcept { return deadline_; }

private:
    Pipelines pipelines_;
    std::chrono::milliseconds deadline_;
};

} // namespace claimguard::engine
