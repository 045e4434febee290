#pragma once

#include <string>

#include "claimguard/core/types.hpp"

namespace claimguard::verdict {

/// A pipeline output before normalization: label as free text, confidence
/// on any scale.
struct RawResult {
    PipelineId pipeline = PipelineId::Rag1;
    RouteTag route = RouteTag::Tier3RoleBased;
    std::string label;
    std::string evidence;
    SourceAttribution source;
    double confidence = 0.0;
};

/// PipelineResult with a canonical label and a confidence clamped to [0, 1]
/// and rounded to 4 decimals. Only normalize() makes one.
class NormalizedResult {
public:
    const PipelineResult& result() const noexcept { return result_; }
    operator const PipelineResult&() const noexcept { return result_; }

private:
    explicit NormalizedResult(PipelineResult r) : result_(std::move(r)) {}

    friend NormalizedResult normalize(const RawResult& raw);
    friend NormalizedResult normalize(const PipelineResult& result);

    PipelineResult result_;
};

double normalize_confidence(double confidence) noexcept;

/// Total. Unrecognized labels become nei with the original kept in the
/// result's annotation.
NormalizedResult normalize(const RawResult& raw);
NormalizedResult normalize(const PipelineResult& result);

/// Verdict integration:
///   1. fact-check result sourced from an external fact-check wins outright;
///   2. all three confidences exactly 0 gives the fixed NEI record;
///   3. otherwise the highest confidence wins, ties to factcheck > rag1 > rag2.
VerdictReport integrate(std::string claim_id, const NormalizedResult& rag1, const NormalizedResult& rag2,
                        const NormalizedResult& factcheck);

} // namespace claimguard::verdict
