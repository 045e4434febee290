#include "claimguard/verdict/verdict.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "claimguard/util/text.hpp"

namespace claimguard::verdict {

double normalize_confidence(double confidence) noexcept {
    if (std::isnan(confidence)) return 0.0;
    const double clamped = std::clamp(confidence, 0.0, 1.0);
    return std::round(clamped * 1e4) / 1e4;
}

NormalizedResult normalize(const RawResult& raw) {
    Label label = Label::Nei;
    std::optional<std::string> annotation;
    try {
        label = parse_label(util::trim(raw.label));
    } catch (const UnrecognizedLabel&) {
        annotation = "unrecognized label: " + raw.label;
    }
    const double confidence = normalize_confidence(raw.confidence);
    auto source = raw.source;
    if (source.kind == SourceKind::Parametric) source = SourceAttribution::parametric();
    auto evidence = raw.evidence;
    if (evidence.empty() && (label != Label::Nei || confidence > 0.0)) evidence = "<no evidence provided>";
    return NormalizedResult(
        PipelineResult(raw.pipeline, raw.route, label, std::move(evidence), std::move(source), confidence,
                       std::move(annotation)));
}

NormalizedResult normalize(const PipelineResult& result) {
    return NormalizedResult(result.with_confidence(normalize_confidence(result.confidence())));
}

VerdictReport integrate(std::string claim_id, const NormalizedResult& rag1, const NormalizedResult& rag2,
                        const NormalizedResult& factcheck) {
    const PipelineResult& r1 = rag1;
    const PipelineResult& r2 = rag2;
    const PipelineResult& r3 = factcheck;
    if (r1.pipeline() != PipelineId::Rag1 || r2.pipeline() != PipelineId::Rag2 ||
        r3.pipeline() != PipelineId::FactCheck) {
        throw InvalidArgument("integrate expects results from rag1, rag2 and factcheck in that order");
    }

    VerdictReport report;
    report.claim_id = std::move(claim_id);
    report.contributing = {r1, r2, r3};

    const auto adopt = [&report](const PipelineResult& r, DecisionRule rule) {
        report.label = r.label();
        report.evidence = r.evidence();
        report.source = r.source();
        report.confidence = r.confidence();
        report.decision_rule = rule;
    };

    if (r3.source().kind == SourceKind::ExternalFactCheck) {
        adopt(r3, DecisionRule::FactCheckPriority);
        return report;
    }
    if (r1.confidence() == 0.0 && r2.confidence() == 0.0 && r3.confidence() == 0.0) {
        report.label = Label::Nei;
        report.evidence = std::string(kInsufficientInformation);
        report.source = SourceAttribution::no_evidence();
        report.confidence = 0.0;
        report.decision_rule = DecisionRule::NeiDefault;
        return report;
    }
    const std::array<const PipelineResult*, 3> priority = {&r3, &r1, &r2};
    const PipelineResult* best = priority[0];
    for (const auto* r : priority) {
        if (r->confidence() > best->confidence()) best = r;
    }
    adopt(*best, DecisionRule::ArgmaxConfidence);
    return report;
}

} // namespace claimguard::verdict
