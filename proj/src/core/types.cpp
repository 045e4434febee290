#include "claimguard/core/types.hpp"

#include <algorithm>
#include <cmath>

#include "claimguard/util/text.hpp"

namespace claimguard {

Label parse_label(std::string_view raw) {
    if (util::iequals(raw, "true")) return Label::True;
    if (util::iequals(raw, "false")) return Label::False;
    if (util::iequals(raw, "nei")) return Label::Nei;
    throw UnrecognizedLabel(std::string(raw));
}

std::string_view to_string(Label label) noexcept {
    switch (label) {
    case Label::True: return "true";
    case Label::False: return "false";
    case Label::Nei: return "nei";
    }
    return "nei";
}

std::string_view to_string(SourceKind kind) noexcept {
    switch (kind) {
    case SourceKind::Retrieved: return "retrieved";
    case SourceKind::ExternalFactCheck: return "external_factcheck";
    case SourceKind::Parametric: return "parametric";
    case SourceKind::None: return "none";
    }
    return "none";
}

SourceAttribution SourceAttribution::retrieved(std::string reference) {
    if (util::trim(reference).empty()) {
        throw InvalidArgument("retrieved source needs a document id or origin");
    }
    return {SourceKind::Retrieved, std::move(reference)};
}

SourceAttribution SourceAttribution::external_factcheck(std::string url) {
    if (util::trim(url).empty()) {
        throw InvalidArgument("external fact-check source needs a URL");
    }
    return {SourceKind::ExternalFactCheck, std::move(url)};
}

SourceAttribution SourceAttribution::parametric() {
    return {SourceKind::Parametric, std::string(kParametricKnowledge)};
}

SourceAttribution SourceAttribution::no_evidence() {
    return {SourceKind::None, std::string(kNoEvidence)};
}

std::string_view to_string(PipelineId id) noexcept {
    switch (id) {
    case PipelineId::Rag1: return "rag1";
    case PipelineId::Rag2: return "rag2";
    case PipelineId::FactCheck: return "factcheck";
    }
    return "rag1";
}

std::string_view to_string(RouteTag route) noexcept {
    switch (route) {
    case RouteTag::Tier1Direct: return "tier1_direct";
    case RouteTag::Tier2Hybrid: return "tier2_hybrid";
    case RouteTag::Tier3RoleBased: return "tier3_rolebased";
    case RouteTag::ExternalMatch: return "external_match";
    case RouteTag::LlmFallback: return "llm_fallback";
    }
    return "llm_fallback";
}

bool is_rag_route(RouteTag route) noexcept {
    return route == RouteTag::Tier1Direct || route == RouteTag::Tier2Hybrid ||
           route == RouteTag::Tier3RoleBased;
}

std::string_view to_string(DecisionRule rule) noexcept {
    switch (rule) {
    case DecisionRule::FactCheckPriority: return "factcheck_priority";
    case DecisionRule::ArgmaxConfidence: return "argmax_confidence";
    case DecisionRule::NeiDefault: return "nei_default";
    }
    return "nei_default";
}

Claim::Claim(std::string id_, std::string text_, std::optional<std::string> posted_at_,
             std::optional<std::string> author_)
    : id(std::move(id_)), text(std::move(text_)), posted_at(std::move(posted_at_)),
      author(std::move(author_)) {
    if (util::trim(text).empty()) throw InvalidArgument("claim text is empty");
}

PipelineResult::PipelineResult(PipelineId pipeline, RouteTag route, Label label,
                               std::string evidence, SourceAttribution source, double confidence,
                               std::optional<std::string> annotation)
    : pipeline_(pipeline), route_(route), label_(label), evidence_(std::move(evidence)),
      source_(std::move(source)), confidence_(confidence), annotation_(std::move(annotation)) {
    if (!(confidence_ >= 0.0 && confidence_ <= 1.0)) {
        throw InvalidArgument("confidence must lie in [0, 1]");
    }
    if (evidence_.empty() && (label_ != Label::Nei || confidence_ > 0.0)) {
        throw InvalidArgument("evidence required for a non-nei or non-zero-confidence result");
    }
    const bool fact_check_route =
        route_ == RouteTag::ExternalMatch || route_ == RouteTag::LlmFallback;
    if ((pipeline_ == PipelineId::FactCheck) != fact_check_route) {
        throw InvalidArgument("route tag does not belong to this pipeline");
    }
    if (source_.kind == SourceKind::Parametric && source_.reference != kParametricKnowledge) {
        throw InvalidArgument("parametric source must read 'Parametric Knowledge'");
    }
}

PipelineResult PipelineResult::placeholder(PipelineId pipeline, RouteTag route,
                                           std::string_view reason) {
    return {pipeline,
            route,
            Label::Nei,
            "<pipeline error: " + std::string(reason) + ">",
            SourceAttribution::parametric(),
            0.0};
}

PipelineResult PipelineResult::with_confidence(double confidence) const {
    return {pipeline_, route_, label_, evidence_, source_, confidence, annotation_};
}

const PipelineResult& VerdictReport::contribution(PipelineId id) const {
    auto it = std::find_if(contributing.begin(), contributing.end(),
                           [id](const PipelineResult& r) { return r.pipeline() == id; });
    if (it == contributing.end()) throw InvalidArgument("no contribution for pipeline");
    return *it;
}

nlohmann::json to_json(const SourceAttribution& source) {
    return {{"kind", to_string(source.kind)}, {"reference", source.reference}};
}

nlohmann::json to_json(const PipelineResult& result) {
    nlohmann::json j = {
        {"pipeline_id", to_string(result.pipeline())},
        {"route", to_string(result.route())},
        {"label", to_string(result.label())},
        {"evidence", result.evidence()},
        {"source", to_json(result.source())},
        {"confidence", result.confidence()},
    };
    if (result.annotation()) j["annotation"] = *result.annotation();
    return j;
}

nlohmann::json to_json(const VerdictReport& report) {
    nlohmann::json contributing = nlohmann::json::array();
    for (const auto& r : report.contributing) contributing.push_back(to_json(r));
    return {
        {"claim_id", report.claim_id},
        {"label", to_string(report.label)},
        {"evidence", report.evidence},
        {"source", to_json(report.source)},
        {"confidence", report.confidence},
        {"contributing", std::move(contributing)},
        {"decision_rule", to_string(report.decision_rule)},
    };
}

std::string serialize(const VerdictReport& report) {
    return to_json(report).dump();
}

} // namespace claimguard
