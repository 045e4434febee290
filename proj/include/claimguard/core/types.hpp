#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "claimguard/core/errors.hpp"

namespace claimguard {

enum class Label { True, False, Nei };

/// Case-insensitive parse of {true, false, nei}. Anything else throws
/// UnrecognizedLabel; mapping unknown strings to nei is the caller's call.
Label parse_label(std::string_view raw);

/// Canonical lowercase form.
std::string_view to_string(Label label) noexcept;

inline constexpr std::string_view kParametricKnowledge = "Parametric Knowledge";
inline constexpr std::string_view kNoEvidence = "No evidence";
inline constexpr std::string_view kInsufficientInformation = "Insufficient information";

enum class SourceKind { Retrieved, ExternalFactCheck, Parametric, None };

std::string_view to_string(SourceKind kind) noexcept;

struct SourceAttribution {
    SourceKind kind = SourceKind::None;
    std::string reference;

    static SourceAttribution retrieved(std::string reference);
    static SourceAttribution external_factcheck(std::string url);
    static SourceAttribution parametric();
    static SourceAttribution no_evidence();

    bool operator==(const SourceAttribution&) const = default;
};

enum class PipelineId { Rag1, Rag2, FactCheck };

std::string_view to_string(PipelineId id) noexcept;

enum class RouteTag { Tier1Direct, Tier2Hybrid, Tier3RoleBased, ExternalMatch, LlmFallback };

std::string_view to_string(RouteTag route) noexcept;

bool is_rag_route(RouteTag route) noexcept;

struct Claim {
    std::string id;
    std::string text;
    std::optional<std::string> posted_at;
    std::optional<std::string> author;

    Claim(std::string id, std::string text,
          std::optional<std::string> posted_at = std::nullopt,
          std::optional<std::string> author = std::nullopt);
};

/// One pipeline's verdict. Validated on construction and immutable after.
class PipelineResult {
public:
    PipelineResult(PipelineId pipeline, RouteTag route, Label label, std::string evidence,
                   SourceAttribution source, double confidence,
                   std::optional<std::string> annotation = std::nullopt);

    /// The nei/0 record that stands in for a pipeline that failed, timed out,
    /// or was disabled.
    static PipelineResult placeholder(PipelineId pipeline, RouteTag route, std::string_view reason);

    PipelineId pipeline() const noexcept { return pipeline_; }
    RouteTag route() const noexcept { return route_; }
    Label label() const noexcept { return label_; }
    const std::string& evidence() const noexcept { return evidence_; }
    const SourceAttribution& source() const noexcept { return source_; }
    double confidence() const noexcept { return confidence_; }
    const std::optional<std::string>& annotation() const noexcept { return annotation_; }

    PipelineResult with_confidence(double confidence) const;

    bool operator==(const PipelineResult&) const = default;

private:
    PipelineId pipeline_;
    RouteTag route_;
    Label label_;
    std::string evidence_;
    SourceAttribution source_;
    double confidence_;
    std::optional<std::string> annotation_;
};

enum class DecisionRule { FactCheckPriority, ArgmaxConfidence, NeiDefault };

std::string_view to_string(DecisionRule rule) noexcept;

struct VerdictReport {
    std::string claim_id;
    Label label = Label::Nei;
    std::string evidence;
    SourceAttribution source;
    double confidence = 0.0;
    std::vector<PipelineResult> contributing;  // rag1, rag2, factcheck
    DecisionRule decision_rule = DecisionRule::NeiDefault;

    const PipelineResult& contribution(PipelineId id) const;
};

nlohmann::json to_json(const SourceAttribution& source);
nlohmann::json to_json(const PipelineResult& result);
nlohmann::json to_json(const VerdictReport& report);

/// Canonical single-line serialization used by the CLI and the harness.
std::string serialize(const VerdictReport& report);

} // namespace claimguard
