#include "claimguard/gateway/analysis.hpp"

#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "claimguard/util/text.hpp"

namespace claimguard::gateway {

namespace {

constexpr std::string_view kReasoningTemplate = R"(You are verifying a financial claim against retrieved evidence.

Claim:
{claim}

Retrieved context:
{context}

Instructions:
- Evaluate the claim using the provided context.
- Decide whether the claim is true, false, or whether there is not enough information to decide (nei).
- Set "used_context" to true only if the retrieved context is relevant and sufficient for your verdict. Set it to false if the context is insufficient and you relied on your own knowledge.
- Give "confidence" as a number between 0 and 1.

Respond with a single fenced JSON block and nothing else:
```json
{{"label": "true" | "false" | "nei", "evidence": "<short justification>", "confidence": <number in [0, 1]>, "used_context": true | false}}
```)";

constexpr std::string_view kRoleTemplate = R"(You are a panel of experts verifying a financial claim. No retrieved evidence is available.

Claim:
{claim}

Analyze the claim from each of these perspectives, in this order:
{roles}

Then combine the perspectives into one integrated verdict: true, false, or nei when there is not enough information to decide. Base the verdict on your own knowledge and do not invent citations.
Give "confidence" as a number between 0 and 1.

Respond with a single fenced JSON block and nothing else:
```json
{{"label": "true" | "false" | "nei", "evidence": "<integrated justification>", "confidence": <number in [0, 1]>}}
```)";

constexpr std::string_view kRepairTemplate = R"(Your previous reply could not be parsed. It must contain exactly one fenced JSON block with the keys "label", "evidence" and "confidence" (and "used_context" when asked for).

Original task:
{prompt}

Previous reply:
{reply}

Reply again with only the fenced JSON block.)";

GatewayError parse_failure(const std::string& why) {
    return GatewayError(GatewayError::Kind::ParseFailure, "cannot parse model output: " + why);
}

std::string_view fenced_block(std::string_view text) {
    const auto open = text.find("```");
    if (open == std::string_view::npos) throw parse_failure("no fenced JSON block");
    const auto line_end = text.find('\n', open + 3);
    if (line_end == std::string_view::npos) throw parse_failure("unterminated fenced block");
    const auto info = util::trim(text.substr(open + 3, line_end - open - 3));
    if (!info.empty() && !util::iequals(info, "json")) throw parse_failure("fenced block is not JSON");
    const auto close = text.find("```", line_end + 1);
    if (close == std::string_view::npos) throw parse_failure("unterminated fenced block");
    return text.substr(line_end + 1, close - line_end - 1);
}

template <class Fn>
ModelAssessment with_repair(CompletionProvider& provider, const ModelProfile& profile,
                            const std::string& prompt, std::vector<Exchange>* transcript, Fn&& parse) {
    auto completion = provider.complete(profile, prompt);
    if (transcript) transcript->push_back({prompt, completion});
    try {
        return parse(completion);
    } catch (const GatewayError& e) {
        if (e.kind() != GatewayError::Kind::ParseFailure) throw;
        spdlog::warn("{}: {}; sending repair prompt", to_string(profile.id), e.what());
    }
    const auto repair = repair_prompt(prompt, completion);
    auto second = provider.complete(profile, repair);
    if (transcript) transcript->push_back({repair, second});
    return parse(second);
}

} // namespace

ExpertRoleSet::ExpertRoleSet(std::vector<std::string> roles) : roles_(std::move(roles)) {
    if (roles_.empty()) throw InvalidArgument("expert role set is empty");
    for (const auto& r : roles_) {
        if (util::trim(r).empty()) throw InvalidArgument("expert role name is blank");
    }
}

ExpertRoleSet ExpertRoleSet::defaults() {
    return ExpertRoleSet({"Financial Analyst", "Political Misinformation Specialist",
                          "Government Policy Analyst", "Investigative Journalist"});
}

std::string combine_documents(std::span<const index::SearchHit> hits) {
    std::string out;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const auto& doc = hits[i].document;
        const auto& text = doc.evidence_text.empty() ? doc.claim_text : doc.evidence_text;
        out += fmt::format("[{}] {} (source: {})", i + 1, text, doc.origin);
        if (i + 1 < hits.size()) out += '\n';
    }
    return out;
}

std::string reasoning_prompt(std::string_view claim, std::span<const index::SearchHit> context) {
    return fmt::format(fmt::runtime(kReasoningTemplate), fmt::arg("claim", claim),
                       fmt::arg("context", combine_documents(context)));
}

std::string role_prompt(std::string_view claim, const ExpertRoleSet& roles) {
    std::string list;
    for (std::size_t i = 0; i < roles.roles().size(); ++i) {
        list += fmt::format("{}. {}", i + 1, roles.roles()[i]);
        if (i + 1 < roles.roles().size()) list += '\n';
    }
    return fmt::format(fmt::runtime(kRoleTemplate), fmt::arg("claim", claim), fmt::arg("roles", list));
}

std::string repair_prompt(std::string_view original_prompt, std::string_view bad_completion) {
    return fmt::format(fmt::runtime(kRepairTemplate), fmt::arg("prompt", original_prompt),
                       fmt::arg("reply", bad_completion));
}

ModelAssessment parse_assessment(std::string_view completion, ConfidenceScale scale) {
    const auto block = fenced_block(completion);
    const auto j = nlohmann::json::parse(block, nullptr, false);
    if (j.is_discarded()) throw parse_failure("fenced block is not valid JSON");
    if (!j.is_object()) throw parse_failure("fenced block is not a JSON object");

    if (!j.contains("label") || !j.at("label").is_string()) throw parse_failure("missing string 'label'");
    if (!j.contains("evidence") || !j.at("evidence").is_string()) {
        throw parse_failure("missing string 'evidence'");
    }
    if (!j.contains("confidence") || !j.at("confidence").is_number()) {
        throw parse_failure("missing numeric 'confidence'");
    }
    if (j.contains("used_context") && !j.at("used_context").is_boolean()) {
        throw parse_failure("'used_context' must be a boolean");
    }

    ModelAssessment a;
    try {
        a.label = parse_label(util::trim(j.at("label").get<std::string>()));
    } catch (const UnrecognizedLabel& e) {
        throw parse_failure(e.what());
    }
    a.evidence = std::string(util::trim(j.at("evidence").get<std::string>()));
    double confidence = j.at("confidence").get<double>();
    if (!std::isfinite(confidence)) throw parse_failure("confidence is not finite");
    if (scale == ConfidenceScale::Percent) confidence /= 100.0;
    if (confidence < 0.0 || confidence > 1.0) {
        spdlog::warn("model confidence {} outside [0, 1]; clamping", confidence);
        confidence = std::clamp(confidence, 0.0, 1.0);
    }
    a.confidence = confidence;
    a.used_context = j.value("used_context", false);
    if (a.evidence.empty() && (a.label != Label::Nei || a.confidence > 0.0)) {
        throw parse_failure("empty evidence for a non-trivial verdict");
    }
    return a;
}

ModelAssessment model_reasoning(CompletionProvider& provider, const ModelProfile& profile,
                                std::string_view claim, std::span<const index::SearchHit> context,
                                std::vector<Exchange>* transcript) {
    if (context.empty()) throw InvalidArgument("model reasoning needs retrieved context");
    return with_repair(provider, profile, reasoning_prompt(claim, context), transcript,
                       [&](std::string_view text) { return parse_assessment(text, profile.confidence_scale); });
}

ModelAssessment role_based_analysis(CompletionProvider& provider, const ModelProfile& profile,
                                    std::string_view claim, const ExpertRoleSet& roles,
                                    std::vector<Exchange>* transcript) {
    return with_repair(provider, profile, role_prompt(claim, roles), transcript, [&](std::string_view text) {
        auto a = parse_assessment(text, profile.confidence_scale);
        a.used_context = false;
        return a;
    });
}

} // namespace claimguard::gateway
