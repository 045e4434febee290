#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "claimguard/core/types.hpp"
#include "claimguard/gateway/provider.hpp"
#include "claimguard/index/ivf_index.hpp"

namespace claimguard::gateway {

class ExpertRoleSet {
public:
    /// Throws InvalidArgument when empty or when a role name is blank.
    explicit ExpertRoleSet(std::vector<std::string> roles);

    /// Financial Analyst, Political Misinformation Specialist, Government
    /// Policy Analyst, Investigative Journalist.
    static ExpertRoleSet defaults();

    const std::vector<std::string>& roles() const noexcept { return roles_; }

private:
    std::vector<std::string> roles_;
};

struct ModelAssessment {
    Label label = Label::Nei;
    std::string evidence;
    double confidence = 0.0;
    bool used_context = false;
};

/// One prompt/completion pair, kept for audit traces.
struct Exchange {
    std::string prompt;
    std::string completion;
};

/// "[i] evidence_text (source: origin)" per hit, numbered from 1, one per line.
std::string combine_documents(std::span<const index::SearchHit> hits);

std::string reasoning_prompt(std::string_view claim, std::span<const index::SearchHit> context);
std::string role_prompt(std::string_view claim, const ExpertRoleSet& roles);
std::string repair_prompt(std::string_view original_prompt, std::string_view bad_completion);

/// Parses the first fenced block (```json ... ``` or ``` ... ```) of a
/// completion. Required keys: label, evidence, confidence; optional boolean
/// used_context. Confidence outside [0, 1] is clamped with a warning; with
/// ConfidenceScale::Percent it is divided by 100 first. Anything else throws
/// GatewayError{ParseFailure}; a partial assessment is never returned.
ModelAssessment parse_assessment(std::string_view completion,
                                 ConfidenceScale scale = ConfidenceScale::Unit);

/// Hybrid reasoning over retrieved context. One repair retry on a parse
/// failure, then GatewayError{ParseFailure}.
ModelAssessment model_reasoning(CompletionProvider& provider, const ModelProfile& profile,
                                std::string_view claim, std::span<const index::SearchHit> context,
                                std::vector<Exchange>* transcript = nullptr);

/// Multi-perspective analysis without retrieved context; used_context is
/// always false in the result.
ModelAssessment role_based_analysis(CompletionProvider& provider, const ModelProfile& profile,
                                    std::string_view claim, const ExpertRoleSet& roles,
                                    std::vector<Exchange>* transcript = nullptr);

} // namespace claimguard::gateway
