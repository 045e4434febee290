#pragma once

// Brute-force reference for verdict integration, written from the rule
// statement alone: external fact-check wins, then the all-zero NEI record,
// then the maximum confidence with ties resolved factcheck, rag1, rag2.

#include <string>
#include <vector>

#include "claimguard/core/types.hpp"

namespace claimguard::oracle {

struct ReferenceVerdict {
    Label label;
    std::string evidence;
    SourceKind source_kind;
    std::string source_reference;
    double confidence;
    std::string rule;
};

inline ReferenceVerdict reference_integrate(const PipelineResult& r1, const PipelineResult& r2,
                                            const PipelineResult& r3) {
    const auto from = [](const PipelineResult& r, const char* rule) {
        return ReferenceVerdict{r.label(), r.evidence(), r.source().kind, r.source().reference, r.confidence(),
                                rule};
    };
    if (r3.source().kind == SourceKind::ExternalFactCheck) return from(r3, "factcheck_priority");

    bool any_nonzero = false;
    for (const auto* r : {&r1, &r2, &r3}) any_nonzero = any_nonzero || r->confidence() != 0.0;
    if (!any_nonzero) {
        return {Label::Nei, "Insufficient information", SourceKind::None, "No evidence", 0.0, "nei_default"};
    }

    double top = -1.0;
    for (const auto* r : {&r1, &r2, &r3}) top = r->confidence() > top ? r->confidence() : top;
    // Walk the tie-break order and take the first one holding the maximum.
    for (const auto* r : {&r3, &r1, &r2}) {
        if (r->confidence() == top) return from(*r, "argmax_confidence");
    }
    return from(r3, "unreachable");
}

} // namespace claimguard::oracle
