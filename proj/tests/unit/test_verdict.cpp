#include <gtest/gtest.h>

#include <random>

#include "../oracles/integration_reference.hpp"
#include "claimguard/verdict/verdict.hpp"

using namespace claimguard;
using namespace claimguard::verdict;

namespace {

NormalizedResult rag(PipelineId id, Label label, double c, SourceAttribution src = SourceAttribution::retrieved("u")) {
    return normalize(PipelineResult(id, RouteTag::Tier2Hybrid, label, "e-" + std::string(to_string(id)),
                                    std::move(src), c));
}

NormalizedResult fc(Label label, double c, bool external) {
    if (external) {
        return normalize(PipelineResult(PipelineId::FactCheck, RouteTag::ExternalMatch, label, "fc",
                                        SourceAttribution::external_factcheck("https://fc/1"), c));
    }
    return normalize(PipelineResult(PipelineId::FactCheck, RouteTag::LlmFallback, label, "fc",
                                    SourceAttribution::parametric(), c));
}

} // namespace

TEST(Normalize, UnrecognizedLabelBecomesNeiWithAnnotation) {
    RawResult raw{PipelineId::Rag1, RouteTag::Tier2Hybrid, "Mostly-Accurate", "ev", SourceAttribution::retrieved("u"),
                  0.4};
    const auto normalized = normalize(raw);
    const PipelineResult& r = normalized;
    EXPECT_EQ(r.label(), Label::Nei);
    ASSERT_TRUE(r.annotation());
    EXPECT_NE(r.annotation()->find("Mostly-Accurate"), std::string::npos);
}

TEST(Normalize, ClampsAndRoundsConfidence) {
    EXPECT_EQ(normalize_confidence(1.7), 1.0);
    EXPECT_EQ(normalize_confidence(-0.2), 0.0);
    EXPECT_EQ(normalize_confidence(0.123456), 0.1235);
    EXPECT_EQ(normalize_confidence(0.99995), 1.0);
    EXPECT_EQ(normalize_confidence(std::nan("")), 0.0);
    RawResult raw{PipelineId::Rag2, RouteTag::Tier1Direct, " TRUE ", "ev", SourceAttribution::retrieved("u"), 1.3};
    const auto normalized = normalize(raw);
    const PipelineResult& r = normalized;
    EXPECT_EQ(r.label(), Label::True);
    EXPECT_EQ(r.confidence(), 1.0);
}

TEST(Normalize, IsIdempotent) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (int i = 0; i < 5000; ++i) {
        RawResult raw{PipelineId::Rag1, RouteTag::Tier2Hybrid, (i % 3 == 0) ? "bogus" : "false", "ev",
                      SourceAttribution::retrieved("u"), u(rng)};
        const auto once = normalize(raw);
        const auto twice = normalize(once.result());
        EXPECT_EQ(once.result(), twice.result());
    }
}

TEST(Integrate, ExternalFactCheckWinsEvenAtLowerConfidenceRanks) {
    const auto v = integrate("c", rag(PipelineId::Rag1, Label::True, 0.99), rag(PipelineId::Rag2, Label::True, 0.98),
                             fc(Label::False, 1.0, true));
    EXPECT_EQ(v.decision_rule, DecisionRule::FactCheckPriority);
    EXPECT_EQ(v.label, Label::False);
    EXPECT_EQ(v.source.kind, SourceKind::ExternalFactCheck);
    EXPECT_EQ(v.confidence, 1.0);
}

TEST(Integrate, AllZeroGivesNeiDefault) {
    const auto v = integrate("c", rag(PipelineId::Rag1, Label::Nei, 0.0), rag(PipelineId::Rag2, Label::Nei, 0.0),
                             fc(Label::Nei, 0.0, false));
    EXPECT_EQ(v.decision_rule, DecisionRule::NeiDefault);
    EXPECT_EQ(v.label, Label::Nei);
    EXPECT_EQ(v.evidence, "Insufficient information");
    EXPECT_EQ(v.source.reference, "No evidence");
    EXPECT_EQ(v.confidence, 0.0);
}

TEST(Integrate, TinyConfidenceIsNotZero) {
    const auto v = integrate("c", rag(PipelineId::Rag1, Label::True, 0.0001), rag(PipelineId::Rag2, Label::Nei, 0.0),
                             fc(Label::Nei, 0.0, false));
    EXPECT_EQ(v.decision_rule, DecisionRule::ArgmaxConfidence);
    EXPECT_EQ(v.label, Label::True);
}

TEST(Integrate, TieBreakOrder) {
    auto v = integrate("c", rag(PipelineId::Rag1, Label::True, 0.7), rag(PipelineId::Rag2, Label::False, 0.7),
                       fc(Label::Nei, 0.7, false));
    EXPECT_EQ(v.label, Label::Nei);  // fact-check first
    v = integrate("c", rag(PipelineId::Rag1, Label::True, 0.7), rag(PipelineId::Rag2, Label::False, 0.7),
                  fc(Label::Nei, 0.2, false));
    EXPECT_EQ(v.label, Label::True);  // then rag1
    v = integrate("c", rag(PipelineId::Rag1, Label::True, 0.1), rag(PipelineId::Rag2, Label::False, 0.7),
                  fc(Label::Nei, 0.2, false));
    EXPECT_EQ(v.label, Label::False);
}

TEST(Integrate, RejectsMisorderedInputs) {
    EXPECT_THROW(integrate("c", rag(PipelineId::Rag2, Label::True, 0.7), rag(PipelineId::Rag1, Label::False, 0.7),
                           fc(Label::Nei, 0.7, false)),
                 InvalidArgument);
}

TEST(Integrate, AgreesWithReferenceOnRandomTriples) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> pick(0, 5);
    const auto conf = [&] {
        switch (pick(rng)) {
        case 0: return 0.0;
        case 1: return 1.0;
        case 2: return 0.5;
        default: return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        }
    };
    const Label labels[] = {Label::True, Label::False, Label::Nei};
    for (int i = 0; i < 2000; ++i) {
        const auto r1 = rag(PipelineId::Rag1, labels[pick(rng) % 3], conf());
        const auto r2 = rag(PipelineId::Rag2, labels[pick(rng) % 3], conf(), SourceAttribution::parametric());
        const auto r3 = fc(labels[pick(rng) % 3], conf(), pick(rng) == 0);
        const auto got = integrate("c", r1, r2, r3);
        const auto want = oracle::reference_integrate(r1, r2, r3);
        ASSERT_EQ(got.label, want.label);
        ASSERT_EQ(got.evidence, want.evidence);
        ASSERT_EQ(got.source.kind, want.source_kind);
        ASSERT_EQ(got.confidence, want.confidence);
        ASSERT_EQ(to_string(got.decision_rule), want.rule);
    }
}
