#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include "../support/fakes.hpp"
#include "../support/support.hpp"
#include "claimguard/engine/verifier.hpp"

using namespace claimguard;
using namespace std::chrono_literals;
using claimguard::test::fenced;

namespace {

class SlowProvider final : public gateway::CompletionProvider {
public:
    SlowProvider(std::chrono::milliseconds delay, double confidence) : delay_(delay), confidence_(confidence) {}
    std::string complete(const gateway::ModelProfile&, const std::string&) override {
        std::this_thread::sleep_for(delay_);
        return fenced({{"label", "true"}, {"evidence", "slow"}, {"confidence", confidence_}});
    }

private:
    std::chrono::milliseconds delay_;
    double confidence_;
};

engine::Pipelines make(std::shared_ptr<gateway::CompletionProvider> llm, std::shared_ptr<factcheck::FactCheckClient> fc,
                       bool rag1 = true, bool rag2 = true, bool fact = true) {
    auto idx = std::make_shared<index::IvfIndex>(index::IvfIndex::flat(embedding::kDefaultDimension));
    idx->freeze();
    auto embedder = std::make_shared<embedding::HashingEmbedder>();
    engine::Pipelines p;
    rag::RagConfig c1;
    c1.profile = gateway::ModelProfile::defaults(gateway::ModelId::RagModel1);
    rag::RagConfig c2;
    c2.profile = gateway::ModelProfile::defaults(gateway::ModelId::RagModel2);
    if (rag1) p.rag1 = std::make_shared<rag::RagPipeline>(PipelineId::Rag1, idx, embedder, llm, c1);
    if (rag2) p.rag2 = std::make_shared<rag::RagPipeline>(PipelineId::Rag2, idx, embedder, llm, c2);
    if (fact) p.factcheck = std::make_shared<factcheck::FactCheckPipeline>(fc, llm, factcheck::FactCheckConfig{});
    return p;
}

} // namespace

TEST(ClaimVerifier, RunsPipelinesConcurrently) {
    auto llm = std::make_shared<SlowProvider>(300ms, 0.6);
    engine::ClaimVerifier v(make(llm, std::make_shared<test::FixedFactCheck>()), 5000ms);
    const auto start = std::chrono::steady_clock::now();
    const auto out = v.verify(Claim("c", "gold prices"));
    const auto took = std::chrono::steady_clock::now() - start;
    EXPECT_LT(took, 800ms);
    EXPECT_EQ(out.report.label, Label::True);
    EXPECT_EQ(out.report.contributing.size(), 3u);
    for (const char* key : {"claim_id", "rag1", "rag2", "factcheck", "verdict"}) EXPECT_TRUE(out.trace.contains(key));
}

TEST(ClaimVerifier, DeadlineSubstitutesPlaceholders) {
    auto llm = std::make_shared<SlowProvider>(1500ms, 0.6);
    engine::ClaimVerifier v(make(llm, std::make_shared<test::FixedFactCheck>()), 100ms);
    const auto start = std::chrono::steady_clock::now();
    const auto out = v.verify(Claim("c", "gold prices"));
    EXPECT_LT(std::chrono::steady_clock::now() - start, 1000ms);
    EXPECT_EQ(out.report.decision_rule, DecisionRule::NeiDefault);
    for (const auto& c : out.report.contributing) {
        EXPECT_EQ(c.confidence(), 0.0);
        EXPECT_NE(c.evidence().find("deadline"), std::string::npos);
    }
}

TEST(ClaimVerifier, DisabledPipelinesContributePlaceholders) {
    auto fc = std::make_shared<test::FixedFactCheck>();
    auto llm = std::make_shared<SlowProvider>(0ms, 0.8);
    engine::ClaimVerifier v(make(llm, fc, true, false, false));
    const auto out = v.verify(Claim("c", "gold prices"));
    EXPECT_EQ(fc->calls(), 0u);
    EXPECT_EQ(out.report.contribution(PipelineId::Rag1).confidence(), 0.8);
    EXPECT_EQ(out.report.contribution(PipelineId::Rag2).confidence(), 0.0);
    EXPECT_NE(out.report.contribution(PipelineId::Rag2).evidence().find("disabled"), std::string::npos);
    EXPECT_EQ(out.report.contribution(PipelineId::FactCheck).route(), RouteTag::LlmFallback);
    EXPECT_TRUE(out.trace["rag2"].is_null());
    EXPECT_THROW(engine::ClaimVerifier(make(llm, fc), 0ms), InvalidArgument);
}

TEST(ClaimVerifier, ExternalMatchDecides) {
    factcheck::Lookup l;
    l.match = factcheck::FactCheckMatch{"x", "False", "Checker", "https://fc.example/1", std::nullopt};
    auto llm = std::make_shared<SlowProvider>(0ms, 1.0);
    engine::ClaimVerifier v(make(llm, std::make_shared<test::FixedFactCheck>(l)));
    const auto out = v.verify(Claim("c", "gold prices"));
    EXPECT_EQ(out.report.decision_rule, DecisionRule::FactCheckPriority);
    EXPECT_EQ(out.report.label, Label::False);
    EXPECT_EQ(out.report.source.reference, "https://fc.example/1");
}
