#include <gtest/gtest.h>

#include <random>

#include "../oracles/metrics_reference.hpp"
#include "claimguard/eval/metrics.hpp"

using namespace claimguard;
using namespace claimguard::eval;

TEST(Metrics, HandComputedConfusion) {
    const Confusion c = {{{5, 1, 0}, {2, 6, 1}, {0, 0, 5}}};
    const auto m = compute_metrics(c);
    EXPECT_EQ(m.total, 20u);
    EXPECT_DOUBLE_EQ(m.accuracy, 16.0 / 20.0);
    EXPECT_NEAR(m.per_class[0].precision, 5.0 / 7.0, 1e-12);
    EXPECT_NEAR(m.per_class[0].recall, 5.0 / 6.0, 1e-12);
    EXPECT_NEAR(m.per_class[0].f1, 10.0 / 13.0, 1e-12);
    EXPECT_NEAR(m.per_class[1].precision, 6.0 / 7.0, 1e-12);
    EXPECT_NEAR(m.per_class[1].recall, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(m.per_class[1].f1, 3.0 / 4.0, 1e-12);
    EXPECT_NEAR(m.per_class[2].precision, 5.0 / 6.0, 1e-12);
    EXPECT_NEAR(m.per_class[2].recall, 1.0, 1e-12);
    EXPECT_NEAR(m.per_class[2].f1, 10.0 / 11.0, 1e-12);
    EXPECT_EQ(m.per_class[0].support, 6u);
    EXPECT_EQ(m.per_class[1].support, 9u);
    EXPECT_EQ(m.per_class[2].support, 5u);
    EXPECT_NEAR(m.weighted.f1, (6 * 10.0 / 13 + 9 * 0.75 + 5 * 10.0 / 11) / 20, 1e-12);
    EXPECT_NEAR(m.weighted.recall, m.accuracy, 1e-12);
    EXPECT_NEAR(m.macro.recall, (5.0 / 6 + 2.0 / 3 + 1.0) / 3, 1e-12);
}

TEST(Metrics, PerfectClassifier) {
    std::vector<Label> gold = {Label::True, Label::False, Label::Nei, Label::True, Label::False,
                               Label::Nei,  Label::True,  Label::True, Label::False, Label::Nei};
    const auto m = compute_metrics(gold, gold);
    EXPECT_EQ(m.accuracy, 1.0);
    for (const auto& s : m.per_class) EXPECT_EQ(s.f1, 1.0);
    EXPECT_EQ(m.weighted.f1, 1.0);
}

TEST(Metrics, ZeroDivisionIsZero) {
    const auto empty = compute_metrics(Confusion{});
    EXPECT_EQ(empty.accuracy, 0.0);
    EXPECT_EQ(empty.weighted.f1, 0.0);
    std::vector<Label> gold = {Label::True, Label::True};
    std::vector<Label> pred = {Label::False, Label::False};
    const auto m = compute_metrics(gold, pred);
    EXPECT_EQ(m.per_class[1].precision, 0.0);
    EXPECT_EQ(m.per_class[2].f1, 0.0);
    EXPECT_THROW(compute_metrics(gold, std::vector<Label>{Label::True}), InvalidArgument);
}

TEST(Metrics, AgreesWithTextbookReference) {
    std::mt19937_64 rng(123);
    for (int t = 0; t < 100; ++t) {
        Confusion c{};
        std::vector<std::pair<int, int>> samples;
        for (int g = 0; g < 3; ++g) {
            for (int p = 0; p < 3; ++p) {
                c[g][p] = rng() % (t % 10 == 0 ? 2 : 40);
                for (std::size_t i = 0; i < c[g][p]; ++i) samples.emplace_back(g, p);
            }
        }
        const auto got = compute_metrics(c);
        const auto want = oracle::textbook_metrics(samples);
        ASSERT_NEAR(got.accuracy, want.accuracy, 1e-9);
        for (int k = 0; k < 3; ++k) {
            ASSERT_NEAR(got.per_class[k].precision, want.precision[k], 1e-9);
            ASSERT_NEAR(got.per_class[k].recall, want.recall[k], 1e-9);
            ASSERT_NEAR(got.per_class[k].f1, want.f1[k], 1e-9);
            ASSERT_EQ(got.per_class[k].support, want.support[k]);
        }
        ASSERT_NEAR(got.weighted.precision, want.weighted_precision, 1e-9);
        ASSERT_NEAR(got.weighted.recall, want.weighted_recall, 1e-9);
        ASSERT_NEAR(got.weighted.f1, want.weighted_f1, 1e-9);
        ASSERT_NEAR(got.macro.f1, want.macro_f1, 1e-9);
        if (!samples.empty()) ASSERT_NEAR(got.weighted.recall, got.accuracy, 1e-12);
    }
}

TEST(Metrics, TableLayout) {
    const Confusion c = {{{5, 1, 0}, {2, 6, 1}, {0, 0, 5}}};
    const auto t = compute_metrics(c).table("full");
    EXPECT_NE(t.find("Acc."), std::string::npos);
    EXPECT_NE(t.find("Prec."), std::string::npos);
    EXPECT_NE(t.find("Rec."), std::string::npos);
    EXPECT_NE(t.find("80.00"), std::string::npos);
}
