// Acceptance checks: one PASS/FAIL line per criterion. Exit status is 0 only
// when every offline criterion passes.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "../oracles/integration_reference.hpp"
#include "../oracles/knn_reference.hpp"
#include "../oracles/metrics_reference.hpp"
#include "../support/support.hpp"
#include "claimguard/eval/harness.hpp"
#include "claimguard/verdict/verdict.hpp"

using namespace claimguard;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

/// Replies with a fixed assessment and counts calls per model.
class CountingProvider final : public gateway::CompletionProvider {
public:
    double confidence = 0.5;
    std::map<gateway::ModelId, int> calls;

    std::string complete(const gateway::ModelProfile& profile, const std::string&) override {
        ++calls[profile.id];
        return test::fenced(
            {{"label", "false"}, {"evidence", "model view"}, {"confidence", confidence}, {"used_context", true}});
    }
};

Label random_label(std::mt19937_64& rng) { return static_cast<Label>(rng() % 3); }

PipelineResult random_result(std::mt19937_64& rng, PipelineId id, bool allow_external, bool zero) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // Coarse grid makes confidence ties common.
    double c = zero ? 0.0 : (rng() % 3 == 0 ? std::round(u(rng) * 4) / 4 : u(rng));
    const auto label = zero ? random_label(rng) : random_label(rng);
    const std::string evidence = fmt::format("evidence {}", rng() % 1000);
    if (id == PipelineId::FactCheck) {
        if (allow_external && rng() % 4 == 0) {
            return {id, RouteTag::ExternalMatch, label, evidence,
                    SourceAttribution::external_factcheck(fmt::format("https://fc.example/{}", rng() % 100)), 1.0};
        }
        return {id, RouteTag::LlmFallback, label, evidence, SourceAttribution::parametric(), c};
    }
    if (rng() % 2) {
        return {id, RouteTag::Tier1Direct, label, evidence,
                SourceAttribution::retrieved(fmt::format("https://kb.example/{}", rng() % 100)), c};
    }
    return {id, RouteTag::Tier3RoleBased, label, evidence, SourceAttribution::parametric(), c};
}

Outcome criterion1() {
    const auto start = Clock::now();
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 10000; ++i) {
        const bool zero = i % 10 == 0;
        const auto r1 = random_result(rng, PipelineId::Rag1, false, zero);
        const auto r2 = random_result(rng, PipelineId::Rag2, false, zero);
        const auto r3 = random_result(rng, PipelineId::FactCheck, !zero, zero);
        const auto n1 = verdict::normalize(r1), n2 = verdict::normalize(r2), n3 = verdict::normalize(r3);
        const auto got = verdict::integrate("c", n1, n2, n3);
        const auto want = oracle::reference_integrate(n1, n2, n3);
        if (got.label != want.label || got.evidence != want.evidence || got.source.kind != want.source_kind ||
            got.source.reference != want.source_reference || got.confidence != want.confidence ||
            to_string(got.decision_rule) != want.rule) {
            return {false, fmt::format("triple {} disagrees with the reference ({} vs {})", i,
                                       to_string(got.decision_rule), want.rule)};
        }
    }
    const double t = seconds_since(start);
    return {t < 5.0, fmt::format("10000 triples match the reference in {:.2f} s", t)};
}

Outcome criterion2() {
    auto provider = std::make_shared<CountingProvider>();
    auto idx = std::make_shared<index::IvfIndex>(index::IvfIndex::flat(8));
    idx->freeze();
    auto embedder = std::make_shared<embedding::HashingEmbedder>(8);
    rag::RagConfig cfg;
    cfg.profile = gateway::ModelProfile::defaults(gateway::ModelId::RagModel1);
    const rag::RagPipeline pipe(PipelineId::Rag1, idx, embedder, provider, cfg);
    const Claim claim("c", "claim");

    struct Row {
        double s;
        RouteTag route;
        int calls;
    };
    const Row table[] = {{-1.0, RouteTag::Tier3RoleBased, 1}, {0.0, RouteTag::Tier3RoleBased, 1},
                         {0.39, RouteTag::Tier3RoleBased, 1}, {0.40, RouteTag::Tier2Hybrid, 1},
                         {0.59, RouteTag::Tier2Hybrid, 1},    {0.60, RouteTag::Tier1Direct, 0},
                         {0.61, RouteTag::Tier1Direct, 0},    {1.0, RouteTag::Tier1Direct, 0}};
    for (const auto& row : table) {
        provider->calls.clear();
        const std::vector<index::SearchHit> hits = {{test::make_doc("d1", Label::True), row.s}};
        const auto r = pipe.resolve(claim, hits);
        if (r.route() != row.route || provider->calls[gateway::ModelId::RagModel1] != row.calls) {
            return {false, fmt::format("s_max {} routed to {} with {} calls", row.s, to_string(r.route()),
                                       provider->calls[gateway::ModelId::RagModel1])};
        }
        if (row.route == RouteTag::Tier1Direct &&
            (r.label() != Label::True || r.source().kind != SourceKind::Retrieved || r.confidence() != row.s)) {
            return {false, "Tier 1 did not return the stored record"};
        }
        if (row.route == RouteTag::Tier3RoleBased && r.source().kind != SourceKind::Parametric) {
            return {false, "Tier 3 is not attributed to parametric knowledge"};
        }
    }
    provider->calls.clear();
    const auto empty = pipe.verify(claim);
    if (empty.route() != RouteTag::Tier3RoleBased || provider->calls[gateway::ModelId::RagModel1] != 1) {
        return {false, "empty retrieval did not take the role-based route"};
    }
    return {true, "boundary table and empty retrieval route as expected with matching model call counts"};
}

Outcome criterion3() {
    auto provider = std::make_shared<CountingProvider>();
    auto idx = std::make_shared<index::IvfIndex>(index::IvfIndex::flat(8));
    idx->freeze();
    rag::RagConfig cfg;
    cfg.profile = gateway::ModelProfile::defaults(gateway::ModelId::RagModel2);
    const rag::RagPipeline pipe(PipelineId::Rag2, idx, std::make_shared<embedding::HashingEmbedder>(8), provider,
                                cfg);
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> s_dist(0.4, 0.6), c_dist(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double s = s_dist(rng);
        provider->confidence = c_dist(rng);
        const std::vector<index::SearchHit> hits = {{test::make_doc("d"), s}};
        const auto r = pipe.resolve(Claim("c", "claim"), hits);
        if (r.route() != RouteTag::Tier2Hybrid) return {false, fmt::format("s={} did not route to Tier 2", s)};
        worst = std::max(worst, std::abs(r.confidence() - (s + provider->confidence) / 2.0));
    }
    return {worst <= 1e-9, fmt::format("1000 Tier-2 results, max |conf - (s+c)/2| = {:.3g}", worst)};
}

std::vector<embedding::EmbeddingVector> clustered(std::mt19937_64& rng, std::size_t n, std::size_t d,
                                                  const std::vector<embedding::EmbeddingVector>& centers) {
    std::normal_distribution<float> g(0.0f, 0.08f);
    std::vector<embedding::EmbeddingVector> out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = centers[rng() % centers.size()];
        std::vector<float> v(c.values().begin(), c.values().end());
        for (auto& x : v) x += g(rng);
        out.push_back(embedding::EmbeddingVector::normalize(std::move(v)));
    }
    return out;
}

double recall_at_10(const std::vector<embedding::EmbeddingVector>& data,
                    const std::vector<embedding::EmbeddingVector>& queries, std::size_t nlist, std::size_t nprobe,
                    bool* exact) {
    index::IvfIndex idx(data.front().dimension());
    idx.train(data, nlist, 7);
    std::vector<std::pair<std::string, std::vector<float>>> raw;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto id = fmt::format("v{:04}", i);
        idx.add(test::make_doc(id), data[i]);
        raw.emplace_back(id, std::vector<float>(data[i].values().begin(), data[i].values().end()));
    }
    idx.freeze();
    std::size_t found = 0;
    if (exact) *exact = true;
    for (const auto& q : queries) {
        const auto truth = oracle::linear_scan(raw, std::vector<float>(q.values().begin(), q.values().end()), 10);
        const auto hits = idx.search(q, 10, nprobe);
        std::set<std::string> got;
        for (const auto& h : hits) got.insert(h.document.doc_id);
        for (std::size_t i = 0; i < truth.size(); ++i) {
            found += got.count(truth[i].id);
            if (exact && (i >= hits.size() || std::abs(hits[i].score - truth[i].score) > 1e-5)) *exact = false;
        }
    }
    return double(found) / (10.0 * queries.size());
}

Outcome criterion4() {
    const auto start = Clock::now();
    constexpr std::size_t d = 384;
    std::mt19937_64 rng(404);
    std::vector<embedding::EmbeddingVector> centers;
    for (int i = 0; i < 40; ++i) centers.push_back(test::random_unit(rng, d));
    const auto data = clustered(rng, 1000, d, centers);
    const auto queries = clustered(rng, 100, d, centers);
    bool exact = false;
    recall_at_10(data, queries, 32, 32, &exact);
    const double recall = recall_at_10(data, queries, 32, 8, nullptr);

    std::vector<embedding::EmbeddingVector> uniform, uq;
    for (int i = 0; i < 1000; ++i) uniform.push_back(test::random_unit(rng, d));
    for (int i = 0; i < 100; ++i) uq.push_back(test::random_unit(rng, d));
    const double uniform_recall = recall_at_10(uniform, uq, 32, 8, nullptr);
    const double t = seconds_since(start);
    return {exact && recall >= 0.9 && t < 10.0,
            fmt::format("nprobe=nlist exact: {}; clustered recall@10 (nlist 32, nprobe 8) = {:.3f}; "
                        "uniform-data recall@10 = {:.3f} (informational); {:.2f} s",
                        exact ? "yes" : "no", recall, uniform_recall, t)};
}

Outcome criterion5() {
    std::mt19937_64 rng(55);
    factcheck::MockFactCheckServer server(factcheck::FixtureSet{});
    factcheck::ClaimSearchConfig cfg;
    cfg.endpoint = server.endpoint();
    cfg.api_key = "fuzz-key";
    cfg.cache_ttl = std::chrono::seconds(0);
    cfg.requests_per_second = 1e6;
    cfg.burst = 1e6;
    cfg.timeout = std::chrono::milliseconds(5000);
    auto client = std::make_shared<factcheck::ClaimSearchClient>(cfg);
    auto llm = std::make_shared<CountingProvider>();
    const factcheck::FactCheckPipeline pipe(client, llm, factcheck::FactCheckConfig{});
    const auto ratings = factcheck::RatingMap::defaults();
    const std::vector<std::string> rating_pool = {"True", "False", "Pants on Fire!", "Mostly True", "Misleading",
                                                  "", "???", "half-true"};

    int matched = 0, degraded = 0;
    for (int i = 0; i < 200; ++i) {
        const std::string query = fmt::format("fuzz claim {}", i);
        factcheck::FixtureSet::Response resp;
        const int kind = static_cast<int>(rng() % 8);
        std::string rating;
        const int statuses[] = {404, 429, 500, 503};
        switch (kind) {
        case 0:
        case 1:
            rating = rating_pool[rng() % rating_pool.size()];
            resp.body = nlohmann::json{{"claims",
                                        {{{"text", query},
                                          {"claimReview",
                                           {{{"textualRating", rating},
                                             {"publisher", {{"name", "Desk"}}},
                                             {"url", fmt::format("https://fc.example/{}", i)}}}}}}}}
                            .dump();
            break;
        case 2: resp.status = statuses[rng() % 4]; break;
        case 3: resp.body = "{\"claims\": [{\"text\": "; break;
        case 4: resp.body = nlohmann::json{{"claims", "not a list"}}.dump(); break;
        case 5: resp.body = nlohmann::json{{"claims", {{{"text", "x"}}}}}.dump(); break;
        case 6: {
            std::string junk(rng() % 64, ' ');
            for (auto& c : junk) c = static_cast<char>(rng() % 256);
            resp.body = junk;
            break;
        }
        default: resp.body = "{}"; break;
        }
        factcheck::FixtureSet fx;
        fx.by_query[query] = resp;
        server.set_fixtures(fx);

        PipelineResult r = PipelineResult::placeholder(PipelineId::FactCheck, RouteTag::LlmFallback, "unset");
        try {
            r = pipe.verify(Claim(fmt::format("f{}", i), query));
        } catch (const std::exception& e) {
            return {false, fmt::format("case {} (kind {}) threw: {}", i, kind, e.what())};
        }
        if (kind <= 1) {
            if (r.route() != RouteTag::ExternalMatch || r.label() != ratings.map(rating) || r.confidence() != 1.0 ||
                r.source().reference != fmt::format("https://fc.example/{}", i)) {
                return {false, fmt::format("case {}: well-formed review was not used", i)};
            }
            ++matched;
        } else {
            if (r.route() != RouteTag::LlmFallback || r.source().kind != SourceKind::Parametric) {
                return {false, fmt::format("case {} (kind {}): degraded lookup did not fall back", i, kind)};
            }
            ++degraded;
        }
    }
    if (server.last_key() != "fuzz-key") return {false, "API key was not sent"};
    return {true, fmt::format("200 fuzzed responses: {} matches mapped, {} degraded lookups fell back, no throws",
                              matched, degraded)};
}

Outcome criterion6() {
    std::mt19937_64 rng(66);
    const std::string expected =
        R"({"claim_id":"z","confidence":0.0,"decision_rule":"nei_default","evidence":"Insufficient information",)"
        R"("label":"nei","source":{"kind":"none","reference":"No evidence"}})";
    for (int i = 0; i < 1000; ++i) {
        const auto r1 = random_result(rng, PipelineId::Rag1, false, true);
        const auto r2 = random_result(rng, PipelineId::Rag2, false, true);
        const auto r3 = random_result(rng, PipelineId::FactCheck, false, true);
        auto j = to_json(verdict::integrate("z", verdict::normalize(r1), verdict::normalize(r2),
                                            verdict::normalize(r3)));
        j.erase("contributing");
        if (j.dump() != expected) return {false, fmt::format("sample {}: {}", i, j.dump())};
    }
    return {true, "1000 all-zero samples serialize to the fixed NEI verdict byte for byte"};
}

Outcome criterion7() {
    const eval::Confusion hand = {{{5, 1, 0}, {2, 6, 1}, {0, 0, 5}}};
    const auto m = eval::compute_metrics(hand);
    const bool hand_ok = std::abs(m.accuracy - 0.8) < 1e-12 && std::abs(m.per_class[0].f1 - 10.0 / 13) < 1e-12 &&
                         std::abs(m.per_class[1].f1 - 0.75) < 1e-12 &&
                         std::abs(m.per_class[2].f1 - 10.0 / 11) < 1e-12;
    if (!hand_ok) return {false, "hand-computed confusion matrix disagrees"};
    std::mt19937_64 rng(77);
    for (int t = 0; t < 500; ++t) {
        eval::Confusion c{};
        std::vector<std::pair<int, int>> samples;
        for (int g = 0; g < 3; ++g) {
            for (int p = 0; p < 3; ++p) {
                c[g][p] = rng() % 25;
                for (std::size_t i = 0; i < c[g][p]; ++i) samples.emplace_back(g, p);
            }
        }
        const auto got = eval::compute_metrics(c);
        const auto want = oracle::textbook_metrics(samples);
        bool ok = std::abs(got.accuracy - want.accuracy) < 1e-9 &&
                  std::abs(got.weighted.f1 - want.weighted_f1) < 1e-9 &&
                  std::abs(got.weighted.precision - want.weighted_precision) < 1e-9;
        for (int k = 0; k < 3; ++k) ok = ok && std::abs(got.per_class[k].f1 - want.f1[k]) < 1e-9;
        if (!samples.empty()) ok = ok && std::abs(got.weighted.recall - got.accuracy) < 1e-12;
        if (!ok) return {false, fmt::format("random matrix {} disagrees with the textbook computation", t)};
    }
    return {true, "hand example and 500 random matrices match; weighted recall equals accuracy"};
}

config::EnvLookup no_env() {
    return [](const std::string&) -> std::optional<std::string> { return std::nullopt; };
}

eval::EvaluationResult evaluate_synthetic() {
    const auto run = eval::RunConfig::from_file(test::synthetic_dir() / "run_config.json");
    const auto settings = config::load_settings(run.settings_sources(no_env()));
    return eval::evaluate(run, settings, config::build_components(settings, no_env()));
}

Outcome criterion8() {
    const auto start = Clock::now();
    const auto a = evaluate_synthetic().summary_json().dump(2) + "\n";
    const auto b = evaluate_synthetic().summary_json().dump(2) + "\n";
    const auto golden = test::read_file(test::source_dir() / "tests" / "golden" / "metrics_full.json");
    const double t = seconds_since(start);
    if (a != b) return {false, "two runs produced different metrics"};
    if (a != golden) return {false, "metrics differ from tests/golden/metrics_full.json"};
    return {t < 30.0, fmt::format("two runs byte-identical to the golden metrics in {:.2f} s", t)};
}

Outcome criterion9() {
    const auto run = eval::RunConfig::from_file(test::synthetic_dir() / "run_config.json");
    const auto data = eval::prepare(run);
    const auto again = eval::prepare(run);
    const std::size_t n = data.train.size() + data.test.size();
    if (data.train.size() != ingest::train_size(n, run.split.train_fraction)) return {false, "train size is off"};
    std::set<std::string> train_ids;
    for (const auto& r : data.train) train_ids.insert(r.record_id);
    for (const auto& r : data.test) {
        if (train_ids.count(r.record_id)) return {false, "record " + r.record_id + " is on both sides"};
    }
    for (std::size_t i = 0; i < data.test.size(); ++i) {
        if (again.test[i].record_id != data.test[i].record_id) return {false, "split is not reproducible"};
    }
    const auto kb = ingest::build_knowledge_base(data.train, embedding::HashingEmbedder());
    try {
        eval::check_leakage(kb.index, data.test);
    } catch (const eval::LeakageDetected& e) {
        return {false, e.what()};
    }
    std::vector<ingest::CorpusRecord> leaked(data.train.begin(), data.train.end());
    leaked.push_back(data.test.front());
    const auto bad = ingest::build_knowledge_base(leaked, embedding::HashingEmbedder());
    try {
        eval::check_leakage(bad.index, data.test);
        return {false, "planted leak was not detected"};
    } catch (const eval::LeakageDetected&) {
    }
    return {true, fmt::format("{} train / {} test, disjoint and reproducible; planted leak detected",
                              data.train.size(), data.test.size())};
}

} // namespace

int main() {
    spdlog::set_level(spdlog::level::off);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"verdict integration agrees with an independent reference", criterion1},
        {"similarity routing boundaries and empty retrieval", criterion2},
        {"Tier-2 confidence is the mean of similarity and model confidence", criterion3},
        {"IVF search exactness and recall", criterion4},
        {"fact-check lookups survive malformed and failing responses", criterion5},
        {"all-zero confidences yield the default NEI verdict", criterion6},
        {"evaluation metrics", criterion7},
        {"deterministic evaluation matches golden metrics", criterion8},
        {"train/test split and leakage guard", criterion9},
    };
    int failures = 0;
    int number = 1;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        failures += !o.pass;
        fmt::print("{} criterion {}: {} ({})\n", o.pass ? "PASS" : "FAIL", number++, name, o.detail);
        std::fflush(stdout);
    }
    fmt::print("NOT RUN criterion 10: live providers (needs network access and API credentials)\n");
    return failures == 0 ? 0 : 1;
}
