#include "claimguard/eval/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace claimguard::eval {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
    return p.is_absolute() ? p : (base / p).lexically_normal();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open output file", path.string());
    out << text;
    if (!out) throw IoError("failed writing output file", path.string());
}

struct Prepared {
    PreparedData data;
    std::shared_ptr<const index::IvfIndex> index;
    ingest::IngestionReport ingestion;
};

Prepared prepare_all(const RunConfig& run, const config::Settings& settings,
                     const config::Components& components) {
    Prepared p;
    p.data = prepare(run);
    auto kb = ingest::build_knowledge_base(p.data.train, *components.embedder,
                                           ingest::IndexConfig{settings.nlist, settings.index_seed});
    p.ingestion = std::move(kb.report);
    p.index = std::make_shared<const index::IvfIndex>(std::move(kb.index));
    check_leakage(*p.index, p.data.test);
    return p;
}

EvaluationResult evaluate_prepared(const RunConfig& run, const config::Settings& settings,
                                   const config::Components& components, const Prepared& p) {
    engine::ClaimVerifier verifier(config::make_pipelines(settings, components, p.index, run.variant),
                                   settings.deadline);
    auto result = run_claims(verifier, p.data.test, settings.workers);
    result.variant = run.variant;
    result.split = run.split;
    result.train_size = p.data.train.size();
    result.quarantined = p.data.quarantined.size();
    result.ingestion = p.ingestion;
    return result;
}

} // namespace

RunConfig RunConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw config::ConfigError("run configuration must be a JSON object");
    static const std::set<std::string> known = {"variant", "corpus", "split", "output_dir", "traces", "settings"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw config::ConfigError(fmt::format("unknown run configuration key '{}'", key));
    }
    RunConfig run;
    run.base_dir = base_dir;
    try {
        run.variant = config::parse_variant(j.value("variant", std::string("full")));
        if (!j.contains("corpus")) throw config::ConfigError("run configuration needs 'corpus'");
        run.corpus = resolve(base_dir, j.at("corpus").get<std::string>());
        if (j.contains("split")) {
            const auto& s = j.at("split");
            run.split.train_fraction = s.value("train_fraction", run.split.train_fraction);
            run.split.seed = s.value("seed", run.split.seed);
        }
        run.output_dir = resolve(base_dir, j.value("output_dir", std::string("out")));
        run.traces = j.value("traces", true);
        run.settings = j.value("settings", json::object());
    } catch (const json::exception& e) {
        throw config::ConfigError(fmt::format("run configuration: {}", e.what()));
    }
    if (!(run.split.train_fraction > 0.0 && run.split.train_fraction < 1.0)) {
        throw config::ConfigError("split.train_fraction must be in (0, 1)");
    }
    return run;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open run configuration", path.string());
    auto j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw config::ConfigError(fmt::format("{} is not valid JSON", path.string()));
    return from_json(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

config::SettingsSources RunConfig::settings_sources(
    config::EnvLookup env, std::vector<std::pair<std::string, std::string>> overrides) const {
    config::SettingsSources s;
    s.document = settings;
    s.document_base_dir = base_dir;
    s.env = std::move(env);
    s.overrides = std::move(overrides);
    return s;
}

PreparedData prepare(const RunConfig& run) {
    auto parsed = ingest::parse_corpus(run.corpus);
    auto parts = ingest::split(parsed.records, run.split);
    for (const auto& q : parsed.quarantined) {
        spdlog::warn("quarantined record {} (position {}): {}", q.record_id, q.position, q.reason);
    }
    return {std::move(parts.train), std::move(parts.test), std::move(parsed.quarantined)};
}

void check_leakage(const index::IvfIndex& index, std::span<const ingest::CorpusRecord> test) {
    std::set<std::string> test_ids;
    for (const auto& r : test) test_ids.insert(r.record_id);
    for (const auto& doc : index.documents()) {
        if (test_ids.count(doc.record_id)) {
            throw LeakageDetected(fmt::format("test record {} is present in the index as {}", doc.record_id,
                                              doc.doc_id));
        }
    }
}

EvaluationResult run_claims(const engine::ClaimVerifier& verifier, std::span<const ingest::CorpusRecord> test,
                            std::size_t workers) {
    std::vector<std::size_t> order(test.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return test[a].record_id < test[b].record_id; });

    std::vector<std::optional<engine::Verification>> slots(test.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    const auto work = [&] {
        for (std::size_t i = next++; i < order.size(); i = next++) {
            const auto& rec = test[order[i]];
            try {
                Claim claim(rec.record_id, rec.claim, rec.date, rec.author);
                slots[i] = verifier.verify(claim);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const auto n = std::max<std::size_t>(1, std::min(workers, order.size()));
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    const auto& enabled = verifier.pipelines();
    EvaluationResult result;
    std::vector<Label> predicted;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& rec = test[order[i]];
        auto& v = *slots[i];
        result.claim_ids.push_back(rec.record_id);
        result.gold.push_back(parse_label(rec.label));
        predicted.push_back(v.report.label);
        for (const auto& c : v.report.contributing) {
            const bool on = (c.pipeline() == PipelineId::Rag1 && enabled.rag1) ||
                            (c.pipeline() == PipelineId::Rag2 && enabled.rag2);
            if (!on) continue;
            ++result.rag_results;
            if (c.route() == RouteTag::Tier1Direct) ++result.tier1_results;
        }
        result.verdicts.push_back(std::move(v.report));
        result.traces.push_back(std::move(v.trace));
    }
    result.metrics = compute_metrics(result.gold, predicted);
    if (std::abs(result.metrics.weighted.recall - result.metrics.accuracy) > 1e-9) {
        throw Error(fmt::format("weighted recall {} differs from accuracy {}", result.metrics.weighted.recall,
                                result.metrics.accuracy));
    }
    return result;
}

double EvaluationResult::tier1_fraction() const {
    return rag_results == 0 ? 0.0 : static_cast<double>(tier1_results) / static_cast<double>(rag_results);
}

json EvaluationResult::summary_json() const {
    return {
        {"variant", config::to_string(variant)},
        {"split", {{"train_fraction", split.train_fraction}, {"seed", split.seed}}},
        {"train_size", train_size},
        {"test_size", claim_ids.size()},
        {"quarantined", quarantined},
        {"index", {{"documents", ingestion.document_count}, {"nlist", ingestion.nlist}}},
        {"routing", {{"rag_results", rag_results}, {"tier1_results", tier1_results}}},
        {"metrics", metrics.to_json()},
    };
}

EvaluationResult evaluate(const RunConfig& run, const config::Settings& settings,
                          const config::Components& components) {
    return evaluate_prepared(run, settings, components, prepare_all(run, settings, components));
}

void write_artifacts(const EvaluationResult& result, const std::filesystem::path& dir, bool traces) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory", dir.string());

    write_text(dir / "metrics.json", result.summary_json().dump(2) + "\n");
    write_text(dir / "table.txt", result.metrics.table(config::to_string(result.variant)));
    std::string verdicts;
    for (std::size_t i = 0; i < result.verdicts.size(); ++i) {
        auto line = to_json(result.verdicts[i]);
        line["gold"] = to_string(result.gold[i]);
        verdicts += line.dump() + "\n";
    }
    write_text(dir / "verdicts.jsonl", verdicts);
    if (traces) {
        std::string lines;
        for (const auto& t : result.traces) lines += t.dump() + "\n";
        write_text(dir / "traces.jsonl", lines);
    }
}

json SweepPoint::to_json() const {
    json j = {{"high", high}, {"med", med}};
    if (skipped) {
        j["skipped"] = *skipped;
        return j;
    }
    j["accuracy"] = result->metrics.accuracy;
    j["weighted"] = {{"precision", result->metrics.weighted.precision},
                     {"recall", result->metrics.weighted.recall},
                     {"f1", result->metrics.weighted.f1}};
    j["tier1_fraction"] = result->tier1_fraction();
    return j;
}

std::vector<SweepPoint> threshold_sweep(const RunConfig& run, const config::Settings& settings,
                                        const config::Components& components, std::span<const double> highs,
                                        std::span<const double> meds) {
    auto shared = components;
    shared.llm = std::make_shared<gateway::CachingProvider>(components.llm);
    const auto prepared = prepare_all(run, settings, shared);

    std::vector<SweepPoint> points;
    for (double high : highs) {
        for (double med : meds) {
            SweepPoint point{high, med, std::nullopt, std::nullopt};
            rag::TierThresholds t{high, med};
            try {
                t.validate();
            } catch (const InvalidArgument& e) {
                spdlog::warn("skipping grid point: {}", e.what());
                point.skipped = e.what();
                points.push_back(std::move(point));
                continue;
            }
            auto s = settings;
            s.thresholds = t;
            point.result = evaluate_prepared(run, s, shared, prepared);
            points.push_back(std::move(point));
        }
    }
    return points;
}

std::string sweep_table(std::span<const SweepPoint> points) {
    std::string out = fmt::format("{:>6} {:>6} {:>7} {:>7} {:>8}\n", "high", "med", "Acc.", "F1", "Tier1");
    for (const auto& p : points) {
        if (p.skipped) {
            out += fmt::format("{:>6.2f} {:>6.2f} {:>7} {:>7} {:>8}\n", p.high, p.med, "-", "-", "skipped");
            continue;
        }
        out += fmt::format("{:>6.2f} {:>6.2f} {:>7.2f} {:>7.2f} {:>7.1f}%\n", p.high, p.med,
                           100.0 * p.result->metrics.accuracy, 100.0 * p.result->metrics.weighted.f1,
                           100.0 * p.result->tier1_fraction());
    }
    return out;
}

} // namespace claimguard::eval
