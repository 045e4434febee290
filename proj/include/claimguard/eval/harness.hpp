#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "claimguard/config/system.hpp"
#include "claimguard/eval/metrics.hpp"
#include "claimguard/ingest/knowledge_base.hpp"

namespace claimguard::eval {

/// A test record id was found in the index.
class LeakageDetected : public Error {
public:
    using Error::Error;
};

/// Run description, usually read from JSON:
///
///   {"variant": "full", "corpus": "corpus.json",
///    "split": {"train_fraction": 0.85, "seed": 42},
///    "output_dir": "out", "traces": true,
///    "settings": {... same keys as a settings file ...}}
///
/// Relative paths resolve against the run file's directory.
struct RunConfig {
    config::Variant variant = config::Variant::Full;
    std::filesystem::path corpus;
    ingest::SplitSpec split;
    std::filesystem::path output_dir = "out";
    bool traces = true;
    nlohmann::json settings = nlohmann::json::object();
    std::filesystem::path base_dir = ".";

    /// Throws ConfigError on unknown keys or an unknown variant.
    static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
    static RunConfig from_file(const std::filesystem::path& path);

    /// Settings document for load_settings: run file settings as the
    /// document layer, with `env` and `overrides` on top.
    config::SettingsSources settings_sources(config::EnvLookup env,
                                             std::vector<std::pair<std::string, std::string>> overrides = {}) const;
};

struct PreparedData {
    std::vector<ingest::CorpusRecord> train;
    std::vector<ingest::CorpusRecord> test;
    std::vector<ingest::QuarantinedRecord> quarantined;
};

/// Parse and split the corpus. Quarantined records take part in neither side.
PreparedData prepare(const RunConfig& run);

/// Throws LeakageDetected if any test record id has a document in `index`.
void check_leakage(const index::IvfIndex& index, std::span<const ingest::CorpusRecord> test);

struct EvaluationResult {
    config::Variant variant = config::Variant::Full;
    ingest::SplitSpec split;
    std::size_t train_size = 0;
    std::size_t quarantined = 0;
    ingest::IngestionReport ingestion;
    std::vector<std::string> claim_ids;  // sorted
    std::vector<Label> gold;
    std::vector<VerdictReport> verdicts;
    std::vector<nlohmann::json> traces;
    MetricsReport metrics;
    std::size_t rag_results = 0;    // results from enabled RAG pipelines
    std::size_t tier1_results = 0;  // of which took the direct route

    double tier1_fraction() const;
    /// Byte-stable summary (no timings).
    nlohmann::json summary_json() const;
};

/// Verify every test claim with `workers` claims in flight, then fold the
/// verdicts in claim id order.
EvaluationResult run_claims(const engine::ClaimVerifier& verifier, std::span<const ingest::CorpusRecord> test,
                            std::size_t workers);

/// Everything after configuration: build the knowledge base from the train
/// split, check leakage, verify the test split.
EvaluationResult evaluate(const RunConfig& run, const config::Settings& settings,
                          const config::Components& components);

/// Writes metrics.json, table.txt, verdicts.jsonl and (when enabled)
/// traces.jsonl into `dir`.
void write_artifacts(const EvaluationResult& result, const std::filesystem::path& dir, bool traces);

struct SweepPoint {
    double high = 0.0;
    double med = 0.0;
    std::optional<std::string> skipped;  // reason, when the pair is invalid
    std::optional<EvaluationResult> result;

    nlohmann::json to_json() const;
};

/// Evaluates `run` once per (high, med) pair. The knowledge base is built
/// once and model completions are shared across points, so every point
/// sees the same responses. Invalid pairs are skipped with a warning.
std::vector<SweepPoint> threshold_sweep(const RunConfig& run, const config::Settings& settings,
                                        const config::Components& components, std::span<const double> highs,
                                        std::span<const double> meds);

std::string sweep_table(std::span<const SweepPoint> points);

} // namespace claimguard::eval
