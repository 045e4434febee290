#include "claimguard/cli/cli.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "claimguard/config/system.hpp"
#include "claimguard/eval/harness.hpp"
#include "claimguard/ingest/knowledge_base.hpp"

namespace claimguard::cli {

namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

struct Common {
    std::string config_file;
    std::vector<std::string> sets;
    std::string providers;
    std::string factcheck;

    void attach(CLI::App& cmd) {
        cmd.add_option("--config", config_file, "Settings file (JSON)");
        cmd.add_option("--set", sets, "Override one setting, e.g. thresholds.high=0.7 (repeatable)");
        cmd.add_option("--providers", providers, "Completion provider: mock:<script>, http or none");
        cmd.add_option("--factcheck", factcheck, "Fact-check source: mock:<fixtures>, http or none");
    }

    Overrides overrides() const {
        Overrides out;
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw config::ConfigError(fmt::format("--set expects key=value (got '{}')", s));
            }
            out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
        }
        if (!providers.empty()) out.emplace_back("providers.llm", providers);
        if (!factcheck.empty()) out.emplace_back("providers.factcheck", factcheck);
        return out;
    }

    config::SettingsSources sources() const {
        config::SettingsSources s;
        if (!config_file.empty()) s.file = config_file;
        s.env = config::process_env();
        s.overrides = overrides();
        return s;
    }
};

std::vector<double> parse_grid(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw config::ConfigError(fmt::format("{} expects comma-separated numbers (got '{}')", flag, text));
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string pretty(const VerdictReport& r) {
    std::string out;
    out += fmt::format("Claim:      {}\n", r.claim_id);
    out += fmt::format("Verdict:    {} (confidence {:.4f}, {})\n", to_string(r.label), r.confidence,
                       to_string(r.decision_rule));
    out += fmt::format("Evidence:   {}\n", r.evidence);
    out += fmt::format("Source:     {} {}\n", to_string(r.source.kind), r.source.reference);
    out += "Pipelines:\n";
    for (const auto& c : r.contributing) {
        out += fmt::format("  {:<10} {:<18} {:<6} {:.4f}  {}\n", to_string(c.pipeline()), to_string(c.route()),
                           to_string(c.label()), c.confidence(), c.evidence());
    }
    return out;
}

int cmd_ingest(const std::string& corpus, const std::string& index_path, const Common& common,
               std::ostream& out) {
    const auto settings = config::load_settings(common.sources());
    const auto embedder = config::build_embedder(settings, config::process_env());
    const auto parsed = ingest::parse_corpus(corpus);
    auto kb = ingest::build_knowledge_base(parsed.records, *embedder,
                                           ingest::IndexConfig{settings.nlist, settings.index_seed});
    kb.report.quarantined = parsed.quarantined;
    kb.index.save(index_path);
    auto report = kb.report.to_json();
    report["index"] = index_path;
    out << report.dump(2) << "\n";
    return kOk;
}

int cmd_verify(const std::string& text, const std::string& claim_id, const std::string& index_path,
               bool no_index, bool as_pretty, const std::string& trace_path, const Common& common,
               std::ostream& out) {
    if (index_path.empty() && !no_index) throw config::ConfigError("verify needs --index <path> or --no-index");
    const auto env = config::process_env();
    const auto settings = config::load_settings(common.sources());
    if (config::all_providers_unconfigured(settings, env)) {
        throw config::NoProvidersConfigured(
            "no completion provider or fact-check source is configured; set providers.llm / providers.factcheck "
            "or pass --providers mock:<script>");
    }
    const auto components = config::build_components(settings, env);
    std::shared_ptr<const index::IvfIndex> idx;
    if (!no_index) idx = std::make_shared<const index::IvfIndex>(index::IvfIndex::load(index_path));

    engine::ClaimVerifier verifier(config::make_pipelines(settings, components, idx, config::Variant::Full),
                                   settings.deadline);
    const auto result = verifier.verify(Claim(claim_id, text));
    if (!trace_path.empty()) {
        std::ofstream t(trace_path, std::ios::app);
        if (!t) throw IoError("cannot open trace file", trace_path);
        t << result.trace.dump() << "\n";
    }
    out << serialize(result.report) << "\n";
    if (as_pretty) out << "\n" << pretty(result.report);
    return kOk;
}

eval::RunConfig load_run(const std::string& path, const std::string& variant, const std::string& output) {
    auto run = eval::RunConfig::from_file(path);
    if (!variant.empty()) run.variant = config::parse_variant(variant);
    if (!output.empty()) run.output_dir = output;
    return run;
}

int cmd_evaluate(const std::string& run_path, const std::string& variant, const std::string& output,
                 const Common& common, std::ostream& out) {
    const auto run = load_run(run_path, variant, output);
    auto sources = run.settings_sources(config::process_env(), common.overrides());
    if (!common.config_file.empty()) sources.file = common.config_file;
    const auto settings = config::load_settings(sources);
    const auto components = config::build_components(settings, config::process_env());
    const auto result = eval::evaluate(run, settings, components);
    eval::write_artifacts(result, run.output_dir, run.traces);
    out << result.metrics.table(config::to_string(result.variant));
    out << fmt::format("\nartifacts: {}\n", run.output_dir.string());
    return kOk;
}

int cmd_sweep(const std::string& run_path, const std::string& highs, const std::string& meds,
              const std::string& output, const Common& common, std::ostream& out) {
    const auto run = load_run(run_path, "", output);
    auto sources = run.settings_sources(config::process_env(), common.overrides());
    if (!common.config_file.empty()) sources.file = common.config_file;
    const auto settings = config::load_settings(sources);
    const auto components = config::build_components(settings, config::process_env());
    const auto high_grid = parse_grid(highs, "--high");
    const auto med_grid = parse_grid(meds, "--med");
    const auto points = eval::threshold_sweep(run, settings, components, high_grid, med_grid);

    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : points) j.push_back(p.to_json());
    std::error_code ec;
    std::filesystem::create_directories(run.output_dir, ec);
    if (ec) throw IoError("cannot create output directory", run.output_dir.string());
    const auto table = eval::sweep_table(points);
    for (const auto& [name, text] : {std::pair{"sweep.json", j.dump(2) + "\n"}, std::pair{"sweep.txt", table}}) {
        const auto path = run.output_dir / name;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f || !(f << text)) throw IoError("cannot write", path.string());
    }
    out << table;
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"claimguard: claim verification with retrieval, model reasoning and external fact-checks"};
    app.require_subcommand(1);
    std::string log_level = "warn";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

    Common common;

    auto* ingest_cmd = app.add_subcommand("ingest", "Build and save a vector index from a corpus");
    std::string corpus, index_out;
    ingest_cmd->add_option("corpus", corpus, "Corpus JSON file")->required();
    ingest_cmd->add_option("index", index_out, "Index file to write")->required();
    common.attach(*ingest_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "Verify one claim and print the verdict JSON");
    std::string claim_text, claim_id = "claim", index_in, trace_path;
    bool no_index = false, as_pretty = false;
    verify_cmd->add_option("claim", claim_text, "Claim text")->required();
    verify_cmd->add_option("--id", claim_id, "Claim id used in the report");
    verify_cmd->add_option("--index", index_in, "Index file from `ingest`");
    verify_cmd->add_flag("--no-index", no_index, "Run without retrieval");
    verify_cmd->add_flag("--pretty", as_pretty, "Also print a human-readable block");
    verify_cmd->add_option("--trace", trace_path, "Append the per-claim trace to this JSONL file");
    common.attach(*verify_cmd);

    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a variant over the test split");
    std::string run_path, variant, output;
    eval_cmd->add_option("run_config", run_path, "Run configuration JSON")->required();
    eval_cmd->add_option("--variant", variant, "Override the run's variant");
    eval_cmd->add_option("--output", output, "Override the run's output directory");
    common.attach(*eval_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate over a grid of routing thresholds");
    std::string highs = "0.6", meds = "0.4";
    sweep_cmd->add_option("run_config", run_path, "Run configuration JSON")->required();
    sweep_cmd->add_option("--high", highs, "Comma-separated high thresholds");
    sweep_cmd->add_option("--med", meds, "Comma-separated medium thresholds");
    sweep_cmd->add_option("--output", output, "Override the run's output directory");
    common.attach(*sweep_cmd);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalidInput;
    }

    spdlog::set_level(spdlog::level::from_str(log_level));

    try {
        if (*ingest_cmd) return cmd_ingest(corpus, index_out, common, out);
        if (*verify_cmd) {
            return cmd_verify(claim_text, claim_id, index_in, no_index, as_pretty, trace_path, common, out);
        }
        if (*eval_cmd) return cmd_evaluate(run_path, variant, output, common, out);
        if (*sweep_cmd) return cmd_sweep(run_path, highs, meds, output, common, out);
    } catch (const config::NoProvidersConfigured& e) {
        err << "error: " << e.what() << "\n";
        return kNoProviders;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const index::CorruptIndexFile& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const ingest::MalformedFile& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const ingest::TooFewRecords& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const config::ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

} // namespace claimguard::cli
