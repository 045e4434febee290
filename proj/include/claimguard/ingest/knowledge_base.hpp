#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "claimguard/embedding/embedder.hpp"
#include "claimguard/index/ivf_index.hpp"
#include "claimguard/ingest/corpus.hpp"

namespace claimguard::ingest {

struct IndexConfig {
    std::optional<std::size_t> nlist;  // default_nlist(doc count) when unset
    std::uint64_t seed = index::kDefaultTrainingSeed;
};

struct IngestionReport {
    std::size_t record_count = 0;
    std::size_t document_count = 0;
    std::size_t nlist = 0;
    std::vector<std::string> zero_evidence_records;
    std::vector<QuarantinedRecord> quarantined;

    nlohmann::json to_json() const;
};

struct KnowledgeBase {
    index::IvfIndex index;
    IngestionReport report;
};

/// One document per (record, evidence sentence); records without evidence
/// still get one claim-only document and are flagged. Every document is
/// keyed by its record's claim embedding. The returned index is frozen.
KnowledgeBase build_knowledge_base(std::span<const CorpusRecord> train,
                                   const embedding::Embedder& embedder,
                                   const IndexConfig& config = {});

/// Cross-checks every indexed document against the records it came from.
/// Returns one message per problem; empty means the audit passed.
std::vector<std::string> audit_provenance(const index::IvfIndex& index,
                                          std::span<const CorpusRecord> records);

} // namespace claimguard::ingest
