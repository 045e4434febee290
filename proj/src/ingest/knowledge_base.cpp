#include "claimguard/ingest/knowledge_base.hpp"

#include <algorithm>
#include <unordered_map>

#include <fmt/format.h>

#include "claimguard/util/text.hpp"

namespace claimguard::ingest {

namespace {

std::vector<std::string> usable_sentences(const CorpusRecord& record) {
    std::vector<std::string> out;
    for (const auto& s : record.evidence) {
        if (!util::trim(s).empty()) out.emplace_back(util::trim(s));
    }
    return out;
}

std::string origin_of(const CorpusRecord& record) {
    for (const auto& s : record.sources) {
        if (!util::trim(s).empty()) return std::string(util::trim(s));
    }
    return "corpus:" + record.record_id;
}

} // namespace

nlohmann::json IngestionReport::to_json() const {
    nlohmann::json q = nlohmann::json::array();
    for (const auto& r : quarantined) q.push_back(ingest::to_json(r));
    return {
        {"record_count", record_count},
        {"document_count", document_count},
        {"nlist", nlist},
        {"zero_evidence_records", zero_evidence_records},
        {"quarantined", std::move(q)},
    };
}

KnowledgeBase build_knowledge_base(std::span<const CorpusRecord> train,
                                   const embedding::Embedder& embedder, const IndexConfig& config) {
    if (train.empty()) throw InvalidArgument("training set is empty");

    std::vector<std::string> claims;
    claims.reserve(train.size());
    for (const auto& r : train) claims.push_back(r.claim);
    std::vector<embedding::EmbeddingVector> claim_vectors;
    try {
        claim_vectors = embedder.embed_batch(claims);
    } catch (const embedding::BatchError& e) {
        throw Error(fmt::format("record {}: {}", train[e.index()].record_id, e.what()));
    }

    IngestionReport report;
    report.record_count = train.size();
    std::vector<index::EvidenceDocument> docs;
    std::vector<std::size_t> doc_record;  // doc -> position in train
    for (std::size_t i = 0; i < train.size(); ++i) {
        const auto& record = train[i];
        const Label label = parse_label(util::trim(record.label));
        auto sentences = usable_sentences(record);
        if (sentences.empty()) {
            report.zero_evidence_records.push_back(record.record_id);
            sentences.emplace_back();
        }
        const std::string origin = origin_of(record);
        std::vector<std::string> extra;
        for (const auto& s : record.sources) {
            if (!util::trim(s).empty() && util::trim(s) != origin) extra.emplace_back(util::trim(s));
        }
        for (std::size_t s = 0; s < sentences.size(); ++s) {
            index::EvidenceDocument doc;
            doc.doc_id = fmt::format("{}#{}", record.record_id, s);
            doc.record_id = record.record_id;
            doc.claim_text = record.claim;
            doc.evidence_text = std::move(sentences[s]);
            doc.label = label;
            doc.origin = origin;
            doc.issuer = record.author;
            doc.date = record.date;
            doc.extra_sources = extra;
            docs.push_back(std::move(doc));
            doc_record.push_back(i);
        }
    }

    std::vector<embedding::EmbeddingVector> doc_vectors;
    doc_vectors.reserve(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) doc_vectors.push_back(claim_vectors[doc_record[d]]);

    const std::size_t nlist =
        std::min(config.nlist.value_or(index::default_nlist(docs.size())), docs.size());
    index::IvfIndex idx(embedder.dimension());
    idx.train(doc_vectors, nlist, config.seed);
    for (std::size_t d = 0; d < docs.size(); ++d) {
        try {
            idx.add(std::move(docs[d]), doc_vectors[d]);
        } catch (const Error& e) {
            throw Error(fmt::format("record {}: {}", train[doc_record[d]].record_id, e.what()));
        }
    }
    idx.freeze();
    report.document_count = idx.size();
    report.nlist = idx.nlist();
    return {std::move(idx), std::move(report)};
}

std::vector<std::string> audit_provenance(const index::IvfIndex& index,
                                          std::span<const CorpusRecord> records) {
    std::unordered_map<std::string, const CorpusRecord*> by_id;
    for (const auto& r : records) by_id.emplace(r.record_id, &r);

    std::vector<std::string> problems;
    for (const auto& doc : index.documents()) {
        const auto it = by_id.find(doc.record_id);
        if (it == by_id.end()) {
            problems.push_back(fmt::format("{}: unknown record {}", doc.doc_id, doc.record_id));
            continue;
        }
        const auto& record = *it->second;
        if (doc.claim_text != record.claim) problems.push_back(doc.doc_id + ": claim text differs from record");
        if (doc.origin != origin_of(record)) problems.push_back(doc.doc_id + ": origin differs from record");
        if (doc.label != parse_label(util::trim(record.label))) problems.push_back(doc.doc_id + ": label differs");
        if (!index.list_of(doc.doc_id)) problems.push_back(doc.doc_id + ": not in any inverted list");
    }
    return problems;
}

} // namespace claimguard::ingest
