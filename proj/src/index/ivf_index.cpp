#include "claimguard/index/ivf_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace claimguard::index {

namespace {

using embedding::dot;

constexpr double kUnitTolerance = 1e-5;

nlohmann::json optional_string(const std::optional<std::string>& s) {
    return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

std::optional<std::string> read_optional(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

} // namespace

nlohmann::json to_json(const EvidenceDocument& doc) {
    return {
        {"doc_id", doc.doc_id},
        {"record_id", doc.record_id},
        {"claim_text", doc.claim_text},
        {"evidence_text", doc.evidence_text},
        {"label", to_string(doc.label)},
        {"origin", doc.origin},
        {"issuer", optional_string(doc.issuer)},
        {"date", optional_string(doc.date)},
        {"extra_sources", doc.extra_sources},
    };
}

EvidenceDocument document_from_json(const nlohmann::json& j) {
    EvidenceDocument doc;
    doc.doc_id = j.at("doc_id").get<std::string>();
    doc.record_id = j.at("record_id").get<std::string>();
    doc.claim_text = j.at("claim_text").get<std::string>();
    doc.evidence_text = j.at("evidence_text").get<std::string>();
    doc.label = parse_label(j.at("label").get<std::string>());
    doc.origin = j.at("origin").get<std::string>();
    doc.issuer = read_optional(j, "issuer");
    doc.date = read_optional(j, "date");
    if (j.contains("extra_sources")) {
        doc.extra_sources = j.at("extra_sources").get<std::vector<std::string>>();
    }
    return doc;
}

IvfIndex::IvfIndex(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) throw InvalidArgument("index dimension must be positive");
}

IvfIndex IvfIndex::flat(std::size_t dimension) {
    IvfIndex index(dimension);
    std::vector<float> axis(dimension, 0.0f);
    axis[0] = 1.0f;
    index.centroids_.push_back(std::move(axis));
    index.lists_.resize(1);
    return index;
}

void IvfIndex::train(std::span<const embedding::EmbeddingVector> sample, std::size_t nlist,
                     std::uint64_t seed) {
    if (frozen_) throw FrozenIndex();
    if (!docs_.empty()) throw InvalidArgument("cannot retrain a populated index");
    if (!sample.empty() && sample.front().dimension() != dimension_) {
        throw InvalidArgument("training sample dimension does not match the index");
    }
    centroids_ = train_kmeans(sample, nlist, seed);
    lists_.assign(centroids_.size(), {});
}

std::size_t IvfIndex::nearest_centroid(std::span<const float> v) const {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids_.size(); ++c) {
        const double s = dot(v, centroids_[c]);
        if (s > best_score) {
            best_score = s;
            best = c;
        }
    }
    return best;
}

void IvfIndex::add(EvidenceDocument doc, const embedding::EmbeddingVector& vec) {
    if (!trained()) throw UntrainedIndex();
    if (frozen_) throw FrozenIndex();
    if (vec.dimension() != dimension_) {
        throw InvalidArgument(fmt::format("vector dimension {} does not match index dimension {}",
                                          vec.dimension(), dimension_));
    }
    if (!(std::abs(vec.norm() - 1.0) <= kUnitTolerance)) {
        throw InvalidArgument("only unit-norm vectors can be indexed");
    }
    if (doc.doc_id.empty()) throw InvalidArgument("doc_id is empty");
    if (doc.origin.empty()) throw InvalidArgument("document origin is empty: " + doc.doc_id);
    if (by_id_.contains(doc.doc_id)) throw DuplicateDocId(doc.doc_id);

    const std::size_t list = nearest_centroid(vec.values());
    const std::size_t doc_index = docs_.size();
    by_id_.emplace(doc.doc_id, doc_index);
    docs_.push_back(std::move(doc));
    lists_[list].doc_indices.push_back(doc_index);
    lists_[list].vectors.insert(lists_[list].vectors.end(), vec.values().begin(), vec.values().end());
}

std::vector<SearchHit> IvfIndex::search(const embedding::EmbeddingVector& query, std::size_t k,
                                        std::size_t nprobe) const {
    if (!trained()) throw UntrainedIndex();
    if (k == 0 || nprobe == 0) throw InvalidArgument("k and nprobe must be positive");
    if (query.dimension() != dimension_) {
        throw InvalidArgument(fmt::format("query dimension {} does not match index dimension {}",
                                          query.dimension(), dimension_));
    }
    if (docs_.empty()) return {};
    nprobe = std::min(nprobe, centroids_.size());

    const auto q = query.values();
    std::vector<std::pair<double, std::size_t>> coarse;
    coarse.reserve(centroids_.size());
    for (std::size_t c = 0; c < centroids_.size(); ++c) coarse.emplace_back(dot(q, centroids_[c]), c);
    std::partial_sort(coarse.begin(), coarse.begin() + static_cast<std::ptrdiff_t>(nprobe), coarse.end(),
                      [](const auto& a, const auto& b) {
                          return a.first != b.first ? a.first > b.first : a.second < b.second;
                      });

    std::vector<std::pair<double, std::size_t>> candidates;
    for (std::size_t p = 0; p < nprobe; ++p) {
        const auto& list = lists_[coarse[p].second];
        for (std::size_t i = 0; i < list.doc_indices.size(); ++i) {
            const std::span<const float> v(list.vectors.data() + i * dimension_, dimension_);
            candidates.emplace_back(dot(q, v), list.doc_indices[i]);
        }
    }
    const auto better = [this](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return docs_[a.second].doc_id < docs_[b.second].doc_id;
    };
    const std::size_t take = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                      candidates.end(), better);

    std::vector<SearchHit> hits;
    hits.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        hits.push_back({docs_[candidates[i].second], std::clamp(candidates[i].first, -1.0, 1.0)});
    }
    return hits;
}

const EvidenceDocument* IvfIndex::find(const std::string& doc_id) const {
    const auto it = by_id_.find(doc_id);
    return it == by_id_.end() ? nullptr : &docs_[it->second];
}

std::vector<std::size_t> IvfIndex::list_sizes() const {
    std::vector<std::size_t> sizes;
    sizes.reserve(lists_.size());
    for (const auto& l : lists_) sizes.push_back(l.doc_indices.size());
    return sizes;
}

std::optional<std::size_t> IvfIndex::list_of(const std::string& doc_id) const {
    const auto it = by_id_.find(doc_id);
    if (it == by_id_.end()) return std::nullopt;
    for (std::size_t l = 0; l < lists_.size(); ++l) {
        const auto& ids = lists_[l].doc_indices;
        if (std::find(ids.begin(), ids.end(), it->second) != ids.end()) return l;
    }
    return std::nullopt;
}

} // namespace claimguard::index
