#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "claimguard/core/types.hpp"
#include "claimguard/embedding/embedder.hpp"

namespace claimguard::index {

class InsufficientTrainingData : public Error {
public:
    using Error::Error;
};

class DuplicateDocId : public Error {
public:
    explicit DuplicateDocId(const std::string& id) : Error("duplicate doc_id: " + id) {}
};

class UntrainedIndex : public Error {
public:
    UntrainedIndex() : Error("index has not been trained") {}
};

class FrozenIndex : public Error {
public:
    FrozenIndex() : Error("index is frozen; no further additions") {}
};

class CorruptIndexFile : public Error {
public:
    using Error::Error;
};

/// A claim-evidence pair with its provenance.
struct EvidenceDocument {
    std::string doc_id;
    std::string record_id;  // corpus record the pair was cut from
    std::string claim_text;
    std::string evidence_text;
    Label label = Label::Nei;
    std::string origin;  // URL or corpus citation
    std::optional<std::string> issuer;
    std::optional<std::string> date;
    std::vector<std::string> extra_sources;

    bool operator==(const EvidenceDocument&) const = default;
};

nlohmann::json to_json(const EvidenceDocument& doc);
EvidenceDocument document_from_json(const nlohmann::json& j);

struct SearchHit {
    EvidenceDocument document;
    double score = 0.0;
};

inline constexpr std::uint64_t kDefaultTrainingSeed = 0x5eed'1f1f'0000'0001ULL;
inline constexpr int kMaxKmeansIterations = 25;
inline constexpr double kKmeansShiftTolerance = 1e-4;

/// Spherical k-means over unit vectors: inner-product assignment (ties to the
/// lower centroid), centroids are normalized member sums. Initial centroids
/// are k distinct sample points drawn with `seed`. An empty cluster is
/// reseeded with the member of the largest cluster farthest from its centroid.
std::vector<std::vector<float>> train_kmeans(std::span<const embedding::EmbeddingVector> sample,
                                             std::size_t k, std::uint64_t seed);

/// nlist heuristic: ceil(sqrt(n)) clamped to [1, 256], and 1 below 64 vectors.
std::size_t default_nlist(std::size_t corpus_size);

/// Inverted-file index with flat (exact) storage inside each list.
///
/// Build with train() then add(); call freeze() before handing the index to
/// concurrent readers. search() is const and takes no locks.
class IvfIndex {
public:
    explicit IvfIndex(std::size_t dimension);

    /// A trained single-list index, usable without a training sample.
    static IvfIndex flat(std::size_t dimension);

    void train(std::span<const embedding::EmbeddingVector> sample, std::size_t nlist,
               std::uint64_t seed = kDefaultTrainingSeed);

    void add(EvidenceDocument doc, const embedding::EmbeddingVector& vec);

    void freeze() noexcept { frozen_ = true; }

    /// Top-k by inner product over the nprobe nearest lists. Hits come back in
    /// non-increasing score order, ties by ascending doc_id. nprobe above
    /// nlist is clamped to nlist.
    std::vector<SearchHit> search(const embedding::EmbeddingVector& query, std::size_t k,
                                  std::size_t nprobe) const;

    void save(const std::filesystem::path& path) const;
    /// The loaded index is frozen.
    static IvfIndex load(const std::filesystem::path& path);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t nlist() const noexcept { return centroids_.size(); }
    std::size_t size() const noexcept { return docs_.size(); }
    bool trained() const noexcept { return !centroids_.empty(); }
    bool frozen() const noexcept { return frozen_; }

    const EvidenceDocument* find(const std::string& doc_id) const;
    std::span<const EvidenceDocument> documents() const noexcept { return docs_; }
    std::vector<std::size_t> list_sizes() const;
    std::span<const float> centroid(std::size_t list) const { return centroids_.at(list); }

    /// Which inverted list holds doc_id, if any.
    std::optional<std::size_t> list_of(const std::string& doc_id) const;

private:
    struct InvertedList {
        std::vector<std::size_t> doc_indices;
        std::vector<float> vectors;  // row-major, dimension_ floats per entry
    };

    std::size_t nearest_centroid(std::span<const float> v) const;

    std::size_t dimension_;
    std::vector<std::vector<float>> centroids_;
    std::vector<InvertedList> lists_;
    std::vector<EvidenceDocument> docs_;
    std::unordered_map<std::string, std::size_t> by_id_;
    bool frozen_ = false;
};

} // namespace claimguard::index
