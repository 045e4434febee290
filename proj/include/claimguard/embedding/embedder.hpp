#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "claimguard/core/errors.hpp"
#include "claimguard/net/http.hpp"

namespace claimguard::embedding {

inline constexpr std::size_t kDefaultDimension = 384;

class EmptyText : public Error {
public:
    EmptyText() : Error("cannot embed empty text") {}
    using Error::Error;
};

class RemoteUnavailable : public Error {
public:
    using Error::Error;
};

/// Raised by embed_batch; wraps the first failing element.
class BatchError : public Error {
public:
    BatchError(std::size_t index, const std::string& cause)
        : Error("embedding failed at index " + std::to_string(index) + ": " + cause),
          index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Unit-norm, fixed-dimension embedding.
class EmbeddingVector {
public:
    /// L2-normalizes `values`. Throws InvalidArgument on an empty or zero vector.
    static EmbeddingVector normalize(std::vector<float> values);

    /// Wraps values that are already unit length (|norm - 1| <= 1e-6).
    static EmbeddingVector from_unit(std::vector<float> values);

    std::size_t dimension() const noexcept { return values_.size(); }
    std::span<const float> values() const noexcept { return values_; }
    double norm() const noexcept { return norm_; }

    bool operator==(const EmbeddingVector& other) const { return values_ == other.values_; }

private:
    EmbeddingVector(std::vector<float> values, double norm)
        : values_(std::move(values)), norm_(norm) {}

    std::vector<float> values_;
    double norm_;
};

/// Inner product accumulated in double. Equals cosine for unit vectors.
double dot(std::span<const float> a, std::span<const float> b);

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

/// Claim preprocessing before embedding: whitespace trim plus Unicode NFC.
std::string preprocess(std::string_view text);

class Embedder {
public:
    virtual ~Embedder() = default;

    virtual std::size_t dimension() const noexcept = 0;

    /// Throws EmptyText, or RemoteUnavailable for remote providers.
    virtual EmbeddingVector embed(std::string_view text) const = 0;

    /// Element-wise embed; the first failure is rethrown as BatchError.
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const;
};

/// Hashed bag-of-words. Tokens are maximal runs of ASCII alphanumerics or
/// non-ASCII bytes, ASCII-lowercased. Each token adds +-1 to bucket
/// fnv1a64(token) mod d, sign +1 when (hash >> 32) is even.
class HashingEmbedder final : public Embedder {
public:
    explicit HashingEmbedder(std::size_t dimension = kDefaultDimension);

    std::size_t dimension() const noexcept override { return dimension_; }
    EmbeddingVector embed(std::string_view text) const override;

    static std::vector<std::string> tokenize(std::string_view text);

private:
    std::size_t dimension_;
};

struct RemoteEmbedderConfig {
    std::string endpoint;
    std::string api_key;  // sent as a bearer token, never logged
    std::size_t dimension = kDefaultDimension;
    std::size_t max_in_flight = 4;
    int max_attempts = 3;
    std::chrono::milliseconds backoff_base{200};
    std::chrono::milliseconds timeout{30000};
};

/// POSTs {"inputs": [...]} and expects an array of float arrays back.
class RemoteEmbedder final : public Embedder {
public:
    RemoteEmbedder(RemoteEmbedderConfig config, std::shared_ptr<net::HttpTransport> transport);

    std::size_t dimension() const noexcept override { return config_.dimension; }
    EmbeddingVector embed(std::string_view text) const override;
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

private:
    std::vector<EmbeddingVector> request(const std::vector<std::string>& inputs) const;

    RemoteEmbedderConfig config_;
    std::shared_ptr<net::HttpTransport> transport_;
    mutable std::counting_semaphore<64> in_flight_;
};

struct EmbedderConfig {
    enum class Kind { DeterministicLocal, RemoteHttp };

    Kind kind = Kind::DeterministicLocal;
    std::size_t dimension = kDefaultDimension;
    RemoteEmbedderConfig remote;
};

std::shared_ptr<Embedder> make_embedder(const EmbedderConfig& config,
                                        std::shared_ptr<net::HttpTransport> transport = nullptr);

} // namespace claimguard::embedding
