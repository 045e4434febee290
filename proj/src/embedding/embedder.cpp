#include "claimguard/embedding/embedder.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "claimguard/util/backoff.hpp"
#include "claimguard/util/text.hpp"

namespace claimguard::embedding {

namespace {

constexpr double kUnitTolerance = 1e-6;

double l2_norm(std::span<const float> v) {
    return std::sqrt(dot(v, v));
}

bool is_token_byte(unsigned char c) noexcept {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

} // namespace

EmbeddingVector EmbeddingVector::normalize(std::vector<float> values) {
    if (values.empty()) throw InvalidArgument("embedding has zero dimension");
    const double norm = l2_norm(values);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw InvalidArgument("cannot normalize a zero or non-finite vector");
    }
    for (auto& x : values) x = static_cast<float>(x / norm);
    const double unit = l2_norm(values);
    return {std::move(values), unit};
}

EmbeddingVector EmbeddingVector::from_unit(std::vector<float> values) {
    if (values.empty()) throw InvalidArgument("embedding has zero dimension");
    const double norm = l2_norm(values);
    if (!(std::abs(norm - 1.0) <= kUnitTolerance)) {
        throw InvalidArgument(fmt::format("vector is not unit length (norm {})", norm));
    }
    return {std::move(values), norm};
}

double dot(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) throw InvalidArgument("dimension mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return sum;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    return dot(a.values(), b.values());
}

std::string preprocess(std::string_view text) {
    const auto trimmed = util::trim(text);
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) return std::string(trimmed);
    const auto source = icu::UnicodeString::fromUTF8(
        icu::StringPiece(trimmed.data(), static_cast<int32_t>(trimmed.size())));
    const auto normalized = nfc->normalize(source, status);
    if (U_FAILURE(status)) return std::string(trimmed);
    std::string out;
    normalized.toUTF8String(out);
    return out;
}

std::vector<EmbeddingVector> Embedder::embed_batch(std::span<const std::string> texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        try {
            out.push_back(embed(texts[i]));
        } catch (const Error& e) {
            throw BatchError(i, e.what());
        }
    }
    return out;
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) throw InvalidArgument("embedding dimension must be positive");
}

std::vector<std::string> HashingEmbedder::tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (is_token_byte(c)) {
            current.push_back(static_cast<char>((c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

EmbeddingVector HashingEmbedder::embed(std::string_view text) const {
    const auto prepared = preprocess(text);
    if (prepared.empty()) throw EmptyText();
    auto tokens = tokenize(prepared);
    if (tokens.empty()) throw EmptyText("text has no alphanumeric tokens");

    std::vector<float> values(dimension_, 0.0f);
    for (const auto& token : tokens) {
        const auto h = util::fnv1a64(token);
        values[h % dimension_] += ((h >> 32) % 2 == 0) ? 1.0f : -1.0f;
    }
    if (std::all_of(values.begin(), values.end(), [](float x) { return x == 0.0f; })) {
        // Signed collisions cancelled out. Fall back to one bucket keyed on
        // the sorted multiset so the result stays a function of the tokens.
        std::sort(tokens.begin(), tokens.end());
        std::string joined;
        for (const auto& t : tokens) joined += t + ' ';
        const auto h = util::fnv1a64(joined);
        values[h % dimension_] = 1.0f;
    }
    return EmbeddingVector::normalize(std::move(values));
}

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig config,
                               std::shared_ptr<net::HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)),
      in_flight_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(config_.max_in_flight, 1, 64))) {
    if (config_.endpoint.empty()) throw InvalidArgument("remote embedder needs an endpoint");
    if (config_.dimension == 0) throw InvalidArgument("embedding dimension must be positive");
    if (!transport_) transport_ = net::make_default_transport();
}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) const {
    auto prepared = preprocess(text);
    if (prepared.empty()) throw EmptyText();
    return request({std::move(prepared)}).front();
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(std::span<const std::string> texts) const {
    if (texts.empty()) return {};
    std::vector<std::string> inputs;
    inputs.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        auto prepared = preprocess(texts[i]);
        if (prepared.empty()) throw BatchError(i, "cannot embed empty text");
        inputs.push_back(std::move(prepared));
    }
    return request(inputs);
}

std::vector<EmbeddingVector> RemoteEmbedder::request(const std::vector<std::string>& inputs) const {
    net::HttpRequest req;
    req.method = "POST";
    req.url = config_.endpoint;
    req.body = nlohmann::json{{"inputs", inputs}}.dump();
    req.timeout = config_.timeout;
    if (!config_.api_key.empty()) req.headers["Authorization"] = "Bearer " + config_.api_key;

    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt < std::max(1, config_.max_attempts); ++attempt) {
        if (attempt > 0) util::backoff_sleep(attempt - 1, config_.backoff_base);
        net::HttpResponse resp;
        try {
            in_flight_.acquire();
            struct Permit {
                std::counting_semaphore<64>& sem;
                ~Permit() { sem.release(); }
            } permit{in_flight_};
            resp = transport_->send(req);
        } catch (const net::TransportError& e) {
            last_error = e.what();
            continue;
        }
        if (resp.status == 429 || resp.status >= 500) {
            last_error = fmt::format("embedding endpoint returned HTTP {}", resp.status);
            continue;
        }
        if (resp.status != 200) {
            throw RemoteUnavailable(fmt::format("embedding endpoint returned HTTP {}", resp.status));
        }
        const auto body = nlohmann::json::parse(resp.body, nullptr, false);
        if (!body.is_array() || body.size() != inputs.size()) {
            throw RemoteUnavailable("embedding response is not an array matching the inputs");
        }
        std::vector<EmbeddingVector> out;
        out.reserve(inputs.size());
        for (const auto& row : body) {
            if (!row.is_array() || row.size() != config_.dimension) {
                throw RemoteUnavailable(
                    fmt::format("embedding response row does not have dimension {}", config_.dimension));
            }
            std::vector<float> values;
            values.reserve(row.size());
            for (const auto& x : row) {
                if (!x.is_number()) throw RemoteUnavailable("embedding response has a non-numeric value");
                values.push_back(x.get<float>());
            }
            try {
                out.push_back(EmbeddingVector::normalize(std::move(values)));
            } catch (const InvalidArgument& e) {
                throw RemoteUnavailable(e.what());
            }
        }
        return out;
    }
    spdlog::warn("embedding endpoint unavailable after {} attempts", config_.max_attempts);
    throw RemoteUnavailable(last_error);
}

std::shared_ptr<Embedder> make_embedder(const EmbedderConfig& config,
                                        std::shared_ptr<net::HttpTransport> transport) {
    if (config.kind == EmbedderConfig::Kind::DeterministicLocal) {
        return std::make_shared<HashingEmbedder>(config.dimension);
    }
    auto remote = config.remote;
    remote.dimension = config.dimension;
    return std::make_shared<RemoteEmbedder>(std::move(remote), std::move(transport));
}

} // namespace claimguard::embedding
