#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "claimguard/index/ivf_index.hpp"
#include "claimguard/util/rng.hpp"

namespace claimguard::index {

namespace {

using embedding::dot;

std::size_t argmax_centroid(std::span<const float> v, const std::vector<std::vector<float>>& centroids) {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double s = dot(v, centroids[c]);
        if (s > best_score) {
            best_score = s;
            best = c;
        }
    }
    return best;
}

// Returns false when the sum is the zero vector.
bool normalize_in_place(std::vector<double>& sum, std::vector<float>& out) {
    double norm = 0.0;
    for (double x : sum) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) return false;
    for (std::size_t i = 0; i < sum.size(); ++i) out[i] = static_cast<float>(sum[i] / norm);
    return true;
}

} // namespace

std::vector<std::vector<float>> train_kmeans(std::span<const embedding::EmbeddingVector> sample,
                                             std::size_t k, std::uint64_t seed) {
    if (k == 0) throw InvalidArgument("nlist must be positive");
    if (sample.size() < k) {
        throw InsufficientTrainingData(
            fmt::format("need at least {} training vectors, got {}", k, sample.size()));
    }
    const std::size_t dim = sample.front().dimension();
    for (const auto& v : sample) {
        if (v.dimension() != dim) throw InvalidArgument("training sample has mixed dimensions");
    }

    // Seed centroids with k distinct sample points (partial Fisher-Yates).
    util::StableRng rng(seed);
    std::vector<std::size_t> order(sample.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::swap(order[i], order[i + rng.below(order.size() - i)]);
    }
    std::vector<std::vector<float>> centroids;
    centroids.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto v = sample[order[i]].values();
        centroids.emplace_back(v.begin(), v.end());
    }

    std::vector<std::size_t> assignment(sample.size(), 0);
    for (int iter = 0; iter < kMaxKmeansIterations; ++iter) {
        std::vector<std::vector<std::size_t>> members(k);
        for (std::size_t i = 0; i < sample.size(); ++i) {
            assignment[i] = argmax_centroid(sample[i].values(), centroids);
            members[assignment[i]].push_back(i);
        }

        for (std::size_t c = 0; c < k; ++c) {
            if (!members[c].empty()) continue;
            const auto largest = static_cast<std::size_t>(std::distance(
                members.begin(),
                std::max_element(members.begin(), members.end(),
                                 [](const auto& a, const auto& b) { return a.size() < b.size(); })));
            if (members[largest].size() < 2) break;
            auto& pool = members[largest];
            std::size_t farthest_pos = 0;
            double lowest = std::numeric_limits<double>::infinity();
            for (std::size_t p = 0; p < pool.size(); ++p) {
                const double s = dot(sample[pool[p]].values(), centroids[largest]);
                if (s < lowest) {
                    lowest = s;
                    farthest_pos = p;
                }
            }
            const std::size_t moved = pool[farthest_pos];
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(farthest_pos));
            members[c].push_back(moved);
            assignment[moved] = c;
        }

        double max_shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (members[c].empty()) continue;
            std::vector<double> sum(dim, 0.0);
            for (std::size_t idx : members[c]) {
                const auto v = sample[idx].values();
                for (std::size_t d = 0; d < dim; ++d) sum[d] += v[d];
            }
            std::vector<float> updated(dim);
            if (!normalize_in_place(sum, updated)) continue;
            double shift = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double delta = static_cast<double>(updated[d]) - centroids[c][d];
                shift += delta * delta;
            }
            max_shift = std::max(max_shift, std::sqrt(shift));
            centroids[c] = std::move(updated);
        }
        if (max_shift < kKmeansShiftTolerance) break;
    }
    return centroids;
}

std::size_t default_nlist(std::size_t corpus_size) {
    if (corpus_size < 64) return 1;
    const auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(corpus_size))));
    return std::clamp<std::size_t>(root, 1, 256);
}

} // namespace claimguard::index
