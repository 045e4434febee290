#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "claimguard/embedding/embedder.hpp"
#include "claimguard/index/ivf_index.hpp"

namespace claimguard::test {

inline std::filesystem::path source_dir() { return CLAIMGUARD_SOURCE_DIR; }
inline std::filesystem::path synthetic_dir() { return source_dir() / "data" / "synthetic"; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("claimguard-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline embedding::EmbeddingVector random_unit(std::mt19937_64& rng, std::size_t d) {
    std::normal_distribution<float> g(0.0f, 1.0f);
    std::vector<float> v(d);
    for (auto& x : v) x = g(rng);
    return embedding::EmbeddingVector::normalize(std::move(v));
}

/// Unit vector in the plane of e0 and e1 with cosine `s` against e0.
inline embedding::EmbeddingVector with_cosine(double s, std::size_t d = 8) {
    std::vector<float> v(d, 0.0f);
    v[0] = static_cast<float>(s);
    v[1] = static_cast<float>(std::sqrt(std::max(0.0, 1.0 - s * s)));
    return embedding::EmbeddingVector::normalize(std::move(v));
}

inline embedding::EmbeddingVector axis(std::size_t i, std::size_t d = 8) {
    std::vector<float> v(d, 0.0f);
    v[i] = 1.0f;
    return embedding::EmbeddingVector::from_unit(std::move(v));
}

inline index::EvidenceDocument make_doc(const std::string& id, Label label = Label::True,
                                        const std::string& evidence = "stored evidence") {
    index::EvidenceDocument d;
    d.doc_id = id;
    d.record_id = id;
    d.claim_text = "claim " + id;
    d.evidence_text = evidence;
    d.label = label;
    d.origin = "https://origin.example/" + id;
    return d;
}

inline std::string fenced(const nlohmann::json& j) { return "```json\n" + j.dump() + "\n```"; }

} // namespace claimguard::test
