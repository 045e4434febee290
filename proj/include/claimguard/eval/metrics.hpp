#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "claimguard/core/types.hpp"

namespace claimguard::eval {

/// confusion[gold][predicted], classes in the order true, false, nei.
using Confusion = std::array<std::array<std::size_t, 3>, 3>;

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct Averages {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Per-class scores with 0/0 taken as 0; weighted averages use gold support.
struct MetricsReport {
    Confusion confusion{};
    std::array<ClassScores, 3> per_class{};
    std::size_t total = 0;
    double accuracy = 0.0;
    Averages weighted;
    Averages macro;

    nlohmann::json to_json() const;
    /// Plain-text table: one weighted row, then one row per class.
    std::string table(std::string_view title) const;
};

MetricsReport compute_metrics(const Confusion& confusion);
MetricsReport compute_metrics(std::span<const Label> gold, std::span<const Label> predicted);

std::size_t class_index(Label label) noexcept;

} // namespace claimguard::eval
