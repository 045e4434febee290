#include "claimguard/engine/verifier.hpp"

#include <array>
#include <condition_variable>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "claimguard/verdict/verdict.hpp"

namespace claimguard::engine {

namespace {

struct Outcome {
    PipelineResult result;
    nlohmann::json trace;
};

struct Shared {
    std::mutex mutex;
    std::condition_variable done;
    std::array<std::optional<Outcome>, 3> outcomes;
    std::size_t pending = 0;

    void put(std::size_t slot, Outcome outcome) {
        {
            std::lock_guard lock(mutex);
            outcomes[slot] = std::move(outcome);
            --pending;
        }
        done.notify_all();
    }
};

constexpr std::array<PipelineId, 3> kOrder = {PipelineId::Rag1, PipelineId::Rag2, PipelineId::FactCheck};

RouteTag placeholder_route(PipelineId id) {
    return id == PipelineId::FactCheck ? RouteTag::LlmFallback : RouteTag::Tier3RoleBased;
}

template <class Fn>
void launch(std::shared_ptr<Shared> shared, std::size_t slot, Fn fn) {
    std::thread([shared = std::move(shared), slot, fn = std::move(fn)]() mutable {
        const auto id = kOrder[slot];
        try {
            shared->put(slot, fn());
        } catch (const std::exception& e) {
            spdlog::error("{} failed: {}", to_string(id), e.what());
            shared->put(slot, {PipelineResult::placeholder(id, placeholder_route(id), e.what()), nullptr});
        }
    }).detach();
}

} // namespace

ClaimVerifier::ClaimVerifier(Pipelines pipelines, std::chrono::milliseconds deadline)
    : pipelines_(std::move(pipelines)), deadline_(deadline) {
    if (deadline_.count() <= 0) throw InvalidArgument("verification deadline must be positive");
}

Verification ClaimVerifier::verify(const Claim& claim) const {
    auto shared = std::make_shared<Shared>();
    std::array<bool, 3> enabled = {pipelines_.rag1 != nullptr, pipelines_.rag2 != nullptr,
                                   pipelines_.factcheck != nullptr};
    for (bool e : enabled) shared->pending += e ? 1 : 0;

    const auto started = std::chrono::steady_clock::now();
    for (std::size_t slot = 0; slot < 2; ++slot) {
        if (!enabled[slot]) continue;
        auto rag = slot == 0 ? pipelines_.rag1 : pipelines_.rag2;
        launch(shared, slot, [rag, claim]() {
            rag::RagTrace trace;
            auto result = rag->verify(claim, &trace);
            return Outcome{std::move(result), trace.to_json()};
        });
    }
    if (enabled[2]) {
        launch(shared, 2, [fc = pipelines_.factcheck, claim]() {
            factcheck::FactCheckTrace trace;
            auto result = fc->verify(claim, &trace);
            return Outcome{std::move(result), trace.to_json()};
        });
    }

    std::array<std::optional<Outcome>, 3> outcomes;
    {
        std::unique_lock lock(shared->mutex);
        shared->done.wait_until(lock, started + deadline_, [&] { return shared->pending == 0; });
        outcomes = shared->outcomes;
    }

    std::array<std::optional<verdict::NormalizedResult>, 3> normalized;
    nlohmann::json trace = {{"claim_id", claim.id}};
    for (std::size_t slot = 0; slot < 3; ++slot) {
        const auto id = kOrder[slot];
        std::string key(to_string(id));
        if (!enabled[slot]) {
            normalized[slot] = verdict::normalize(
                PipelineResult::placeholder(id, placeholder_route(id), "pipeline disabled"));
            trace[key] = nullptr;
        } else if (!outcomes[slot]) {
            spdlog::warn("{} missed the {} ms deadline for claim {}", key, deadline_.count(), claim.id);
            normalized[slot] = verdict::normalize(PipelineResult::placeholder(
                id, placeholder_route(id), fmt::format("deadline of {} ms exceeded", deadline_.count())));
            trace[key] = nullptr;
        } else {
            normalized[slot] = verdict::normalize(outcomes[slot]->result);
            trace[key] = std::move(outcomes[slot]->trace);
        }
    }

    auto report = verdict::integrate(claim.id, *normalized[0], *normalized[1], *normalized[2]);
    trace["verdict"] = to_json(report);
    return {std::move(report), std::move(trace)};
}

} // namespace claimguard::engine
