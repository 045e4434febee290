#include "claimguard/util/backoff.hpp"

#include <algorithm>
#include <random>
#include <thread>

namespace claimguard::util {

void backoff_sleep(int attempt, std::chrono::milliseconds base) {
    thread_local std::mt19937 rng{std::random_device{}()};
    const auto delay = base * (1LL << std::min(attempt, 10));
    std::uniform_int_distribution<long long> jitter(0, delay.count() / 2);
    std::this_thread::sleep_for(delay + std::chrono::milliseconds(jitter(rng)));
}

} // namespace claimguard::util
