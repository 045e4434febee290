#pragma once

#include <chrono>

namespace claimguard::util {

/// Sleeps base * 2^attempt plus up to 50% random jitter.
void backoff_sleep(int attempt, std::chrono::milliseconds base);

} // namespace claimguard::util
