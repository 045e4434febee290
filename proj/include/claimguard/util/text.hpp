#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace claimguard::util {

std::string_view trim(std::string_view s) noexcept;

/// Lowercases ASCII letters only; other bytes pass through untouched.
std::string ascii_lower(std::string_view s);

bool iequals(std::string_view a, std::string_view b) noexcept;

/// 64-bit FNV-1a over the raw bytes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// 16 lowercase hex digits of fnv1a64; used as prompt and claim fingerprints.
std::string fingerprint(std::string_view bytes);

} // namespace claimguard::util
