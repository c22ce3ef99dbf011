#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cyberirl {

/// 64-bit FNV-1a over raw bytes, rendered as 16 lowercase hex digits.
std::string content_hash(std::string_view bytes);

/// SplitMix64 (Steele, Lea & Flood). Small, seedable and bit-identical on every platform,
/// which std:: distributions are not.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

    /// Uniform double in [0, 1) built from the top 53 bits.
    double uniform();

private:
    std::uint64_t state_;
};

/// Finalizer used to derive independent substreams from (seed, a, b).
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// Shortest decimal text for a double that parses back to the same value.
std::string format_double(double v);

}  // namespace cyberirl
