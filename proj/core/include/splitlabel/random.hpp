#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

namespace splitlabel {

// Seeded generator with portable draws. The std distributions are
// implementation-defined, so traces would differ between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    // Uniform in [0, n). n must be > 0.
    std::size_t uniform_index(std::size_t n);

    // Uniform in [0, 1) with 53 random bits.
    double unit_real();

    // Standard normal via Box-Muller (used by the synthetic generators only).
    double normal();

    std::uint64_t next() { return engine_(); }

    std::string save_state() const;
    void load_state(const std::string& state);

    friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

private:
    std::mt19937_64 engine_;
};

// Mixes a base seed with a stream id (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace splitlabel
