#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace stepsvm {

// SplitMix64 finalizer. All derived seeds (per repetition, per tree, per
// fold assignment) come from mix_seed(parent, index) so streams are
// independent of scheduling order.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

// Deterministic random stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; all value transforms (bounded ints,
// unit doubles, normals) are coded here explicitly so draws are identical on
// every platform and compiler.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0,1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Unbiased uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t next_below(std::uint64_t bound);

    // Standard normal via Marsaglia's polar method; the spare value is cached.
    double next_normal();

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace stepsvm
