#ifndef DIVPRUNE_RNG_HPP
#define DIVPRUNE_RNG_HPP

#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

namespace divprune {

// Self-contained generator so every draw is pinned by this code base, not by
// the standard library's distribution implementations. Reproducibility of
// seeded runs is a contract of every module below.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    // Uniform in [0, n). Rejection sampling, no modulo bias.
    std::size_t uniform_index(std::size_t n);

    // Uniform in [0, 1) with 53 random bits.
    double uniform01();

    // Standard normal via Box-Muller; draws are consumed in pairs.
    double gaussian();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Mixes a seed with stream tags so each worker/member/fold gets an
// independent, schedule-free stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b = 0);

// FNV-1a; used for dataset identities and input-file digests in manifests.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64_str(const std::string& s);

}  // namespace divprune

#endif
