#ifndef NOQE_RNG_H
#define NOQE_RNG_H

#include <cstdint>
#include <limits>

namespace noqe {

/// Finalizer of the SplitMix64 generator. Used both as the generator step and
/// as the hash that derives independent stream seeds from a master seed.
constexpr uint64_t splitmix64_mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based seed derivation: seed for item `index` of stream `stream`
/// under `master`. Independent of evaluation order, so work can be sharded
/// across threads without changing results.
constexpr uint64_t derive_seed(uint64_t master, uint64_t stream, uint64_t index) {
    uint64_t h = splitmix64_mix(master + 0x9E3779B97F4A7C15ULL);
    h = splitmix64_mix(h ^ (stream * 0xD1B54A32D192ED03ULL + 0x2545F4914F6CDD1DULL));
    return splitmix64_mix(h ^ (index + 0x632BE59BD9B4E019ULL));
}

/// Small, fast UniformRandomBitGenerator. Cheap to construct, which matters
/// because every snapshot gets its own generator.
class SplitMix64 {
   public:
    using result_type = uint64_t;
    explicit SplitMix64(uint64_t seed) : state_(seed) {
    }
    static constexpr result_type min() {
        return 0;
    }
    static constexpr result_type max() {
        return std::numeric_limits<uint64_t>::max();
    }
    result_type operator()() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return splitmix64_mix(state_);
    }

   private:
    uint64_t state_;
};

/// Uniform double in [0, 1) built from the top 53 bits. Platform independent,
/// unlike std::uniform_real_distribution.
template <typename Rng>
double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by rejection. Platform independent.
template <typename Rng>
uint64_t uniform_below(Rng &rng, uint64_t bound) {
    uint64_t threshold = (0 - bound) % bound;
    while (true) {
        uint64_t r = rng();
        if (r >= threshold) {
            return r % bound;
        }
    }
}

}  // namespace noqe

#endif
