#pragma once

#include <cmath>
#include <cstdint>

namespace fedvar {

// SplitMix64 finalizer. Full-avalanche, so chaining it over the key words
// below gives statistically independent outputs for distinct keys.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t absorb(std::uint64_t h, std::uint64_t w) {
    return mix64((h + 0x9e3779b97f4a7c15ULL) ^ w);
}

// Counter-based noise stream addressed by (seed, trial, round, agent, step).
// word(k) is a pure function of the full key, so draws are bit-identical for
// identical coordinates regardless of evaluation order or thread count.
// Each consumer documents how many counter values k it uses per draw; a fair
// Bernoulli consumes exactly one.
class NoiseStream {
public:
    explicit NoiseStream(std::uint64_t seed) : seed_(seed) {}

    NoiseStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t round,
                std::uint64_t agent, std::uint64_t step)
        : seed_(seed), trial_(trial), round_(round), agent_(agent), step_(step) {}

    NoiseStream at_trial(std::uint64_t trial) const {
        NoiseStream s = *this;
        s.trial_ = trial;
        return s;
    }
    NoiseStream at_round(std::uint64_t round) const {
        NoiseStream s = *this;
        s.round_ = round;
        return s;
    }
    NoiseStream at_agent(std::uint64_t agent) const {
        NoiseStream s = *this;
        s.agent_ = agent;
        return s;
    }
    NoiseStream at_step(std::uint64_t step) const {
        NoiseStream s = *this;
        s.step_ = step;
        return s;
    }
    NoiseStream at(std::uint64_t round, std::uint64_t agent, std::uint64_t step) const {
        NoiseStream s = *this;
        s.round_ = round;
        s.agent_ = agent;
        s.step_ = step;
        return s;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t trial() const { return trial_; }
    std::uint64_t round() const { return round_; }
    std::uint64_t agent() const { return agent_; }
    std::uint64_t step() const { return step_; }

    std::uint64_t word(std::uint64_t k) const {
        std::uint64_t h = mix64(seed_);
        h = absorb(h, trial_);
        h = absorb(h, round_);
        h = absorb(h, agent_);
        h = absorb(h, step_);
        return absorb(h, k);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform(std::uint64_t k) const {
        return static_cast<double>(word(k) >> 11) * 0x1.0p-53;
    }

    // Fair Bernoulli; one counter value.
    bool coin(std::uint64_t k) const { return (word(k) >> 63) != 0; }

    // Standard normal via Box-Muller; consumes counter values 2k and 2k+1.
    double gaussian(std::uint64_t k) const {
        const double u1 = static_cast<double>((word(2 * k) >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform(2 * k + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t trial_ = 0;
    std::uint64_t round_ = 0;
    std::uint64_t agent_ = 0;
    std::uint64_t step_ = 0;
};

}  // namespace fedvar
