#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace sica {

// Seeded generator with named sub-streams. A stream is identified by the
// root seed plus a path of integers, so independent runs (seeds, sweep
// cells, data chunks) get reproducible, non-overlapping sequences no matter
// which thread executes them.
class Rng {
public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed) : Rng(seed, {}) {}

    Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
        : seed_(seed), path_(path)
    {
        reseed();
    }

    // Child stream; the parent is left untouched.
    Rng stream(std::initializer_list<std::uint64_t> sub) const
    {
        Rng child = *this;
        child.path_.insert(child.path_.end(), sub.begin(), sub.end());
        child.reseed();
        return child;
    }

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    double gamma(double shape) { return std::gamma_distribution<double>(shape, 1.0)(engine_); }

    engine_type& engine() { return engine_; }

private:
    void reseed()
    {
        std::vector<std::uint32_t> words;
        words.reserve(2 + 2 * path_.size());
        auto push = [&](std::uint64_t v) {
            words.push_back(static_cast<std::uint32_t>(v));
            words.push_back(static_cast<std::uint32_t>(v >> 32));
        };
        push(seed_);
        for (auto p : path_) push(p);
        std::seed_seq seq(words.begin(), words.end());
        engine_.seed(seq);
        normal_.reset();
    }

    std::uint64_t seed_;
    std::vector<std::uint64_t> path_;
    engine_type engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace sica
