#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pdmsym/coeff.hpp"

namespace pdm {

// Deterministic 64-bit stream shared by every sampled check; the same seed
// reproduces the same points on any platform.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

// One coordinate on the dyadic lattice k/1024 restricted to
// [-2, -0.2] U [0.2, 2]. Lattice values convert exactly between double and
// rational, so float runs and exact cross-checks can share points.
Rat sample_coordinate(SplitMix64& g);

P3q sample_qpoint(SplitMix64& g);
P3d sample_point(SplitMix64& g);

// True iff every coefficient evaluates at p to finite jet entries of
// magnitude at most 1e8 (the rejection rule for singular profiles).
bool admits_point(const std::vector<Coeff>& probes, const P3d& p, int ord);

// Draws points until `count` pass the probe set, in both representations.
// Throws std::runtime_error on sampling exhaustion (a probe rejecting nearly
// everywhere), mentioning the attempt budget.
struct SampleSet {
    std::vector<P3d> pts;
    std::vector<P3q> qpts;
    std::uint64_t seed = 0;
    int rejected = 0;
};

SampleSet sample_points(std::uint64_t seed, int count,
                        const std::vector<Coeff>& probes = {}, int ord = 0);

}  // namespace pdm
