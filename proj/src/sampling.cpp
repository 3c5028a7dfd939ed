#include "pdmsym/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace pdm {

namespace {

// Lattice numerators for |x| in [0.2, 2]: 205..2048 over denominator 1024.
constexpr long kLo = 205, kHi = 2048;
constexpr long kSpan = kHi - kLo + 1;

}  // namespace

Rat sample_coordinate(SplitMix64& g) {
    const std::uint64_t u = g.next() % static_cast<std::uint64_t>(2 * kSpan);
    const bool negative = u >= static_cast<std::uint64_t>(kSpan);
    const long k = kLo + static_cast<long>(negative ? u - kSpan : u);
    return rat(negative ? -k : k, 1024);
}

P3q sample_qpoint(SplitMix64& g) {
    return {sample_coordinate(g), sample_coordinate(g), sample_coordinate(g)};
}

P3d sample_point(SplitMix64& g) {
    const P3q q = sample_qpoint(g);
    return {rat_d(q[0]), rat_d(q[1]), rat_d(q[2])};
}

bool admits_point(const std::vector<Coeff>& probes, const P3d& p, int ord) {
    constexpr double kCap = 1e8;
    for (const auto& c : probes) {
        if (c.is_zero()) continue;
        CJet<double> j = CJet<double>::zero(p, ord);
        try {
            j = c.eval(p, ord);
        } catch (const EvalError&) {
            return false;
        }
        for (const double v : j.re.c)
            if (!std::isfinite(v) || std::abs(v) > kCap) return false;
        for (const double v : j.im.c)
            if (!std::isfinite(v) || std::abs(v) > kCap) return false;
    }
    return true;
}

SampleSet sample_points(std::uint64_t seed, int count,
                        const std::vector<Coeff>& probes, int ord) {
    SampleSet out;
    out.seed = seed;
    SplitMix64 g(seed);
    const long budget = 200L * count + 1000;
    for (long attempt = 0; static_cast<int>(out.pts.size()) < count; ++attempt) {
        if (attempt >= budget)
            throw std::runtime_error(
                "sampling exhaustion: " + std::to_string(out.rejected) +
                " of " + std::to_string(attempt) + " points rejected");
        const P3q q = sample_qpoint(g);
        const P3d p{rat_d(q[0]), rat_d(q[1]), rat_d(q[2])};
        if (!admits_point(probes, p, ord)) {
            ++out.rejected;
            continue;
        }
        out.pts.push_back(p);
        out.qpts.push_back(q);
    }
    return out;
}

}  // namespace pdm
