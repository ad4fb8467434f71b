#pragma once

#include <cstdint>

#include "robzero/field.hpp"

namespace robzero {

// Counter-based generator (splitmix64 over a keyed counter) so batch runs are
// reproducible and per-sample streams independent of evaluation order.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key, std::uint64_t stream = 0)
        : key_(key ^ (stream * 0x9e3779b97f4a7c15ULL)) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (key_ + ++ctr_ * 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double next_unit() { // (0,1]
        return (next_u64() >> 11) * 0x1p-53 + 0x1p-54;
    }
    double next_gaussian();

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

enum class Spectrum { power, gaussian };

struct GaussianOptions {
    int dims = 4;
    int grid = 30;
    int codomain = 3;
    Spectrum spectrum = Spectrum::power;
    double l = 3.0;
    Topology topology = Topology::cube;
    std::uint64_t seed = 0;
    double alpha_safety = 1.0; // scales the empirical Lipschitz estimate
};

// f1 = x1^2 - x2^2 - ... - xn^2, fj = 2 x1 xj; alpha = 4n/(g-1).
SampledField gen_quadratic(int n, int g);

// Hopf map (n=3) and its suspensions on [-1,1]^(n+1); alpha = 4(n+1)/(g-1).
SampledField gen_hopf(int n, int g);

// Stationary Gaussian random field via spectral synthesis on a torus; cube
// fields are sampled on the {1..2g}^m torus and restricted to {1..g}^m.
// Each component has unit marginal variance; the returned field is
// f(x) - f(x0) with x0 the cube midpoint (vertex 0 on a torus).
SampledField gen_gaussian(const GaussianOptions& opt);

// Homogeneous random quadratic [-1,1]^4 -> R^3 with N(0,1) coefficients;
// alpha from the exact gradient bound on the cube.
SampledField gen_random_quadratic(int g, std::uint64_t seed);

} // namespace robzero
