#pragma once

#include <cstdint>

#include "cylwave/forward.hpp"

namespace cylwave {

/// Ground truth and run layout for synthetic data generation.
struct TruthSetup {
    GaussianSum space;          // true space-dependent conductivity
    CosineTimePart time_part{}; // known time-dependent part
    double background = 1.0;
    SourcePulse pulse{};
    std::function<double(const std::array<double, 3>&)> theta0;
    std::function<double(const std::array<double, 3>&)> theta1; // empty = zero
    int front_axis = 0;
};

/// Solves the forward problem on the refine-times finer grid and time step
/// and restricts the front-face samples to the coarse nodes and coarse time
/// levels (exact node coincidence). refine >= 2 keeps the generated data off
/// the inversion discretization.
BoundaryRecord generate_data(const TruthSetup& truth, const Grid3& coarse_grid, int refine,
                             double tau, double T, bool parallel = true);

/// Multiplicative relative noise u (1 + sigma alpha), alpha iid uniform on
/// [-1,1] from the counter-based generator, reproducible under seed.
BoundaryRecord add_noise(const BoundaryRecord& record, double sigma, std::uint64_t seed);

} // namespace cylwave
