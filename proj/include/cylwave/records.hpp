#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cylwave/grid.hpp"

namespace cylwave {

/// Time series of the solution on the observation (front) face: one value per
/// S1 node per time level, level-major.
struct BoundaryRecord {
    Grid3 grid{};
    int front_axis = 0;
    double tau = 0.0;
    int steps = 0;                        // Nt; levels stored = steps + 1
    std::vector<std::size_t> face_nodes;  // S1 linear indices, ascending
    std::vector<double> samples;          // (steps+1) * face_nodes.size()

    std::size_t node_count() const { return face_nodes.size(); }
    std::size_t levels() const { return static_cast<std::size_t>(steps) + 1; }
    double time_of(int m) const { return tau * m; }
    double* level(int m) { return samples.data() + static_cast<std::size_t>(m) * node_count(); }
    const double* level(int m) const {
        return samples.data() + static_cast<std::size_t>(m) * node_count();
    }
    bool same_shape(const BoundaryRecord& other) const {
        return grid.same_layout(other.grid) && front_axis == other.front_axis &&
               steps == other.steps && face_nodes == other.face_nodes;
    }
};

/// Data-misfit residual on the observation face; same layout as the record it
/// was built from, values already multiplied by the temporal cutoff.
using MisfitResidual = BoundaryRecord;

/// Wavefield snapshots at a fixed stride (stride 0 keeps none).
struct WaveHistory {
    Grid3 grid{};
    double tau = 0.0;
    int steps = 0;   // Nt of the run
    int stride = 1;  // snapshots at m = 0, stride, 2*stride, ...
    std::vector<std::vector<double>> snapshots;

    bool all_finite() const {
        for (const auto& s : snapshots)
            for (double v : s)
                if (!std::isfinite(v)) return false;
        return true;
    }
    /// Snapshot of time level m (requires stride 1).
    const std::vector<double>& at_level(int m) const { return snapshots[static_cast<std::size_t>(m)]; }
};

} // namespace cylwave
