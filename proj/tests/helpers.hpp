#pragma once

// Shared fixtures for the unit suites and the acceptance runner.

#include <array>
#include <cmath>

#include "cylwave/forward.hpp"
#include "cylwave/model.hpp"

namespace cylwave::testing {

inline Box3 outer_box() { return {{-1.8, -0.8, -0.8}, {1.8, 0.8, 0.8}}; }
inline Box3 inner_box() { return {{-1.6, -0.6, -0.6}, {1.6, 0.6, 0.6}}; }

/// Two-bump reference conductivity over unit background.
inline GaussianSum reference_phantom() {
    GaussianSum sum;
    sum.offset = 1.0;
    sum.terms = {
        {5.0, {0.5, 0.0, 0.0}, {0.2, 0.2, 0.2}},
        {5.0, {-1.0, 0.0, 0.0}, {0.2, 0.2, 0.2}},
    };
    return sum;
}

inline CosineTimePart reference_time_part() {
    return {0.01, {0.0, 0.0, 0.0}, {0.2, 0.2, 0.2}};
}

/// Unit-width Gaussian initial displacement centred at the origin.
inline ScalarField3 reference_theta0(const Grid3& grid) {
    return sample_field(grid, initial_pulse());
}

/// Small cube instance for the gradient-verification suites: interior mask
/// two nodes away from every face.
struct SmallInstance {
    Grid3 grid;
    RegionMask mask;
    static SmallInstance make() {
        SmallInstance s{build_grid(Box3{{0, 0, 0}, {0.7, 0.7, 0.7}}, 0.1), {}};
        s.mask = build_mask(s.grid, Box3{{0.2, 0.2, 0.2}, {0.5, 0.5, 0.5}});
        return s;
    }
};

/// Sub-grid |u| peak position along the +x1 half-axis (transverse centre).
/// Parabolic refinement around the lattice argmax.
inline double axial_peak_position(const Grid3& grid, const std::vector<double>& u, double x_min,
                                  double x_max) {
    const int jc = (grid.n[1] - 1) / 2;
    const int kc = (grid.n[2] - 1) / 2;
    int best_i = -1;
    double best_v = -1.0;
    for (int i = 0; i < grid.n[0]; ++i) {
        const double x = grid.coords(i, jc, kc)[0];
        if (x < x_min || x > x_max) continue;
        const double v = std::abs(u[grid.index(i, jc, kc)]);
        if (v > best_v) {
            best_v = v;
            best_i = i;
        }
    }
    const double xb = grid.coords(best_i, jc, kc)[0];
    if (best_i <= 0 || best_i >= grid.n[0] - 1) return xb;
    const double vm = std::abs(u[grid.index(best_i - 1, jc, kc)]);
    const double v0 = std::abs(u[grid.index(best_i, jc, kc)]);
    const double vp = std::abs(u[grid.index(best_i + 1, jc, kc)]);
    const double denom = vm - 2.0 * v0 + vp;
    if (denom == 0.0) return xb;
    return xb + 0.5 * grid.h * (vm - vp) / denom;
}

/// Distance travelled by the leading pulse between two recorded times for a
/// constant coefficient; the caller compares against sqrt(c) (t2 - t1).
inline double front_travel_distance(double c_value, double t1, double t2, double tau) {
    const Grid3 grid = build_grid(outer_box(), 0.1);
    ConductivityModel model(grid, std::vector<double>(grid.count(), c_value), CosineTimePart{},
                            c_value, t2);
    ScalarField3 theta0 =
        sample_field(grid, initial_pulse(1.0, {0, 0, 0}, {0.05, 0.05, 0.05}));
    ScalarField3 theta1(grid, 0.0);
    ForwardOptions opts;
    opts.tau = tau;
    opts.T = t2;
    opts.policy = BoundaryPolicy::NeumannAll;
    opts.history_stride = 1;
    const auto res = solve_forward(model, theta0, theta1, opts);
    const int m1 = static_cast<int>(std::lround(t1 / tau));
    const int m2 = static_cast<int>(std::lround(t2 / tau));
    const double r1 = axial_peak_position(grid, res.history.at_level(m1), 0.25, 1.75);
    const double r2 = axial_peak_position(grid, res.history.at_level(m2), r1 + 0.05, 1.75);
    return r2 - r1;
}

} // namespace cylwave::testing
