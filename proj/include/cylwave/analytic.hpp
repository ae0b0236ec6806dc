#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "cylwave/grid.hpp"

namespace cylwave {

/// Anisotropic Gaussian bump A * exp(-sum_d (x_d - c_d)^2 / w_d).
/// Widths are the exponent denominators, not standard deviations.
struct Gaussian3 {
    double amplitude = 0.0;
    std::array<double, 3> center{};
    std::array<double, 3> widths{1.0, 1.0, 1.0};

    double operator()(const std::array<double, 3>& x) const {
        double e = 0.0;
        for (int d = 0; d < 3; ++d) {
            const double r = x[d] - center[d];
            e += r * r / widths[d];
        }
        return amplitude * std::exp(-e);
    }
    std::array<double, 3> gradient(const std::array<double, 3>& x) const {
        const double v = (*this)(x);
        std::array<double, 3> g{};
        for (int d = 0; d < 3; ++d) g[d] = -2.0 * (x[d] - center[d]) / widths[d] * v;
        return g;
    }
};

/// offset + sum of Gaussian bumps; carrier for the phantom conductivity.
struct GaussianSum {
    double offset = 0.0;
    std::vector<Gaussian3> terms;

    double operator()(const std::array<double, 3>& x) const {
        double v = offset;
        for (const auto& t : terms) v += t(x);
        return v;
    }
    std::array<double, 3> gradient(const std::array<double, 3>& x) const {
        std::array<double, 3> g{};
        for (const auto& t : terms) {
            const auto tg = t.gradient(x);
            for (int d = 0; d < 3; ++d) g[d] += tg[d];
        }
        return g;
    }
};

/// Known time-dependent conductivity part amplitude * cos(t) * G(x).
/// Odd time derivatives vanish at t = 0.
struct CosineTimePart {
    double amplitude = 0.0;
    std::array<double, 3> center{};
    std::array<double, 3> widths{1.0, 1.0, 1.0};

    double spatial(const std::array<double, 3>& x) const {
        Gaussian3 g{1.0, center, widths};
        return g(x);
    }
    double operator()(const std::array<double, 3>& x, double t) const {
        return amplitude * std::cos(t) * spatial(x);
    }
};

using SpaceTimeFn = std::function<double(const std::array<double, 3>&, double)>;

/// Samples a spatial function at every grid node.
template <class Fn>
ScalarField3 sample_field(const Grid3& grid, Fn&& fn) {
    ScalarField3 f(grid);
    for (std::size_t idx = 0; idx < grid.count(); ++idx) f.values[idx] = fn(grid.coords(idx));
    return f;
}

/// Initial displacement exp(-(x1^2 + x2^2 + x3^2)) scaled and shifted.
/// literal_cubic swaps the last square for a cube (legacy variant).
inline std::function<double(const std::array<double, 3>&)>
initial_pulse(double amplitude = 1.0, std::array<double, 3> center = {0, 0, 0},
              std::array<double, 3> widths = {1, 1, 1}, bool literal_cubic = false) {
    return [=](const std::array<double, 3>& x) {
        const double r0 = x[0] - center[0];
        const double r1 = x[1] - center[1];
        const double r2 = x[2] - center[2];
        const double last = literal_cubic ? r2 * r2 * r2 : r2 * r2;
        return amplitude * std::exp(-(r0 * r0 / widths[0] + r1 * r1 / widths[1] + last / widths[2]));
    };
}

/// Cubic smoothstep on [0,1].
inline double smoothstep(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * (3.0 - 2.0 * x);
}

} // namespace cylwave
