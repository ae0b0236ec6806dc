#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cylwave/errors.hpp"

namespace cylwave {

/// Axis-aligned box in dimensionless coordinates.
struct Box3 {
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};

    double extent(int axis) const { return hi[axis] - lo[axis]; }
    bool contains(const std::array<double, 3>& x, double tol = 0.0) const {
        for (int d = 0; d < 3; ++d) {
            if (x[d] < lo[d] - tol || x[d] > hi[d] + tol) return false;
        }
        return true;
    }
};

/// Uniform node-centered grid over a box. Nodes sit at lo + h*(i,j,k),
/// including both endpoint planes of every axis.
struct Grid3 {
    Box3 box{};
    double h = 0.0;
    std::array<int, 3> n{};

    std::size_t count() const {
        return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) *
               static_cast<std::size_t>(n[2]);
    }
    // x-fastest linear index
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(n[0]) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(n[1]) * k);
    }
    std::array<int, 3> unpack(std::size_t idx) const {
        const int i = static_cast<int>(idx % n[0]);
        const std::size_t r = idx / n[0];
        const int j = static_cast<int>(r % n[1]);
        const int k = static_cast<int>(r / n[1]);
        return {i, j, k};
    }
    std::array<double, 3> coords(int i, int j, int k) const {
        return {box.lo[0] + h * i, box.lo[1] + h * j, box.lo[2] + h * k};
    }
    std::array<double, 3> coords(std::size_t idx) const {
        const auto ijk = unpack(idx);
        return coords(ijk[0], ijk[1], ijk[2]);
    }
    /// Nearest node to an arbitrary point (clamped to the grid).
    std::array<int, 3> nearest(const std::array<double, 3>& x) const;

    bool on_boundary(int i, int j, int k) const {
        return i == 0 || i == n[0] - 1 || j == 0 || j == n[1] - 1 || k == 0 || k == n[2] - 1;
    }
    bool same_layout(const Grid3& other, double tol = 1e-12) const;
};

/// Builds the grid for a box whose extents are integer multiples of h.
/// Throws NonDivisibleExtent otherwise.
Grid3 build_grid(const Box3& box, double h);

/// Boundary face ownership. S1 is the observation (front) face, S2 the back
/// face, S3 the lateral faces; edge and corner nodes resolve S1 > S2 > S3.
enum class FaceClass : std::uint8_t { S1Front, S2Back, S3Lateral };

/// Face tag of a node, or nullopt for interior nodes. front_axis selects the
/// axis whose lo/hi planes are S1/S2.
std::optional<FaceClass> classify_face(const Grid3& grid, std::size_t node, int front_axis = 0);

/// Linear indices of all S1 nodes, in increasing index order.
std::vector<std::size_t> front_face_nodes(const Grid3& grid, int front_axis = 0);

/// One real value per grid node, x-fastest.
struct ScalarField3 {
    Grid3 grid{};
    std::vector<double> values;

    ScalarField3() = default;
    explicit ScalarField3(const Grid3& g, double fill = 0.0)
        : grid(g), values(g.count(), fill) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    bool all_finite() const;
};

/// Indicator of the inner inversion region on a grid.
struct RegionMask {
    Grid3 grid{};
    std::vector<std::uint8_t> inside;   // one flag per node
    std::vector<std::size_t> nodes;     // indices with inside != 0, ascending

    std::size_t count() const { return nodes.size(); }
};

/// Marks the nodes lying in the closed inner box. The inner box must be
/// strictly contained in the grid box (degenerate inner boxes with lo == hi
/// are allowed and select a single plane/node).
RegionMask build_mask(const Grid3& grid, const Box3& inner);

} // namespace cylwave
