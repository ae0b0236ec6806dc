#include "cylwave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cylwave {

namespace {

int checked_node_count(double extent, double h, int axis) {
    const double q = extent / h;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9 || r < 1.0) {
        throw NonDivisibleExtent("grid extent on axis " + std::to_string(axis) +
                                 " is not an integer multiple of h (extent=" +
                                 std::to_string(extent) + ", h=" + std::to_string(h) + ")");
    }
    return static_cast<int>(r) + 1;
}

} // namespace

std::array<int, 3> Grid3::nearest(const std::array<double, 3>& x) const {
    std::array<int, 3> out{};
    for (int d = 0; d < 3; ++d) {
        const int i = static_cast<int>(std::lround((x[d] - box.lo[d]) / h));
        out[d] = std::clamp(i, 0, n[d] - 1);
    }
    return out;
}

bool Grid3::same_layout(const Grid3& other, double tol) const {
    if (n != other.n) return false;
    if (std::abs(h - other.h) > tol) return false;
    for (int d = 0; d < 3; ++d) {
        if (std::abs(box.lo[d] - other.box.lo[d]) > tol) return false;
        if (std::abs(box.hi[d] - other.box.hi[d]) > tol) return false;
    }
    return true;
}

Grid3 build_grid(const Box3& box, double h) {
    if (!(h > 0.0)) throw NonDivisibleExtent("grid spacing must be positive");
    for (int d = 0; d < 3; ++d) {
        if (!(box.lo[d] < box.hi[d])) {
            throw NonDivisibleExtent("box has empty extent on axis " + std::to_string(d));
        }
    }
    Grid3 g;
    g.box = box;
    g.h = h;
    for (int d = 0; d < 3; ++d) g.n[d] = checked_node_count(box.extent(d), h, d);
    return g;
}

std::optional<FaceClass> classify_face(const Grid3& grid, std::size_t node, int front_axis) {
    if (node >= grid.count()) throw IndexOutOfRange("node index out of range");
    const auto ijk = grid.unpack(node);
    if (ijk[front_axis] == 0) return FaceClass::S1Front;
    if (ijk[front_axis] == grid.n[front_axis] - 1) return FaceClass::S2Back;
    if (grid.on_boundary(ijk[0], ijk[1], ijk[2])) return FaceClass::S3Lateral;
    return std::nullopt;
}

std::vector<std::size_t> front_face_nodes(const Grid3& grid, int front_axis) {
    std::vector<std::size_t> out;
    out.reserve(grid.count() / grid.n[front_axis]);
    for (std::size_t idx = 0; idx < grid.count(); ++idx) {
        if (grid.unpack(idx)[front_axis] == 0) out.push_back(idx);
    }
    return out;
}

bool ScalarField3::all_finite() const {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

RegionMask build_mask(const Grid3& grid, const Box3& inner) {
    for (int d = 0; d < 3; ++d) {
        if (!(inner.lo[d] <= inner.hi[d])) throw InnerNotContained("inner box is inverted");
        if (!(inner.lo[d] > grid.box.lo[d] && inner.hi[d] < grid.box.hi[d])) {
            throw InnerNotContained("inner box must be strictly inside the grid box");
        }
    }
    RegionMask mask;
    mask.grid = grid;
    mask.inside.assign(grid.count(), 0);
    const double tol = grid.h * 1e-9;
    for (std::size_t idx = 0; idx < grid.count(); ++idx) {
        if (inner.contains(grid.coords(idx), tol)) {
            mask.inside[idx] = 1;
            mask.nodes.push_back(idx);
        }
    }
    if (mask.nodes.empty()) throw InnerNotContained("inner box contains no grid nodes");
    return mask;
}

} // namespace cylwave
