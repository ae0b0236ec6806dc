// Times the hot kernels on the serial reference path and the OpenMP path.
// Run: ./stencil_bench [nodes_per_axis] [steps]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "cylwave/adjoint.hpp"
#include "cylwave/kernels.hpp"

using namespace cylwave;

namespace {

double time_steps(const Grid3& grid, int steps, bool parallel) {
    const std::size_t n = grid.count();
    std::vector<double> ct(n, 1.5), u_prev(n, 0.0), u_curr(n), u_next(n);
    for (std::size_t i = 0; i < n; ++i) u_curr[i] = 1e-3 * static_cast<double>(i % 97);
    StepBC bc;
    bc.mode[0][0] = FaceMode::Absorb;
    bc.mode[0][1] = FaceMode::Absorb;
    const double tau = 0.2 * grid.h;

    const auto t0 = std::chrono::steady_clock::now();
    for (int m = 0; m < steps; ++m) {
        forward_step(grid, tau, ct.data(), u_prev.data(), u_curr.data(), u_next.data(), bc,
                     parallel);
        u_prev.swap(u_curr);
        u_curr.swap(u_next);
    }
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

double time_reduction(const Grid3& grid, int reps, bool parallel) {
    const std::size_t n = grid.count();
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = 1e-3 * static_cast<double>(i % 101);
        b[i] = 1e-3 * static_cast<double>(i % 89);
    }
    volatile double sink = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) sink += blocked_dot(a.data(), b.data(), n, parallel);
    const auto t1 = std::chrono::steady_clock::now();
    (void)sink;
    return std::chrono::duration<double>(t1 - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    const int nside = argc > 1 ? std::atoi(argv[1]) : 96;
    const int steps = argc > 2 ? std::atoi(argv[2]) : 50;

    Box3 box{{0, 0, 0}, {1, 1, 1}};
    const Grid3 grid = build_grid(box, 1.0 / (nside - 1));
    const double node_steps = static_cast<double>(grid.count()) * steps;

    std::printf("grid %dx%dx%d, %d steps\n", grid.n[0], grid.n[1], grid.n[2], steps);

    const double ts = time_steps(grid, steps, false);
    std::printf("forward_step  serial   %8.3f s   %6.2f ns/node-step\n", ts,
                1e9 * ts / node_steps);
    const double tp = time_steps(grid, steps, true);
    std::printf("forward_step  openmp   %8.3f s   %6.2f ns/node-step   speedup %.2fx\n", tp,
                1e9 * tp / node_steps, ts / tp);

    const int reps = 200;
    const double rs = time_reduction(grid, reps, false);
    const double rp = time_reduction(grid, reps, true);
    std::printf("blocked_dot   serial   %8.3f s\n", rs);
    std::printf("blocked_dot   openmp   %8.3f s   speedup %.2fx\n", rp, rs / rp);
    return 0;
}
