#include <doctest.h>

#include <cmath>

#include "cylwave/forward.hpp"
#include "helpers.hpp"

using namespace cylwave;
using namespace cylwave::testing;

namespace {

std::vector<double> run_reference(bool parallel) {
    const Grid3 grid = build_grid(outer_box(), 0.1);
    auto model = ConductivityModel::from_analytic(grid, reference_phantom(),
                                                  reference_time_part(), 1.0, 0.3);
    const ScalarField3 theta0 = reference_theta0(grid);
    const ScalarField3 theta1(grid, 0.0);
    ForwardOptions opts;
    opts.tau = 0.003;
    opts.T = 0.3;
    opts.pulse.omega_p = 40.0;
    opts.history_stride = 0;
    opts.parallel = parallel;
    return solve_forward(model, theta0, theta1, opts).record.samples;
}

} // namespace

TEST_CASE("openmp and serial paths agree bitwise on a full solve") {
    const auto serial = run_reference(false);
    const auto parallel = run_reference(true);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i] == parallel[i]); // exact: same arithmetic per node
    }
}

TEST_CASE("blocked reductions are identical across execution paths") {
    std::vector<double> a(100003), b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = std::sin(0.001 * static_cast<double>(i)) * 1e3;
        b[i] = std::cos(0.0017 * static_cast<double>(i));
    }
    CHECK(blocked_sum(a.data(), a.size(), true) == blocked_sum(a.data(), a.size(), false));
    CHECK(blocked_dot(a.data(), b.data(), a.size(), true) ==
          blocked_dot(a.data(), b.data(), a.size(), false));
}

TEST_CASE("adjoint kernel agrees across execution paths") {
    const Grid3 grid = build_grid(Box3{{0, 0, 0}, {0.7, 0.7, 0.7}}, 0.1);
    const std::size_t n = grid.count();
    std::vector<double> ct(n), ct1(n), lam1(n), lam2(n), out_s(n), out_p(n);
    for (std::size_t i = 0; i < n; ++i) {
        ct[i] = 1.0 + 0.1 * std::sin(0.37 * static_cast<double>(i));
        ct1[i] = 1.0 + 0.1 * std::cos(0.21 * static_cast<double>(i));
        lam1[i] = std::sin(0.13 * static_cast<double>(i));
        lam2[i] = std::cos(0.29 * static_cast<double>(i));
    }
    StepBC bc;
    bc.mode[0][0] = FaceMode::Absorb;
    bc.mode[0][1] = FaceMode::Absorb;
    adjoint_step(grid, 0.003, ct.data(), ct1.data(), lam1.data(), lam2.data(), out_s.data(), bc,
                 bc, false);
    adjoint_step(grid, 0.003, ct.data(), ct1.data(), lam1.data(), lam2.data(), out_p.data(), bc,
                 bc, true);
    for (std::size_t i = 0; i < n; ++i) CHECK(out_s[i] == out_p[i]);
}
