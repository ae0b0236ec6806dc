#include <doctest.h>

#include <cmath>

#include "cylwave/forward.hpp"
#include "helpers.hpp"

using namespace cylwave;
using namespace cylwave::testing;

namespace {

ConductivityModel phantom_model(const Grid3& grid, double horizon) {
    return ConductivityModel::from_analytic(grid, reference_phantom(), reference_time_part(), 1.0,
                                            horizon);
}

} // namespace

TEST_CASE("evaluate_ctilde against direct formula") {
    const Grid3 grid = build_grid(outer_box(), 0.1);
    const auto model = phantom_model(grid, 3.0);
    const auto phantom = reference_phantom();
    const auto timepart = reference_time_part();

    const std::size_t origin = grid.index(18, 8, 8);
    const std::size_t peak = grid.index(23, 8, 8); // (0.5, 0, 0)

    // oracle: direct evaluation of the two analytic formulas
    const double at_origin = phantom({0, 0, 0}) + timepart({0, 0, 0}, 0.0);
    const double at_peak = phantom({0.5, 0, 0}) + timepart({0.5, 0, 0}, 0.0);
    CHECK(evaluate_ctilde(model, origin, 0.0) == doctest::Approx(at_origin).epsilon(1e-12));
    CHECK(evaluate_ctilde(model, peak, 0.0) == doctest::Approx(at_peak).epsilon(1e-12));

    CHECK(evaluate_ctilde(model, origin, 0.0) == doctest::Approx(2.4762).epsilon(5e-4));
    CHECK(evaluate_ctilde(model, peak, 0.0) == doctest::Approx(6.0029).epsilon(5e-4));

    // background with suppressed time part
    ConductivityModel flat(grid, std::vector<double>(grid.count(), 1.0), CosineTimePart{}, 1.0,
                           3.0);
    CHECK(evaluate_ctilde(flat, origin, 1.7) == 1.0);

    CHECK_THROWS_AS(evaluate_ctilde(model, grid.count(), 0.0), IndexOutOfRange);
}

TEST_CASE("cfl_check bounds") {
    const Grid3 grid = build_grid(outer_box(), 0.1);
    const auto model = phantom_model(grid, 3.0);

    const auto rep = cfl_check(model, grid.h, 0.003);
    CHECK(rep.ok);
    // oracle: formula with the sampled coefficient maximum
    const double expected = 0.1 / (std::sqrt(3.0) * std::sqrt(model.ctilde_max()));
    CHECK(rep.tau_max == doctest::Approx(expected).epsilon(1e-14));
    CHECK(rep.tau_max == doctest::Approx(0.0236).epsilon(2e-3));

    ConductivityModel unit(grid, std::vector<double>(grid.count(), 1.0), CosineTimePart{}, 1.0,
                           3.0);
    const auto unit_rep = cfl_check(unit, 0.1, 0.003);
    CHECK(unit_rep.tau_max == doctest::Approx(0.1 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK_FALSE(cfl_check(unit, 0.1, 0.1).ok);
}

TEST_CASE("zero data produces the zero solution exactly") {
    const Grid3 grid = build_grid(Box3{{0, 0, 0}, {0.5, 0.5, 0.5}}, 0.1);
    ConductivityModel model(grid, std::vector<double>(grid.count(), 1.0), CosineTimePart{}, 1.0,
                            0.3);
    ScalarField3 zero(grid, 0.0);
    ForwardOptions opts;
    opts.tau = 0.003;
    opts.T = 0.3;
    opts.pulse.omega_p = 1e9; // pulse support ends before the first step
    opts.history_stride = 1;
    const auto res = solve_forward(model, zero, zero, opts);
    for (const auto& snap : res.history.snapshots) {
        for (double v : snap) CHECK(v == 0.0);
    }
    for (double v : res.record.samples) CHECK(v == 0.0);
}

TEST_CASE("reference run stays finite and produces data") {
    const Grid3 grid = build_grid(outer_box(), 0.1);
    const auto model = phantom_model(grid, 3.0);
    const ScalarField3 theta0 = reference_theta0(grid);
    const ScalarField3 theta1(grid, 0.0);
    ForwardOptions opts;
    opts.tau = 0.003;
    opts.T = 3.0;
    opts.pulse.omega_p = 40.0;
    opts.history_stride = 0;
    const auto res = solve_forward(model, theta0, theta1, opts);
    CHECK(res.record.steps == 1000);
    CHECK(res.record.node_count() == 289);
    CHECK(res.record.samples.size() == 1001u * 289u);
    double peak = 0.0;
    for (double v : res.record.samples) peak = std::max(peak, std::abs(v));
    CHECK(peak > 1e-3);
    CHECK(std::isfinite(peak));
}

TEST_CASE("discrete energy is conserved with reflecting boundaries") {
    const Grid3 grid = build_grid(outer_box(), 0.1);
    // time-independent coefficient: phantom space part only
    auto model = ConductivityModel::from_analytic(grid, reference_phantom(), CosineTimePart{},
                                                  1.0, 3.0);
    const ScalarField3 theta0 = reference_theta0(grid);
    const ScalarField3 theta1(grid, 0.0);
    ForwardOptions opts;
    opts.tau = 0.003;
    opts.T = 3.0; // 1000 steps
    opts.policy = BoundaryPolicy::NeumannAll;
    opts.history_stride = 1;
    const auto res = solve_forward(model, theta0, theta1, opts);

    std::vector<double> ct(grid.count());
    model.fill_ctilde(0.0, ct.data());
    double e0 = 0.0, drift = 0.0;
    for (int m = 0; m + 1 <= 1000; m += 100) {
        const double e = discrete_energy(grid, opts.tau, ct.data(),
                                         res.history.at_level(m).data(),
                                         res.history.at_level(m + 1).data(), true);
        if (m == 0) {
            e0 = e;
            CHECK(e0 > 0.0);
        } else {
            drift = std::max(drift, std::abs(e - e0) / e0);
        }
    }
    CHECK(drift <= 1e-8);
}

TEST_CASE("solution keeps even symmetry in the transverse axes") {
    const Grid3 grid = build_grid(outer_box(), 0.1);
    // bitwise-symmetric inputs: mirror one octant of the sampled fields
    auto symmetrize = [&](ScalarField3& f) {
        for (int k = 0; k < grid.n[2]; ++k)
            for (int j = 0; j < grid.n[1]; ++j)
                for (int i = 0; i < grid.n[0]; ++i) {
                    const int jm = std::min(j, grid.n[1] - 1 - j);
                    const int km = std::min(k, grid.n[2] - 1 - k);
                    f.values[grid.index(i, j, k)] = f.values[grid.index(i, jm, km)];
                }
    };
    ScalarField3 space = sample_field(grid, reference_phantom());
    symmetrize(space);
    ConductivityModel model(grid, space.values, CosineTimePart{}, 1.0, 0.9);
    ScalarField3 theta0 = reference_theta0(grid);
    symmetrize(theta0);
    const ScalarField3 theta1(grid, 0.0);

    ForwardOptions opts;
    opts.tau = 0.003;
    opts.T = 0.9; // 300 steps
    opts.pulse.omega_p = 40.0;
    opts.history_stride = 1;
    const auto res = solve_forward(model, theta0, theta1, opts);

    double worst = 0.0;
    for (const auto& u : res.history.snapshots) {
        for (int k = 0; k < grid.n[2]; ++k)
            for (int j = 0; j < grid.n[1]; ++j)
                for (int i = 0; i < grid.n[0]; ++i) {
                    const double v = u[grid.index(i, j, k)];
                    const double vj = u[grid.index(i, grid.n[1] - 1 - j, k)];
                    const double vk = u[grid.index(i, j, grid.n[2] - 1 - k)];
                    worst = std::max({worst, std::abs(v - vj), std::abs(v - vk)});
                }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("constant-coefficient front speed") {
    // travel distance between two sampled times vs sqrt(c) (t2 - t1), 2h slack
    const double d4 = front_travel_distance(4.0, 0.20, 0.45, 0.0025);
    CHECK(std::abs(d4 - 2.0 * 0.25) <= 0.2);
    const double d1 = front_travel_distance(1.0, 0.40, 0.90, 0.0025);
    CHECK(std::abs(d1 - 1.0 * 0.50) <= 0.2);
}

TEST_CASE("blow-up detection raises NonFiniteState") {
    const Grid3 grid = build_grid(Box3{{0, 0, 0}, {0.5, 0.5, 0.5}}, 0.1);
    ConductivityModel model(grid, std::vector<double>(grid.count(), 1.0), CosineTimePart{}, 1.0,
                            0.36);
    ScalarField3 theta0(grid);
    for (std::size_t idx = 0; idx < grid.count(); ++idx) {
        theta0.values[idx] = (idx % 2 == 0 ? 1.0 : -1.0) * 1e308;
    }
    const ScalarField3 theta1(grid, 0.0);
    ForwardOptions opts;
    opts.tau = 0.003;
    opts.T = 0.36; // 120 steps, finiteness checked at step 100
    opts.history_stride = 0;
    CHECK_THROWS_AS(solve_forward(model, theta0, theta1, opts), NonFiniteState);
}

TEST_CASE("cfl violation is rejected before stepping") {
    const Grid3 grid = build_grid(Box3{{0, 0, 0}, {0.5, 0.5, 0.5}}, 0.1);
    ConductivityModel model(grid, std::vector<double>(grid.count(), 1.0), CosineTimePart{}, 1.0,
                            1.0);
    const ScalarField3 zero(grid, 0.0);
    ForwardOptions opts;
    opts.tau = 0.1;
    opts.T = 1.0;
    CHECK_THROWS_AS(solve_forward(model, zero, zero, opts), CflViolation);
}
