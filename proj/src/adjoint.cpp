#include "cylwave/adjoint.hpp"

#include <cmath>

#include "cylwave/analytic.hpp"

namespace cylwave {

double data_cutoff(double t, double T) {
    constexpr double kWindow = 0.1;
    const double decay_start = T - kWindow;
    const double zero_start = T - 0.5 * kWindow;
    if (t <= decay_start) return 1.0;
    if (t >= zero_start) return 0.0;
    return 1.0 - smoothstep((t - decay_start) / (0.5 * kWindow));
}

double tikhonov_misfit(const BoundaryRecord& u_rec, const BoundaryRecord& u_obs,
                       const ScalarField3& c, const ScalarField3& c_guess, double gamma_reg,
                       const RegionMask& mask) {
    if (!u_rec.same_shape(u_obs)) throw ShapeMismatch("boundary records differ in shape");
    if (!c.grid.same_layout(c_guess.grid)) throw ShapeMismatch("coefficient grids differ");
    const double h = u_rec.grid.h;
    const double T = u_rec.tau * u_rec.steps;

    double data_term = 0.0;
    for (int m = 0; m <= u_rec.steps; ++m) {
        const double z = data_cutoff(u_rec.time_of(m), T);
        if (z == 0.0) continue;
        const double* a = u_rec.level(m);
        const double* b = u_obs.level(m);
        double s = 0.0;
        for (std::size_t q = 0; q < u_rec.node_count(); ++q) {
            const double r = a[q] - b[q];
            s += r * r;
        }
        data_term += z * s;
    }
    data_term *= 0.5 * h * h * u_rec.tau;

    double reg_term = 0.0;
    for (std::size_t idx : mask.nodes) {
        const double r = c.values[idx] - c_guess.values[idx];
        reg_term += r * r;
    }
    reg_term *= 0.5 * gamma_reg * h * h * h;
    return data_term + reg_term;
}

MisfitResidual misfit_residual(const BoundaryRecord& u_rec, const BoundaryRecord& u_obs) {
    if (!u_rec.same_shape(u_obs)) throw ShapeMismatch("boundary records differ in shape");
    MisfitResidual r = u_rec;
    const double T = u_rec.tau * u_rec.steps;
    for (int m = 0; m <= u_rec.steps; ++m) {
        const double z = data_cutoff(u_rec.time_of(m), T);
        double* out = r.level(m);
        const double* a = u_rec.level(m);
        const double* b = u_obs.level(m);
        for (std::size_t q = 0; q < r.node_count(); ++q) out[q] = (a[q] - b[q]) * z;
    }
    return r;
}

WaveHistory solve_adjoint(const ConductivityModel& model, const MisfitResidual& residual,
                          const ForwardOptions& opts) {
    const Grid3& grid = model.grid();
    const int nt = opts.step_count();
    if (!residual.grid.same_layout(grid) || residual.steps != nt ||
        residual.front_axis != opts.front_axis) {
        throw ShapeMismatch("residual does not match the forward run layout");
    }

    const std::size_t n = grid.count();
    const bool par = opts.parallel;
    const double load_scale = grid.h * grid.h * opts.tau; // h^2 tau per face sample

    WaveHistory lam;
    lam.grid = grid;
    lam.tau = opts.tau;
    lam.steps = nt;
    lam.stride = 1;
    lam.snapshots.assign(static_cast<std::size_t>(nt) + 1, std::vector<double>(n, 0.0));

    auto inject = [&](int m, std::vector<double>& level) {
        const double* r = residual.level(m);
        for (std::size_t q = 0; q < residual.face_nodes.size(); ++q) {
            level[residual.face_nodes[q]] += load_scale * r[q];
        }
    };

    // lam^{Nt} = b^{Nt}
    inject(nt, lam.snapshots[static_cast<std::size_t>(nt)]);

    std::vector<double> ct_k(n), ct_k1(n);
    std::vector<double> zeros(n, 0.0);

    for (int k = nt - 1; k >= 1; --k) {
        model.fill_ctilde(opts.tau * k, ct_k.data());
        model.fill_ctilde(opts.tau * (k + 1), ct_k1.data());
        const double* lam_next = lam.snapshots[static_cast<std::size_t>(k) + 1].data();
        const double* lam_next2 =
            k + 2 <= nt ? lam.snapshots[static_cast<std::size_t>(k) + 2].data() : zeros.data();
        adjoint_step(grid, opts.tau, ct_k.data(), ct_k1.data(), lam_next, lam_next2,
                     lam.snapshots[static_cast<std::size_t>(k)].data(), step_bc(opts, k),
                     step_bc(opts, k + 1), par);
        inject(k, lam.snapshots[static_cast<std::size_t>(k)]);
    }
    if (!lam.all_finite()) throw NonFiniteState("adjoint state is not finite");
    return lam;
}

ScalarField3 assemble_gradient(const WaveHistory& u_hist, const WaveHistory& lam_hist,
                               const ScalarField3& c, const ScalarField3& c_guess,
                               double gamma_reg, const RegionMask& mask,
                               const ScalarField3& theta0, const ScalarField3& theta1,
                               const ForwardOptions& opts) {
    const Grid3& grid = u_hist.grid;
    const int nt = opts.step_count();
    if (!lam_hist.grid.same_layout(grid) || !mask.grid.same_layout(grid) ||
        !c.grid.same_layout(grid) || !c_guess.grid.same_layout(grid)) {
        throw ShapeMismatch("gradient assembly inputs live on different grids");
    }
    if (u_hist.stride != 1 || lam_hist.stride != 1 ||
        static_cast<int>(u_hist.snapshots.size()) != nt + 1 ||
        static_cast<int>(lam_hist.snapshots.size()) != nt + 1) {
        throw ShapeMismatch("gradient assembly needs stride-1 histories over the horizon");
    }

    const bool par = opts.parallel;
    ScalarField3 g(grid, 0.0);
    const double h3 = grid.h * grid.h * grid.h;
    for (std::size_t idx : mask.nodes) {
        g.values[idx] = gamma_reg * (c.values[idx] - c_guess.values[idx]) * h3;
    }

    // Start-up level: weight 1/2, state theta0, velocity theta1.
    accumulate_gradient_step(grid, mask, opts.tau, 0.5, theta0.values.data(),
                             theta1.values.data(), VelocitySource::DirectField,
                             lam_hist.at_level(1).data(), step_bc(opts, 0), g.values.data(), par);
    for (int m = 1; m < nt; ++m) {
        accumulate_gradient_step(grid, mask, opts.tau, 1.0, u_hist.at_level(m).data(),
                                 u_hist.at_level(m - 1).data(),
                                 VelocitySource::BackwardDifference,
                                 lam_hist.at_level(m + 1).data(), step_bc(opts, m),
                                 g.values.data(), par);
    }
    return g;
}

} // namespace cylwave
