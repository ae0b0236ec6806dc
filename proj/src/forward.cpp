#include "cylwave/forward.hpp"

#include <cmath>
#include <string>

namespace cylwave {

namespace {

int checked_step_count(double T, double tau) {
    const double q = T / tau;
    const double r = std::round(q);
    if (!(tau > 0.0) || std::abs(q - r) > 1e-9 || r < 1.0) {
        throw ValidationError("time horizon is not an integer multiple of the time step");
    }
    return static_cast<int>(r);
}

bool finite_all(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

void sample_face(const std::vector<double>& u, const std::vector<std::size_t>& nodes, double* out) {
    for (std::size_t q = 0; q < nodes.size(); ++q) out[q] = u[nodes[q]];
}

} // namespace

int ForwardOptions::step_count() const { return checked_step_count(T, tau); }

StepBC step_bc(const ForwardOptions& opts, int m) {
    StepBC bc;
    const double t = opts.tau * m;
    switch (opts.policy) {
        case BoundaryPolicy::NeumannAll:
            break;
        case BoundaryPolicy::DirichletAll:
            for (auto& axis : bc.mode) axis[0] = axis[1] = FaceMode::Dirichlet;
            break;
        case BoundaryPolicy::PaperMixed: {
            const int fa = opts.front_axis;
            if (t <= opts.pulse.switch_time()) {
                bc.mode[fa][0] = FaceMode::Source;
                bc.source_value = opts.pulse(t);
            } else {
                bc.mode[fa][0] = FaceMode::Absorb;
            }
            bc.mode[fa][1] = FaceMode::Absorb;
            break;
        }
    }
    return bc;
}

ForwardResult solve_forward(const ConductivityModel& model, const ScalarField3& theta0,
                            const ScalarField3& theta1, const ForwardOptions& opts) {
    const Grid3& grid = model.grid();
    if (!theta0.grid.same_layout(grid) || !theta1.grid.same_layout(grid)) {
        throw ShapeMismatch("initial data grids do not match the model grid");
    }
    const int nt = opts.step_count();
    const auto cfl = cfl_check(model, grid.h, opts.tau);
    if (!cfl.ok) {
        throw CflViolation("time step " + std::to_string(opts.tau) +
                           " exceeds the stability bound " + std::to_string(cfl.tau_max));
    }

    const std::size_t n = grid.count();
    const bool par = opts.parallel;

    ForwardResult res;
    res.history.grid = grid;
    res.history.tau = opts.tau;
    res.history.steps = nt;
    res.history.stride = opts.history_stride;
    if (opts.record_front) {
        res.record.grid = grid;
        res.record.front_axis = opts.front_axis;
        res.record.tau = opts.tau;
        res.record.steps = nt;
        res.record.face_nodes = front_face_nodes(grid, opts.front_axis);
        res.record.samples.resize(res.record.levels() * res.record.node_count());
    }

    std::vector<double> u_prev = theta0.values;
    std::vector<double> u_curr(n), u_next(n), ct(n);

    const bool dirichlet = opts.policy == BoundaryPolicy::DirichletAll;
    if (dirichlet) {
        // Pin the initial data to the boundary values the scheme maintains.
        for (std::size_t idx = 0; idx < n; ++idx) {
            const auto ijk = grid.unpack(idx);
            if (grid.on_boundary(ijk[0], ijk[1], ijk[2])) u_prev[idx] = 0.0;
        }
    }

    auto keep = [&](int m, const std::vector<double>& u) {
        if (opts.record_front) sample_face(u, res.record.face_nodes, res.record.level(m));
        if (opts.history_stride > 0 && m % opts.history_stride == 0) {
            res.history.snapshots.push_back(u);
        }
    };

    model.fill_ctilde(0.0, ct.data());
    first_step(grid, opts.tau, ct.data(), u_prev.data(), theta1.values.data(), u_curr.data(),
               step_bc(opts, 0), par);
    keep(0, u_prev);
    keep(1, u_curr);

    for (int m = 1; m < nt; ++m) {
        const double t_m = opts.tau * m;
        model.fill_ctilde(t_m, ct.data());
        forward_step(grid, opts.tau, ct.data(), u_prev.data(), u_curr.data(), u_next.data(),
                     step_bc(opts, m), par);
        u_prev.swap(u_curr);
        u_curr.swap(u_next);
        keep(m + 1, u_curr);
        if ((m + 1) % 100 == 0 && !finite_all(u_curr)) {
            throw NonFiniteState("solution blew up at step " + std::to_string(m + 1));
        }
    }
    if (!finite_all(u_curr)) throw NonFiniteState("solution is not finite at the final step");
    return res;
}

BoundaryRecord solve_forward_tangent(const ConductivityModel& model, const ScalarField3& dc,
                                     const ScalarField3& theta0, const ScalarField3& theta1,
                                     const WaveHistory& u_hist, const ForwardOptions& opts) {
    const Grid3& grid = model.grid();
    if (!dc.grid.same_layout(grid)) throw ShapeMismatch("perturbation grid mismatch");
    if (u_hist.stride != 1 || !u_hist.grid.same_layout(grid)) {
        throw ShapeMismatch("tangent solve needs a stride-1 history on the model grid");
    }
    const int nt = opts.step_count();
    if (static_cast<int>(u_hist.snapshots.size()) != nt + 1) {
        throw ShapeMismatch("history level count does not match the horizon");
    }

    const std::size_t n = grid.count();
    const bool par = opts.parallel;
    const double tau2 = opts.tau * opts.tau;

    BoundaryRecord rec;
    rec.grid = grid;
    rec.front_axis = opts.front_axis;
    rec.tau = opts.tau;
    rec.steps = nt;
    rec.face_nodes = front_face_nodes(grid, opts.front_axis);
    rec.samples.resize(rec.levels() * rec.node_count());

    std::vector<double> du_prev(n, 0.0), du_curr(n), du_next(n), ct(n), forcing(n);

    // Tangent of the start-up step: the prescribed flux does not depend on the
    // coefficient, so Source faces reduce to Reflect for the tangent state.
    auto tangent_bc = [&](int m) {
        StepBC bc = step_bc(opts, m);
        for (auto& axis : bc.mode)
            for (auto& side : axis)
                if (side == FaceMode::Source) side = FaceMode::Reflect;
        bc.source_value = 0.0;
        return bc;
    };

    const StepBC bc0 = step_bc(opts, 0);
    model.fill_ctilde(0.0, ct.data());
    tangent_forcing(grid, opts.tau, dc.values.data(), theta0.values.data(), theta1.values.data(),
                    VelocitySource::DirectField, forcing.data(), bc0, par);
    for (std::size_t i = 0; i < n; ++i) du_curr[i] = 0.5 * tau2 * forcing[i];

    sample_face(du_prev, rec.face_nodes, rec.level(0));
    sample_face(du_curr, rec.face_nodes, rec.level(1));

    for (int m = 1; m < nt; ++m) {
        const double t_m = opts.tau * m;
        model.fill_ctilde(t_m, ct.data());
        const StepBC bc_m = step_bc(opts, m);
        forward_step(grid, opts.tau, ct.data(), du_prev.data(), du_curr.data(), du_next.data(),
                     tangent_bc(m), par);
        tangent_forcing(grid, opts.tau, dc.values.data(), u_hist.at_level(m).data(),
                        u_hist.at_level(m - 1).data(), VelocitySource::BackwardDifference,
                        forcing.data(), bc_m, par);
        for (std::size_t i = 0; i < n; ++i) du_next[i] += tau2 * forcing[i];
        du_prev.swap(du_curr);
        du_curr.swap(du_next);
        sample_face(du_curr, rec.face_nodes, rec.level(m + 1));
    }
    return rec;
}

} // namespace cylwave
