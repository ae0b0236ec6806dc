#include "cylwave/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace cylwave {

namespace {

double mask_norm2(const ScalarField3& g, bool parallel) {
    return std::sqrt(blocked_dot(g.values.data(), g.values.data(), g.values.size(), parallel));
}

double mask_inf_norm(const ScalarField3& g) {
    double m = 0.0;
    for (double v : g.values) m = std::max(m, std::abs(v));
    return m;
}

double max_on_mask(const ScalarField3& c, const RegionMask& mask) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t idx : mask.nodes) m = std::max(m, c.values[idx]);
    return m;
}

BoundaryRecord truncate_record(const BoundaryRecord& data, int steps) {
    if (steps > data.steps) throw DataMismatch("record is shorter than the inversion horizon");
    if (steps == data.steps) return data;
    BoundaryRecord out = data;
    out.steps = steps;
    out.samples.assign(data.samples.begin(),
                       data.samples.begin() +
                           static_cast<std::ptrdiff_t>(out.levels() * out.node_count()));
    return out;
}

} // namespace

ScalarField3 project_admissible(const ScalarField3& c, double c_low, double c_high) {
    ScalarField3 out = c;
    for (double& v : out.values) v = std::clamp(v, c_low, c_high);
    return out;
}

double contrast_error(const ScalarField3& c_rec, const RegionMask& mask, double c_true_max) {
    if (!(c_true_max > 0.0)) throw ValidationError("true maximal contrast must be positive");
    return 100.0 * std::abs(max_on_mask(c_rec, mask) - c_true_max) / c_true_max;
}

ScalarField3 postprocess(const ScalarField3& c, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw ValidationError("post-processing fraction must lie in (0,1)");
    }
    double cmax = -std::numeric_limits<double>::infinity();
    for (double v : c.values) cmax = std::max(cmax, v);
    const double threshold = 1.0 + fraction * (cmax - 1.0);
    ScalarField3 out = c;
    for (double& v : out.values) {
        if (v < threshold) v = 1.0;
        v = std::clamp(v, 1.0, 10.0);
    }
    return out;
}

InversionResult invert(const InverseConfig& config, const BoundaryRecord& data,
                       const KnownParts& known, const Grid3& grid, const RegionMask& mask) {
    if (!data.grid.same_layout(grid) || !mask.grid.same_layout(grid)) {
        throw DataMismatch("observation record does not match the inversion grid");
    }
    if (data.front_axis != known.front_axis) {
        throw DataMismatch("observation face does not match the configured front axis");
    }
    if (!(config.c_low < config.c_high)) throw ValidationError("admissible bounds are inverted");
    if (config.gamma_reg < 0.0) throw ValidationError("regularization weight must be >= 0");

    const int nt_inv = static_cast<int>(std::round(config.T_inv / data.tau));
    if (std::abs(config.T_inv / data.tau - nt_inv) > 1e-9) {
        throw ValidationError("inversion horizon is not an integer multiple of the record step");
    }
    const BoundaryRecord obs = truncate_record(data, nt_inv);

    ForwardOptions opts;
    opts.tau = data.tau;
    opts.T = config.T_inv;
    opts.pulse = known.pulse;
    opts.policy = BoundaryPolicy::PaperMixed;
    opts.front_axis = known.front_axis;
    opts.history_stride = 1;
    opts.parallel = config.parallel;

    ForwardOptions trial_opts = opts;
    trial_opts.history_stride = 0;

    const ScalarField3 c_guess(grid, known.background);
    ScalarField3 c = c_guess;

    auto misfit_of = [&](const ScalarField3& cand) {
        ConductivityModel m(grid, cand.values, known.time_part, known.background, config.T_inv);
        const auto fwd = solve_forward(m, known.theta0, known.theta1, trial_opts);
        return tikhonov_misfit(fwd.record, obs, cand, c_guess, config.gamma_reg, mask);
    };

    InversionResult result;
    OptTrace& trace = result.trace;

    ScalarField3 g_prev(grid), d(grid);
    double g0_norm = 0.0, g0_inf = 0.0, J0 = 0.0, J_prev = 0.0;
    double alpha_prev = 0.0;
    std::string stop;

    for (int n = 0;; ++n) {
        ConductivityModel model(grid, c.values, known.time_part, known.background, config.T_inv);
        const auto fwd = solve_forward(model, known.theta0, known.theta1, opts);
        const double J = tikhonov_misfit(fwd.record, obs, c, c_guess, config.gamma_reg, mask);
        const auto rho = misfit_residual(fwd.record, obs);
        const auto lam = solve_adjoint(model, rho, opts);
        ScalarField3 g = assemble_gradient(fwd.history, lam, c, c_guess, config.gamma_reg, mask,
                                           known.theta0, known.theta1, opts);
        const double gnorm = mask_norm2(g, config.parallel);

        trace.misfit.push_back(J);
        trace.grad_norm.push_back(gnorm);
        trace.max_contrast.push_back(max_on_mask(c, mask));
        trace.contrast_error_pct.push_back(contrast_error(c, mask, config.c_true_max));
        trace.step_length.push_back(alpha_prev);

        if (n == 0) {
            g0_norm = gnorm;
            g0_inf = mask_inf_norm(g);
            J0 = J;
        }
        if (gnorm <= config.grad_rtol * g0_norm) {
            stop = "gradient";
            break;
        }
        if (n > 0 && std::abs(J - J_prev) <= config.misfit_stag_rtol * J0) {
            stop = "stagnation";
            break;
        }
        if (n >= config.max_iters) {
            stop = "max_iters";
            break;
        }
        J_prev = J;

        // Polak-Ribiere+ direction with restart on loss of descent.
        if (n == 0) {
            for (std::size_t i = 0; i < g.values.size(); ++i) d.values[i] = -g.values[i];
        } else {
            const double denom =
                blocked_dot(g_prev.values.data(), g_prev.values.data(), g_prev.values.size(),
                            config.parallel);
            double num = 0.0;
            {
                std::vector<double> diff(g.values.size());
                for (std::size_t i = 0; i < g.values.size(); ++i)
                    diff[i] = g.values[i] - g_prev.values[i];
                num = blocked_dot(g.values.data(), diff.data(), diff.size(), config.parallel);
            }
            const double beta = denom > 0.0 ? std::max(0.0, num / denom) : 0.0;
            for (std::size_t i = 0; i < g.values.size(); ++i)
                d.values[i] = -g.values[i] + beta * d.values[i];
        }
        double slope = blocked_dot(g.values.data(), d.values.data(), d.values.size(),
                                   config.parallel);
        if (slope >= 0.0) {
            for (std::size_t i = 0; i < g.values.size(); ++i) d.values[i] = -g.values[i];
            slope = -gnorm * gnorm;
        }

        // Armijo backtracking on the projected step.
        const double alpha_init = g0_inf > 0.0 ? config.step_init / g0_inf : config.step_init;
        double alpha = alpha_prev > 0.0 ? std::min(2.0 * alpha_prev, alpha_init) : alpha_init;
        bool accepted = false;
        ScalarField3 c_trial(grid);
        while (alpha >= 1e-12) {
            for (std::size_t i = 0; i < c.values.size(); ++i)
                c_trial.values[i] = c.values[i] + alpha * d.values[i];
            c_trial = project_admissible(c_trial, config.c_low, config.c_high);
            const double J_trial = misfit_of(c_trial);
            if (J_trial <= J + config.armijo_c1 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= config.backtrack;
        }
        if (!accepted) {
            throw LineSearchFailure("Armijo backtracking underflowed at iteration " +
                                    std::to_string(n));
        }
        c = c_trial;
        alpha_prev = alpha;
        trace.accepted_steps = n + 1;
        g_prev = g;
    }

    trace.stop_reason = stop;
    result.c = c;
    return result;
}

} // namespace cylwave
