#include "cylwave/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cylwave/rng.hpp"

namespace cylwave {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt2 = 1.4142135623730951;

double dist2_to(const std::array<double, 2>& p, double x, double y) {
    const double dx = x - p[0];
    const double dy = y - p[1];
    return dx * dx + dy * dy;
}

// sup over the closed box cross-section of |x' - p|^2: attained at a corner.
double sup_dist2(const CarlemanSetup& s, const std::array<double, 2>& p) {
    double best = -std::numeric_limits<double>::infinity();
    for (int cx = 0; cx < 2; ++cx)
        for (int cy = 0; cy < 2; ++cy) {
            const double x = cx ? s.cross_hi[0] : s.cross_lo[0];
            const double y = cy ? s.cross_hi[1] : s.cross_lo[1];
            best = std::max(best, dist2_to(p, x, y));
        }
    return best;
}

// inf over the closed box of |x' - p|^2: distance to the clamped projection.
double inf_dist2(const CarlemanSetup& s, const std::array<double, 2>& p) {
    const double x = std::clamp(p[0], s.cross_lo[0], s.cross_hi[0]);
    const double y = std::clamp(p[1], s.cross_lo[1], s.cross_hi[1]);
    return dist2_to(p, x, y);
}

std::array<double, 2> shifted_anchor(const CarlemanSetup& s, double delta) {
    return {delta * s.a_prime[0], delta * s.a_prime[1]};
}

// Right-hand side of the delta-admissibility inequality (n = 3).
double delta_condition_rhs(const CarlemanSetup& s, double g) {
    return ((1.0 + 2.0 * kSqrt3 / std::sqrt(s.c_m)) * g + kSqrt2 * s.cross_diameter() + 2.0) *
               s.c_M +
           2.0 + (g / s.c_m) * s.c_M;
}

// Margin of the (delta, L, T) inequality (positive = admissible).
double lt_margin(const CarlemanSetup& s, double delta, double L, double T) {
    return delta * s.a0 -
           (L + kSqrt2 * s.cross_diameter() + 2.0 * (1.0 + kSqrt3 * T / std::sqrt(s.c_m))) * s.c_M -
           2.0 - (T / s.c_m) * s.c_M;
}

} // namespace

double CarlemanSetup::cross_diameter() const {
    const double dx = cross_hi[0] - cross_lo[0];
    const double dy = cross_hi[1] - cross_lo[1];
    return std::sqrt(dx * dx + dy * dy);
}

void CarlemanSetup::validate() const {
    const double na = std::sqrt(a_prime[0] * a_prime[0] + a_prime[1] * a_prime[1]);
    if (std::abs(na - 1.0) > 1e-9) throw ValidationError("a' must be a unit vector");
    if (!(c_m > 0.0) || !(c_M >= c_m)) throw ValidationError("need 0 < c_m <= c_M");
    if (cross_lo[0] > cross_hi[0] || cross_lo[1] > cross_hi[1]) {
        throw ValidationError("cross-section box is inverted");
    }
    if (L > 0.0 && !(ell < L)) throw ValidationError("need ell < L");
}

double weight_psi(const CarlemanSetup& s, const std::array<double, 3>& x, double t) {
    const auto p = shifted_anchor(s, s.delta);
    return dist2_to(p, x[0], x[1]) - x[2] * x[2] - t * t;
}

double weight_log_phi(const CarlemanSetup& s, const std::array<double, 3>& x, double t) {
    return s.gamma_w * weight_psi(s, x, t);
}

double weight_phi(const CarlemanSetup& s, const std::array<double, 3>& x, double t) {
    const double lp = weight_log_phi(s, x, t);
    if (lp > 700.0) return std::numeric_limits<double>::infinity();
    return std::exp(lp);
}

double g_ell(const CarlemanSetup& s, double delta) {
    if (!(delta > 0.0)) throw ValidationError("g_ell needs delta > 0");
    const auto p = shifted_anchor(s, delta);
    const double v = sup_dist2(s, p) - inf_dist2(s, p) + s.ell * s.ell;
    return std::sqrt(std::max(0.0, v));
}

Delta0Result find_delta0(const CarlemanSetup& s) {
    s.validate();
    constexpr double kCap = 1e6;
    constexpr double kFactor = 1.05;
    double delta = 1.0;
    int k = 0;
    while (delta <= kCap) {
        const double g = g_ell(s, delta);
        const auto p = shifted_anchor(s, delta);
        const double main = delta * s.a0 - delta_condition_rhs(s, g);
        const double enlarge = std::sqrt(s.c_m) * std::sqrt(inf_dist2(s, p)) - g;
        if (main > 0.0 && enlarge > 0.0) {
            Delta0Result r;
            r.delta0 = delta;
            r.margin_main = main;
            r.margin_enlarge = enlarge;
            r.scan_index = k;
            return r;
        }
        delta *= kFactor;
        ++k;
    }
    throw NotFoundBelowCap("no admissible delta below 1e6; constants are inconsistent");
}

LTReport check_LT(const CarlemanSetup& s, double delta, double L, double T) {
    LTReport rep;
    const double g = g_ell(s, delta);
    rep.window_lo = g;
    const auto p = shifted_anchor(s, delta);
    const double reach = std::sqrt(s.c_m) * std::sqrt(inf_dist2(s, p));

    auto admissible = [&](double w) {
        const double lt = g + w;
        return lt_margin(s, delta, lt, lt) > 0.0 && reach - lt > 0.0;
    };
    double lo = 0.0, hi = 1.0;
    if (admissible(0.0)) {
        while (hi < 1e9 && admissible(hi)) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (admissible(mid) ? lo : hi) = mid;
        }
        rep.window_width = lo;
    } else {
        rep.window_width = 0.0;
    }

    rep.margin_main = lt_margin(s, delta, L, T);
    rep.margin_time = reach - T;
    const bool in_window = L > g && T > g && L < g + rep.window_width && T < g + rep.window_width;
    rep.ok = rep.margin_main > 0.0 && rep.margin_time > 0.0 && in_window;
    return rep;
}

std::array<double, 3> CtildeSampler::grad_x(const std::array<double, 3>& x, double t) const {
    std::array<double, 3> g{};
    for (int d = 0; d < 3; ++d) {
        const double step = fd_step;
        std::array<double, 3> xp = x, xm = x;
        if (x[d] + step > x_hi[d]) {
            // one-sided backward, second order
            std::array<double, 3> x1 = x, x2 = x;
            x1[d] -= step;
            x2[d] -= 2.0 * step;
            g[d] = (3.0 * value(x, t) - 4.0 * value(x1, t) + value(x2, t)) / (2.0 * step);
        } else if (x[d] - step < x_lo[d]) {
            std::array<double, 3> x1 = x, x2 = x;
            x1[d] += step;
            x2[d] += 2.0 * step;
            g[d] = (-3.0 * value(x, t) + 4.0 * value(x1, t) - value(x2, t)) / (2.0 * step);
        } else {
            xp[d] += step;
            xm[d] -= step;
            g[d] = (value(xp, t) - value(xm, t)) / (2.0 * step);
        }
    }
    return g;
}

double CtildeSampler::dt(const std::array<double, 3>& x, double t) const {
    const double step = fd_step;
    if (t + step > t_hi) {
        return (3.0 * value(x, t) - 4.0 * value(x, t - step) + value(x, t - 2.0 * step)) /
               (2.0 * step);
    }
    if (t - step < t_lo) {
        return (-3.0 * value(x, t) + 4.0 * value(x, t + step) - value(x, t + 2.0 * step)) /
               (2.0 * step);
    }
    return (value(x, t + step) - value(x, t - step)) / (2.0 * step);
}

ScanResult scan_J_positivity(const CarlemanSetup& s, const CtildeSampler& ctilde, int samples,
                             std::uint64_t seed) {
    s.validate();
    if (!(s.delta > 0.0) || !(s.L > 0.0) || !(s.T > 0.0)) {
        throw ValidationError("scan needs positive delta, L and T in the setup");
    }
    const auto p = shifted_anchor(s, s.delta);

    ScanResult res;
    res.min_bracket = std::numeric_limits<double>::infinity();
    res.min_A2_at_gradpsi = std::numeric_limits<double>::infinity();

    for (int i = 0; i < samples; ++i) {
        const std::uint64_t base = 4ULL * static_cast<std::uint64_t>(i);
        const double u0 = counter_uniform01(seed, base);
        const double u1 = counter_uniform01(seed, base + 1);
        const double u2 = counter_uniform01(seed, base + 2);
        const double u3 = counter_uniform01(seed, base + 3);
        const std::array<double, 3> x = {
            s.cross_lo[0] + u0 * (s.cross_hi[0] - s.cross_lo[0]),
            s.cross_lo[1] + u1 * (s.cross_hi[1] - s.cross_lo[1]),
            -s.L + u2 * 2.0 * s.L,
        };
        const double t = u3 * s.T;

        const double c = ctilde.eval(x, t);
        const auto g = ctilde.grad_x(x, t);
        const double ct_t = ctilde.dt(x, t);
        const double grad_norm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
        const double along_a = s.a_prime[0] * g[0] + s.a_prime[1] * g[1];
        const double bracket =
            s.delta * along_a - (x[0] * g[0] + x[1] * g[1] - x[2] * g[2] + 2.0 * c +
                                 2.0 * s.T * grad_norm / std::sqrt(c) + 2.0 +
                                 (s.T / c) * std::abs(ct_t));
        const double a2 = 4.0 * (c * (dist2_to(p, x[0], x[1]) + x[2] * x[2]) - t * t);

        if (bracket < res.min_bracket) {
            res.min_bracket = bracket;
            res.witness_bracket = {x[0], x[1], x[2], t};
        }
        if (a2 < res.min_A2_at_gradpsi) {
            res.min_A2_at_gradpsi = a2;
            res.witness_A2 = {x[0], x[1], x[2], t};
        }
    }
    res.min_J_lower_bound = 4.0 * res.min_bracket;
    res.positive = res.min_bracket > 0.0 && res.min_A2_at_gradpsi > 0.0;
    return res;
}

LevelSetReport verify_level_sets(const CarlemanSetup& s, double delta, double L, double T) {
    s.validate();
    if (!(s.ell < L)) throw ValidationError("level sets need ell < L");
    const auto p = shifted_anchor(s, delta);
    const double sup_om = sup_dist2(s, p);
    const double inf_om = inf_dist2(s, p);
    const double psi_core = inf_om - s.ell * s.ell; // min psi over the core at t = 0

    LevelSetReport rep;
    rep.log_d_ell = s.gamma_w * psi_core;
    rep.d_ell = rep.log_d_ell > 700.0 ? std::numeric_limits<double>::infinity()
                                      : std::exp(rep.log_d_ell);

    // psi is separable, so the slab maxima are explicit in eps:
    //   near |t| in [T-2eps, T]:   sup_om - (T-2eps)^2
    //   near |x_n| in [L-2eps, L]: sup_om - (L-2eps)^2
    const double eps_cap = 0.999 * 0.5 * (L - s.ell);
    double best_zeta2 = -std::numeric_limits<double>::infinity();
    double best_eps = 0.0;
    const int n_eps = 400;
    const double lo = std::max(1e-9, eps_cap * 1e-9);
    for (int i = 0; i < n_eps; ++i) {
        const double f = static_cast<double>(i) / (n_eps - 1);
        const double eps = lo * std::pow(eps_cap / lo, f);
        if (2.0 * eps >= T || 2.0 * eps >= L) break;
        const double m6 = sup_om - (T - 2.0 * eps) * (T - 2.0 * eps);
        const double m7 = sup_om - (L - 2.0 * eps) * (L - 2.0 * eps);
        const double zeta2 = psi_core - std::max(m6, m7);
        if (zeta2 > best_zeta2) {
            best_zeta2 = zeta2;
            best_eps = eps;
        }
    }

    rep.tightest_margin = best_zeta2;
    if (best_zeta2 > 0.0) {
        rep.ok = true;
        rep.eps = best_eps;
        rep.zeta = std::sqrt(best_zeta2);
        rep.log_dtilde_ell = rep.log_d_ell - s.gamma_w * best_zeta2;
        rep.dtilde_ell = rep.log_dtilde_ell > 700.0 ? std::numeric_limits<double>::infinity()
                                                    : std::exp(rep.log_dtilde_ell);
    } else {
        rep.ok = false;
        rep.eps = best_eps;
        rep.zeta = 0.0;
        rep.log_dtilde_ell = rep.log_d_ell;
        rep.dtilde_ell = rep.d_ell;
    }
    return rep;
}

HypothesisReport check_hypotheses(const CtildeSampler& ctilde,
                                  const std::function<double(const std::array<double, 3>&)>& theta0,
                                  const CarlemanSetup& s, int resolution, double T,
                                  bool time_part_is_cosine) {
    s.validate();
    HypothesisReport rep;
    const int nr = std::max(resolution, 3);
    const int nt = std::max(resolution / 2, 3);

    const double ax_lo = ctilde.x_lo[2], ax_hi = ctilde.x_hi[2];

    auto lattice_point = [&](int a, int b, int c) {
        return std::array<double, 3>{
            s.cross_lo[0] + (s.cross_hi[0] - s.cross_lo[0]) * a / (nr - 1.0),
            s.cross_lo[1] + (s.cross_hi[1] - s.cross_lo[1]) * b / (nr - 1.0),
            ax_lo + (ax_hi - ax_lo) * c / (nr - 1.0),
        };
    };

    double min_c = std::numeric_limits<double>::infinity();
    std::array<double, 4> min_c_w{};
    double max_norm = 0.0;
    std::array<double, 4> max_norm_w{};
    double min_a0 = std::numeric_limits<double>::infinity();
    std::array<double, 4> min_a0_w{};

    const double fd = ctilde.fd_step;
    for (int a = 0; a < nr; ++a) {
        for (int b = 0; b < nr; ++b) {
            for (int c = 0; c < nr; ++c) {
                const auto x = lattice_point(a, b, c);
                for (int it = 0; it < nt; ++it) {
                    const double t = T * it / (nt - 1.0);
                    const double v = ctilde.eval(x, t);
                    const auto g = ctilde.grad_x(x, t);
                    const double gt = ctilde.dt(x, t);
                    if (v < min_c) {
                        min_c = v;
                        min_c_w = {x[0], x[1], x[2], t};
                    }
                    const double along = s.a_prime[0] * g[0] + s.a_prime[1] * g[1];
                    if (along < min_a0) {
                        min_a0 = along;
                        min_a0_w = {x[0], x[1], x[2], t};
                    }
                    // order-2 sampled norm proxy: value, first and pure second
                    // differences per coordinate
                    double norm = std::abs(v);
                    for (int d = 0; d < 3; ++d) norm = std::max(norm, std::abs(g[d]));
                    norm = std::max(norm, std::abs(gt));
                    for (int d = 0; d < 3; ++d) {
                        std::array<double, 3> xp = x, xm = x;
                        xp[d] += fd;
                        xm[d] -= fd;
                        const double second =
                            (ctilde.eval(xp, t) - 2.0 * v + ctilde.eval(xm, t)) / (fd * fd);
                        norm = std::max(norm, std::abs(second));
                    }
                    {
                        const double tp = t + fd, tm = t - fd;
                        const double second =
                            (ctilde.eval(x, tp) - 2.0 * v + ctilde.eval(x, tm)) / (fd * fd);
                        norm = std::max(norm, std::abs(second));
                    }
                    if (norm > max_norm) {
                        max_norm = norm;
                        max_norm_w = {x[0], x[1], x[2], t};
                    }
                }
            }
        }
    }

    rep.conditions.push_back({"c0a-ellipticity", min_c - s.c_m >= 0.0, min_c - s.c_m, min_c_w,
                              "min ctilde minus c_m over the sampling lattice"});
    rep.conditions.push_back({"c0b-norm-bound", max_norm <= s.c_M, s.c_M - max_norm, max_norm_w,
                              "sampled up to order 2; higher orders not estimated"});
    rep.conditions.push_back({"c1-monotonicity", min_a0 > 0.0, min_a0, min_a0_w,
                              "sampled inf of a'.grad' ctilde (must be positive)"});

    // Initial-condition conditions on theta0 (space only).
    double min_eta0 = std::numeric_limits<double>::infinity();
    std::array<double, 4> min_eta0_w{};
    double m0 = 0.0;
    std::array<double, 4> m0_w{};
    auto theta_grad = [&](const std::array<double, 3>& x) {
        std::array<double, 3> g{};
        for (int d = 0; d < 3; ++d) {
            std::array<double, 3> xp = x, xm = x;
            xp[d] += fd;
            xm[d] -= fd;
            g[d] = (theta0(xp) - theta0(xm)) / (2.0 * fd);
        }
        return g;
    };
    for (int a = 0; a < nr; ++a) {
        for (int b = 0; b < nr; ++b) {
            for (int c = 0; c < nr; ++c) {
                const auto x = lattice_point(a, b, c);
                const auto g = theta_grad(x);
                const double lhs = -(s.a_prime[0] * g[0] + s.a_prime[1] * g[1]);
                const double eta = lhs * std::exp(1.0 + x[2] * x[2]);
                if (eta < min_eta0) {
                    min_eta0 = eta;
                    min_eta0_w = {x[0], x[1], x[2], 0.0};
                }
                double norm = std::abs(theta0(x));
                for (int d = 0; d < 3; ++d) norm = std::max(norm, std::abs(g[d]));
                for (int d = 0; d < 3; ++d) {
                    std::array<double, 3> xp = x, xm = x;
                    xp[d] += fd;
                    xm[d] -= fd;
                    const double second =
                        (theta0(xp) - 2.0 * theta0(x) + theta0(xm)) / (fd * fd);
                    norm = std::max(norm, std::abs(second));
                }
                if (norm > m0) {
                    m0 = norm;
                    m0_w = {x[0], x[1], x[2], 0.0};
                }
            }
        }
    }
    rep.conditions.push_back({"S10-initial-slope", min_eta0 > 0.0, min_eta0, min_eta0_w,
                              "sampled inf of -a'.grad' theta0 scaled by exp(1 + x_n^2)"});
    rep.conditions.push_back({"S100-initial-norm", std::isfinite(m0), m0, m0_w,
                              "sampled up to order 2; H^5 component not estimated"});
    rep.conditions.push_back({"time-part-odd-derivatives", time_part_is_cosine, 0.0, {},
                              time_part_is_cosine
                                  ? "cos(t) factor: odd time derivatives vanish at t = 0"
                                  : "time part is not the cosine form; not verified"});
    return rep;
}

namespace {

// Outward normal flux on the lateral boundary restricted to |x_n| < L,
// second-order one-sided differences.
struct FluxStencil {
    std::size_t b, in1, in2;
};

std::vector<FluxStencil> lateral_flux_points(const Grid3& grid, int axis_n, double L) {
    std::vector<FluxStencil> pts;
    for (int face_axis = 0; face_axis < 3; ++face_axis) {
        if (face_axis == axis_n) continue;
        for (int side = 0; side < 2; ++side) {
            for (std::size_t idx = 0; idx < grid.count(); ++idx) {
                const auto ijk = grid.unpack(idx);
                const bool on_face =
                    side == 0 ? ijk[face_axis] == 0 : ijk[face_axis] == grid.n[face_axis] - 1;
                if (!on_face) continue;
                const double xn = grid.coords(idx)[axis_n];
                if (!(std::abs(xn) < L)) continue;
                std::ptrdiff_t stride = 1;
                if (face_axis == 1) stride = grid.n[0];
                if (face_axis == 2) stride = static_cast<std::ptrdiff_t>(grid.n[0]) * grid.n[1];
                const std::ptrdiff_t inward = side == 0 ? stride : -stride;
                pts.push_back({idx, idx + inward, idx + 2 * inward});
            }
        }
    }
    return pts;
}

std::vector<std::vector<double>> flux_series(const WaveHistory& hist,
                                             const std::vector<FluxStencil>& pts, double h) {
    std::vector<std::vector<double>> out(hist.snapshots.size(),
                                         std::vector<double>(pts.size()));
    for (std::size_t m = 0; m < hist.snapshots.size(); ++m) {
        const auto& u = hist.snapshots[m];
        for (std::size_t q = 0; q < pts.size(); ++q) {
            out[m][q] = (3.0 * u[pts[q].b] - 4.0 * u[pts[q].in1] + u[pts[q].in2]) / (2.0 * h);
        }
    }
    return out;
}

} // namespace

ProbePair stability_probe_pair(const ConductivityModel& c1, const ConductivityModel& c2,
                               double ell, double L, double tau, double T,
                               const ScalarField3& theta0, bool parallel) {
    const Grid3& grid = c1.grid();
    if (!c2.grid().same_layout(grid)) throw ShapeMismatch("probe models on different grids");
    const int axis_n = 0; // computational long axis plays the cylinder axis

    ForwardOptions opts;
    opts.tau = tau;
    opts.T = T;
    opts.policy = BoundaryPolicy::DirichletAll;
    opts.history_stride = 1;
    opts.parallel = parallel;
    opts.record_front = false;

    const ScalarField3 theta1(grid, 0.0);
    const auto r1 = solve_forward(c1, theta0, theta1, opts);
    const auto r2 = solve_forward(c2, theta0, theta1, opts);

    const auto pts = lateral_flux_points(grid, axis_n, L);
    const auto f1 = flux_series(r1.history, pts, grid.h);
    const auto f2 = flux_series(r2.history, pts, grid.h);

    const int nt = opts.step_count();
    const double h2 = grid.h * grid.h;

    // H^3(0,T;L^2) distance of the fluxes: centered time differences of
    // orders 0..3, valid on levels 2..nt-2.
    double rhs2 = 0.0;
    for (int m = 2; m + 2 <= nt; ++m) {
        double level = 0.0;
        for (std::size_t q = 0; q < pts.size(); ++q) {
            auto d = [&](int lvl) { return f1[lvl][q] - f2[lvl][q]; };
            const double d0 = d(m);
            const double d1 = (d(m + 1) - d(m - 1)) / (2.0 * tau);
            const double d2 = (d(m + 1) - 2.0 * d(m) + d(m - 1)) / (tau * tau);
            const double d3 =
                (d(m + 2) - 2.0 * d(m + 1) + 2.0 * d(m - 1) - d(m - 2)) / (2.0 * tau * tau * tau);
            level += d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3;
        }
        rhs2 += level;
    }
    rhs2 *= h2 * tau;

    // H^1(Omega_ell) distance of the coefficients (space parts; the known
    // time part cancels).
    const auto& a = c1.space_part();
    const auto& b = c2.space_part();
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];

    double lhs2 = 0.0;
    const double h3 = grid.h * grid.h * grid.h;
    const double tol = grid.h * 1e-9;
    const std::ptrdiff_t strides[3] = {1, grid.n[0],
                                       static_cast<std::ptrdiff_t>(grid.n[0]) * grid.n[1]};
    for (std::size_t idx = 0; idx < grid.count(); ++idx) {
        const auto xs = grid.coords(idx);
        if (std::abs(xs[axis_n]) > ell + tol) continue;
        const auto ijk = grid.unpack(idx);
        double val = diff[idx] * diff[idx];
        for (int d = 0; d < 3; ++d) {
            const std::ptrdiff_t sd = strides[d];
            double der;
            if (ijk[d] == 0) {
                der = (diff[idx + sd] - diff[idx]) / grid.h;
            } else if (ijk[d] == grid.n[d] - 1) {
                der = (diff[idx] - diff[idx - sd]) / grid.h;
            } else {
                der = (diff[idx + sd] - diff[idx - sd]) / (2.0 * grid.h);
            }
            val += der * der;
        }
        lhs2 += val;
    }
    lhs2 *= h3;

    ProbePair out;
    out.lhs = std::sqrt(lhs2);
    out.rhs = std::sqrt(rhs2);
    return out;
}

ProbeResult stability_probe(const ConductivityModel& c1, const ScalarField3& bump, double ell,
                            double L, double tau, double T, const ScalarField3& theta0,
                            const std::vector<double>& epsilons, bool parallel) {
    ProbeResult res;
    res.epsilons = epsilons;
    for (double eps : epsilons) {
        std::vector<double> c2vals = c1.space_part();
        for (std::size_t i = 0; i < c2vals.size(); ++i) c2vals[i] += eps * bump.values[i];
        ConductivityModel c2(c1.grid(), std::move(c2vals), c1.time_part(), c1.background(),
                             c1.horizon());
        const auto pair = stability_probe_pair(c1, c2, ell, L, tau, T, theta0, parallel);
        if (pair.rhs < 1e-14) throw DegenerateSweep("flux distance below 1e-14 in the sweep");
        res.lhs.push_back(pair.lhs);
        res.rhs.push_back(pair.rhs);
    }
    // least-squares slope of log lhs against log rhs
    const std::size_t n = res.lhs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(res.rhs[i]);
        my += std::log(res.lhs[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(res.rhs[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(res.lhs[i]) - my);
    }
    res.kappa_fit = sxx > 0.0 ? sxy / sxx : 0.0;
    return res;
}

CtildeSampler monotone_fixture_sampler(const CarlemanSetup& s, double base, double slope,
                                       double axis_halfwidth, double T) {
    CtildeSampler smp;
    const auto a = s.a_prime;
    smp.value = [base, slope, a](const std::array<double, 3>& x, double) {
        return base + slope * (a[0] * x[0] + a[1] * x[1]);
    };
    smp.fd_step = 0.05;
    smp.x_lo = {s.cross_lo[0], s.cross_lo[1], -axis_halfwidth};
    smp.x_hi = {s.cross_hi[0], s.cross_hi[1], axis_halfwidth};
    smp.t_lo = 0.0;
    smp.t_hi = T;
    return smp;
}

CtildeSampler model_sampler(const CarlemanSetup& s, const GaussianSum& space,
                            const CosineTimePart& time_part, double axis_halfwidth, double T) {
    CtildeSampler smp;
    smp.value = [space, time_part](const std::array<double, 3>& x, double t) {
        // cylinder coords (x'_1, x'_2, x_n) -> computational (x_n, x'_1, x'_2)
        const std::array<double, 3> comp = {x[2], x[0], x[1]};
        return space(comp) + time_part(comp, t);
    };
    smp.fd_step = 0.05;
    smp.x_lo = {s.cross_lo[0], s.cross_lo[1], -axis_halfwidth};
    smp.x_hi = {s.cross_hi[0], s.cross_hi[1], axis_halfwidth};
    smp.t_lo = 0.0;
    smp.t_hi = T;
    return smp;
}

} // namespace cylwave
