#include "cylwave/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cylwave {

namespace {

std::atomic<bool> g_parallel{true};

bool init_from_env() {
    if (const char* env = std::getenv("CYLWAVE_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) {
#ifdef _OPENMP
            omp_set_num_threads(cap);
#endif
            g_parallel.store(cap > 1);
        }
    }
#ifndef _OPENMP
    g_parallel.store(false);
#endif
    return true;
}

const bool g_env_initialized = init_from_env();

struct Dims {
    int n0, n1, n2;
    std::size_t s1, s2;
    double h, inv_h, inv_h2;
};

Dims dims_of(const Grid3& g) {
    Dims d;
    d.n0 = g.n[0];
    d.n1 = g.n[1];
    d.n2 = g.n[2];
    d.s1 = static_cast<std::size_t>(d.n0);
    d.s2 = static_cast<std::size_t>(d.n0) * d.n1;
    d.h = g.h;
    d.inv_h = 1.0 / g.h;
    d.inv_h2 = d.inv_h * d.inv_h;
    return d;
}

// Runs body(k, j) over all planes. The per-node arithmetic is identical on
// both paths, so outputs are bitwise equal regardless of thread count.
template <class Body>
void plane_loop(const Dims& d, bool parallel, Body&& body) {
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for collapse(2) schedule(static)
#endif
        for (int k = 0; k < d.n2; ++k)
            for (int j = 0; j < d.n1; ++j) body(k, j);
    } else {
        for (int k = 0; k < d.n2; ++k)
            for (int j = 0; j < d.n1; ++j) body(k, j);
    }
}

inline bool pinned_dirichlet(const StepBC& bc, int i, int j, int k, const Dims& d) {
    const int id[3] = {i, j, k};
    const int nd[3] = {d.n0, d.n1, d.n2};
    for (int a = 0; a < 3; ++a) {
        if (bc.mode[a][0] == FaceMode::Dirichlet && id[a] == 0) return true;
        if (bc.mode[a][1] == FaceMode::Dirichlet && id[a] == nd[a] - 1) return true;
    }
    return false;
}

constexpr std::size_t kReduceBlock = 4096;

template <class Term>
double blocked_reduce(std::size_t n, bool parallel, Term&& term) {
    const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(nblocks, 0.0);
    auto block_sum = [&](std::size_t b) {
        const std::size_t lo = b * kReduceBlock;
        const std::size_t hi = std::min(n, lo + kReduceBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[b] = s;
    };
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b)
            block_sum(static_cast<std::size_t>(b));
    } else {
        for (std::size_t b = 0; b < nblocks; ++b) block_sum(b);
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

} // namespace

void set_thread_cap(int cap) {
    (void)g_env_initialized;
    if (cap <= 1) {
        g_parallel.store(false);
#ifdef _OPENMP
        if (cap == 1) omp_set_num_threads(1);
#endif
        return;
    }
#ifdef _OPENMP
    omp_set_num_threads(cap);
    g_parallel.store(true);
#else
    g_parallel.store(false);
#endif
}

bool parallel_enabled() { return g_parallel.load(); }

double blocked_sum(const double* x, std::size_t n, bool parallel) {
    return blocked_reduce(n, parallel, [x](std::size_t i) { return x[i]; });
}

double blocked_dot(const double* a, const double* b, std::size_t n, bool parallel) {
    return blocked_reduce(n, parallel, [a, b](std::size_t i) { return a[i] * b[i]; });
}

void forward_step(const Grid3& grid, double tau, const double* ct, const double* u_prev,
                  const double* u_curr, double* u_next, const StepBC& bc, bool parallel) {
    const Dims d = dims_of(grid);
    const double tau2 = tau * tau;
    const double inv_tau = 1.0 / tau;
    const bool has_dirichlet = bc.any_dirichlet();

    plane_loop(d, parallel, [&](int k, int j) {
        const std::size_t row = d.s1 * static_cast<std::size_t>(j) + d.s2 * static_cast<std::size_t>(k);
        const int id1 = j, id2 = k;
        for (int i = 0; i < d.n0; ++i) {
        const std::size_t idx = row + static_cast<std::size_t>(i);
        if (has_dirichlet && pinned_dirichlet(bc, i, j, k, d)) {
            u_next[idx] = 0.0;
            continue;
        }
        const double uc = u_curr[idx];
        const double cc = ct[idx];
        double acc = 0.0;
        double load = 0.0;
        const int id[3] = {i, id1, id2};
        const int nd[3] = {d.n0, d.n1, d.n2};
        const std::size_t stride[3] = {1, d.s1, d.s2};
        for (int a = 0; a < 3; ++a) {
            // lo side
            if (id[a] > 0) {
                const std::size_t nb = idx - stride[a];
                acc += 0.5 * (cc + ct[nb]) * (u_curr[nb] - uc);
            } else {
                const std::size_t nb = idx + stride[a];
                const double af = 0.5 * (cc + ct[nb]);
                acc += af * (u_curr[nb] - uc);
                switch (bc.mode[a][0]) {
                    case FaceMode::Source: load += 2.0 * af * d.inv_h * bc.source_value; break;
                    case FaceMode::Absorb:
                        load -= 2.0 * af * d.inv_h * (uc - u_prev[idx]) * inv_tau;
                        break;
                    default: break;
                }
            }
            // hi side
            if (id[a] < nd[a] - 1) {
                const std::size_t nb = idx + stride[a];
                acc += 0.5 * (cc + ct[nb]) * (u_curr[nb] - uc);
            } else {
                const std::size_t nb = idx - stride[a];
                const double af = 0.5 * (cc + ct[nb]);
                acc += af * (u_curr[nb] - uc);
                switch (bc.mode[a][1]) {
                    case FaceMode::Source: load += 2.0 * af * d.inv_h * bc.source_value; break;
                    case FaceMode::Absorb:
                        load -= 2.0 * af * d.inv_h * (uc - u_prev[idx]) * inv_tau;
                        break;
                    default: break;
                }
            }
        }
        u_next[idx] = 2.0 * uc - u_prev[idx] + tau2 * (acc * d.inv_h2 + load);
        }
    });
}

void first_step(const Grid3& grid, double tau, const double* ct, const double* theta0,
                const double* theta1, double* u1, const StepBC& bc, bool parallel) {
    const Dims d = dims_of(grid);
    const double half_tau2 = 0.5 * tau * tau;
    const bool has_dirichlet = bc.any_dirichlet();

    plane_loop(d, parallel, [&](int k, int j) {
        const std::size_t row = d.s1 * static_cast<std::size_t>(j) + d.s2 * static_cast<std::size_t>(k);
        for (int i = 0; i < d.n0; ++i) {
        const std::size_t idx = row + static_cast<std::size_t>(i);
        if (has_dirichlet && pinned_dirichlet(bc, i, j, k, d)) {
            u1[idx] = 0.0;
            continue;
        }
        const double uc = theta0[idx];
        const double cc = ct[idx];
        double acc = 0.0;
        double load = 0.0;
        const int id[3] = {i, j, k};
        const int nd[3] = {d.n0, d.n1, d.n2};
        const std::size_t stride[3] = {1, d.s1, d.s2};
        for (int a = 0; a < 3; ++a) {
            for (int side = 0; side < 2; ++side) {
                const bool interior = side == 0 ? id[a] > 0 : id[a] < nd[a] - 1;
                const std::size_t step = stride[a];
                if (interior) {
                    const std::size_t nb = side == 0 ? idx - step : idx + step;
                    acc += 0.5 * (cc + ct[nb]) * (theta0[nb] - uc);
                } else {
                    const std::size_t nb = side == 0 ? idx + step : idx - step;
                    const double af = 0.5 * (cc + ct[nb]);
                    acc += af * (theta0[nb] - uc);
                    switch (bc.mode[a][side]) {
                        case FaceMode::Source: load += 2.0 * af * d.inv_h * bc.source_value; break;
                        case FaceMode::Absorb: load -= 2.0 * af * d.inv_h * theta1[idx]; break;
                        default: break;
                    }
                }
            }
        }
        u1[idx] = theta0[idx] + tau * theta1[idx] + half_tau2 * (acc * d.inv_h2 + load);
        }
    });
}

void adjoint_step(const Grid3& grid, double tau, const double* ct_k, const double* ct_k1,
                  const double* lam_next, const double* lam_next2, double* lam_k,
                  const StepBC& bc_k, const StepBC& bc_k1, bool parallel) {
    const Dims d = dims_of(grid);
    const double tau2 = tau * tau;

    plane_loop(d, parallel, [&](int k, int j) {
        const std::size_t row = d.s1 * static_cast<std::size_t>(j) + d.s2 * static_cast<std::size_t>(k);
        for (int i = 0; i < d.n0; ++i) {
        const std::size_t idx = row + static_cast<std::size_t>(i);
        const double lc = lam_next[idx];
        const double cc = ct_k[idx];
        double acc = 0.0;
        const int id[3] = {i, j, k};
        const int nd[3] = {d.n0, d.n1, d.n2};
        const std::size_t stride[3] = {1, d.s1, d.s2};
        double damp_k = 0.0;  // (G_k lam_next)_idx
        double damp_k1 = 0.0; // (G_{k+1} lam_next2)_idx
        for (int a = 0; a < 3; ++a) {
            const std::size_t step = stride[a];
            // symmetric interior-face part of A^T
            if (id[a] > 0) {
                const std::size_t nb = idx - step;
                acc += 0.5 * (cc + ct_k[nb]) * (lam_next[nb] - lc);
            }
            if (id[a] < nd[a] - 1) {
                const std::size_t nb = idx + step;
                acc += 0.5 * (cc + ct_k[nb]) * (lam_next[nb] - lc);
            }
            // mirrored-ghost extra, transposed (gather form)
            if (id[a] == 0) {
                const std::size_t nb = idx + step;
                acc -= 0.5 * (cc + ct_k[nb]) * lc;
            }
            if (id[a] == nd[a] - 1) {
                const std::size_t nb = idx - step;
                acc -= 0.5 * (cc + ct_k[nb]) * lc;
            }
            if (id[a] == 1) {
                const std::size_t b = idx - step;
                acc += 0.5 * (ct_k[b] + cc) * lam_next[b];
            }
            if (id[a] == nd[a] - 2) {
                const std::size_t b = idx + step;
                acc += 0.5 * (ct_k[b] + cc) * lam_next[b];
            }
            // diagonal absorbing damping at steps k and k+1
            for (int side = 0; side < 2; ++side) {
                const bool on_face = side == 0 ? id[a] == 0 : id[a] == nd[a] - 1;
                if (!on_face) continue;
                const std::size_t inb = side == 0 ? idx + step : idx - step;
                if (bc_k.mode[a][side] == FaceMode::Absorb) {
                    damp_k += 2.0 * d.inv_h * 0.5 * (cc + ct_k[inb]) * lc;
                }
                if (bc_k1.mode[a][side] == FaceMode::Absorb) {
                    damp_k1 += 2.0 * d.inv_h * 0.5 * (ct_k1[idx] + ct_k1[inb]) * lam_next2[idx];
                }
            }
        }
        lam_k[idx] = 2.0 * lc + tau2 * acc * d.inv_h2 - tau * damp_k - lam_next2[idx] + tau * damp_k1;
        }
    });
}

void tangent_forcing(const Grid3& grid, double tau, const double* dc, const double* u,
                     const double* u_before, VelocitySource vel_src, double* out,
                     const StepBC& bc, bool parallel) {
    const Dims d = dims_of(grid);
    const double inv_tau = 1.0 / tau;

    plane_loop(d, parallel, [&](int k, int j) {
        const std::size_t row = d.s1 * static_cast<std::size_t>(j) + d.s2 * static_cast<std::size_t>(k);
        for (int i = 0; i < d.n0; ++i) {
        const std::size_t idx = row + static_cast<std::size_t>(i);
        const double uc = u[idx];
        const double dcc = dc[idx];
        double acc = 0.0;
        double load = 0.0;
        const int id[3] = {i, j, k};
        const int nd[3] = {d.n0, d.n1, d.n2};
        const std::size_t stride[3] = {1, d.s1, d.s2};
        for (int a = 0; a < 3; ++a) {
            const std::size_t step = stride[a];
            for (int side = 0; side < 2; ++side) {
                const bool interior = side == 0 ? id[a] > 0 : id[a] < nd[a] - 1;
                if (interior) {
                    const std::size_t nb = side == 0 ? idx - step : idx + step;
                    acc += 0.5 * (dcc + dc[nb]) * (u[nb] - uc);
                } else {
                    const std::size_t nb = side == 0 ? idx + step : idx - step;
                    const double da = 0.5 * (dcc + dc[nb]);
                    acc += da * (u[nb] - uc);
                    switch (bc.mode[a][side]) {
                        case FaceMode::Source: load += 2.0 * da * d.inv_h * bc.source_value; break;
                        case FaceMode::Absorb: {
                            const double vel = vel_src == VelocitySource::BackwardDifference
                                                   ? (u[idx] - u_before[idx]) * inv_tau
                                                   : u_before[idx];
                            load -= 2.0 * da * d.inv_h * vel;
                            break;
                        }
                        default: break;
                    }
                }
            }
        }
        out[idx] = acc * d.inv_h2 + load;
        }
    });
}

void accumulate_gradient_step(const Grid3& grid, const RegionMask& mask, double tau,
                              double weight, const double* u, const double* u_before,
                              VelocitySource vel_src, const double* lam, const StepBC& bc,
                              double* g, bool parallel) {
    const Dims d = dims_of(grid);
    const double scale = weight * tau * tau;
    const double inv_tau = 1.0 / tau;
    const std::size_t nmask = mask.nodes.size();

    auto vel_at = [&](std::size_t idx) {
        return vel_src == VelocitySource::BackwardDifference ? (u[idx] - u_before[idx]) * inv_tau
                                                             : u_before[idx];
    };

    auto body = [&](std::size_t m) {
        const std::size_t idx = mask.nodes[m];
        const auto ijk = grid.unpack(idx);
        const double up = u[idx];
        const double lp = lam[idx];
        double phi = 0.0;
        double bcterm = 0.0;
        const int id[3] = {ijk[0], ijk[1], ijk[2]};
        const int nd[3] = {d.n0, d.n1, d.n2};
        const std::size_t stride[3] = {1, d.s1, d.s2};
        for (int a = 0; a < 3; ++a) {
            const std::size_t step = stride[a];
            for (int side = 0; side < 2; ++side) {
                const bool interior = side == 0 ? id[a] > 0 : id[a] < nd[a] - 1;
                if (interior) {
                    const std::size_t q = side == 0 ? idx - step : idx + step;
                    phi += 0.5 * (lp - lam[q]) * (u[q] - up);
                } else {
                    // p is the boundary node: mirrored ghost face plus load derivative
                    const std::size_t q = side == 0 ? idx + step : idx - step;
                    phi += 0.5 * lp * (u[q] - up);
                    switch (bc.mode[a][side]) {
                        case FaceMode::Source: bcterm += d.inv_h * bc.source_value * lp; break;
                        case FaceMode::Absorb: bcterm -= d.inv_h * vel_at(idx) * lp; break;
                        default: break;
                    }
                }
                // p is the mirror neighbor of a boundary node on this side
                const bool mirror_of_lo = side == 0 && id[a] == 1;
                const bool mirror_of_hi = side == 1 && id[a] == nd[a] - 2;
                if (mirror_of_lo || mirror_of_hi) {
                    const std::size_t b = side == 0 ? idx - step : idx + step;
                    phi += 0.5 * lam[b] * (up - u[b]);
                    switch (bc.mode[a][side]) {
                        case FaceMode::Source: bcterm += d.inv_h * bc.source_value * lam[b]; break;
                        case FaceMode::Absorb: bcterm -= d.inv_h * vel_at(b) * lam[b]; break;
                        default: break;
                    }
                }
            }
        }
        g[idx] += scale * (phi * d.inv_h2 + bcterm);
    };

    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(nmask); ++m)
            body(static_cast<std::size_t>(m));
    } else {
        for (std::size_t m = 0; m < nmask; ++m) body(m);
    }
}

double discrete_energy(const Grid3& grid, double tau, const double* ct, const double* u_curr,
                       const double* u_next, bool parallel) {
    const Dims d = dims_of(grid);
    const std::size_t n = grid.count();
    const double h3 = d.h * d.h * d.h;
    const double inv_tau = 1.0 / tau;

    // A u_next with Reflect-all boundaries, then the two weighted pairings.
    std::vector<double> au(n);
    StepBC reflect_all;
    // forward_step computes 2u - u_prev + tau^2 A u; recover A u by feeding zeros.
    std::vector<double> zeros(n, 0.0);
    forward_step(grid, tau, ct, zeros.data(), u_next, au.data(), reflect_all, parallel);
    const double inv_tau2 = inv_tau * inv_tau;
    for (std::size_t i = 0; i < n; ++i) au[i] = (au[i] - 2.0 * u_next[i]) * inv_tau2;

    auto weight = [&](std::size_t idx) {
        const auto ijk = grid.unpack(idx);
        double w = 1.0;
        for (int a = 0; a < 3; ++a) {
            if (ijk[a] == 0 || ijk[a] == grid.n[a] - 1) w *= 0.5;
        }
        return w;
    };

    std::vector<double> kinetic(n), potential(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = (u_next[i] - u_curr[i]) * inv_tau;
        const double w = weight(i);
        kinetic[i] = w * v * v;
        potential[i] = -w * au[i] * u_curr[i];
    }
    const double e_kin = blocked_sum(kinetic.data(), n, parallel);
    const double e_pot = blocked_sum(potential.data(), n, parallel);
    return 0.5 * h3 * (e_kin + e_pot);
}

} // namespace cylwave
