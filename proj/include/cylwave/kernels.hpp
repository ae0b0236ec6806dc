#pragma once

#include <cstddef>
#include <cstdint>

#include "cylwave/grid.hpp"

namespace cylwave {

/// Caps OpenMP worker threads (0 or 1 selects the serial reference path).
void set_thread_cap(int cap);

/// True when kernels run the OpenMP path. Controlled by set_thread_cap and,
/// at startup, by the CYLWAVE_THREADS environment variable.
bool parallel_enabled();

/// Deterministic sum: fixed-size blocks are reduced independently and the
/// partials combined in block order, so the result does not depend on the
/// thread count and matches the serial path bitwise.
double blocked_sum(const double* x, std::size_t n, bool parallel);
double blocked_dot(const double* a, const double* b, std::size_t n, bool parallel);

/// Boundary treatment of one axis side for one time step.
enum class FaceMode : std::uint8_t {
    Reflect,   // homogeneous Neumann (mirror ghost)
    Source,    // Neumann with prescribed flux f(t)
    Absorb,    // first-order absorbing, flux = -du/dt
    Dirichlet, // value pinned to zero
};

/// Per-step boundary data. mode[axis][side], side 0 = lo face, 1 = hi face.
struct StepBC {
    FaceMode mode[3][2] = {{FaceMode::Reflect, FaceMode::Reflect},
                           {FaceMode::Reflect, FaceMode::Reflect},
                           {FaceMode::Reflect, FaceMode::Reflect}};
    double source_value = 0.0; // f(t_m) on Source faces

    bool any_dirichlet() const {
        for (const auto& m : mode)
            for (const auto s : m)
                if (s == FaceMode::Dirichlet) return true;
        return false;
    }
};

/// How kernels obtain the time derivative of the state at boundary nodes.
enum class VelocitySource : std::uint8_t {
    BackwardDifference, // (u - u_before) / tau
    DirectField,        // u_before holds the velocity itself (initial step)
};

/// Leapfrog update u_next = 2u - u_prev + tau^2 (D_h u + boundary loads).
/// D_h is the divergence-form 7-point stencil with arithmetic-mean face
/// coefficients from the nodal field ct; boundary ghosts mirror both the
/// state and the coefficient.
void forward_step(const Grid3& grid, double tau, const double* ct, const double* u_prev,
                  const double* u_curr, double* u_next, const StepBC& bc, bool parallel);

/// Taylor start-up u1 = theta0 + tau theta1 + (tau^2/2)(D_h theta0 + loads),
/// with theta1 standing in for du/dt in absorbing loads.
void first_step(const Grid3& grid, double tau, const double* ct, const double* theta0,
                const double* theta1, double* u1, const StepBC& bc, bool parallel);

/// One backward step of the exact transpose of forward_step:
/// lam_k = 2 lam_{k+1} + tau^2 A_k^T lam_{k+1} - tau G_k lam_{k+1}
///         - lam_{k+2} + tau G_{k+1} lam_{k+2}.
/// ct_k/ct_k1 and bc_k/bc_k1 are the forward coefficients and boundary
/// modes at steps k and k+1.
void adjoint_step(const Grid3& grid, double tau, const double* ct_k, const double* ct_k1,
                  const double* lam_next, const double* lam_next2, double* lam_k,
                  const StepBC& bc_k, const StepBC& bc_k1, bool parallel);

/// Directional-derivative forcing of the scheme with respect to the
/// conductivity: out_i = (dA u)_i + boundary terms, where dA uses face
/// coefficients 0.5 (dc_i + dc_j). Multiply by tau^2 (tau^2/2 at start-up)
/// before adding to the tangent state.
void tangent_forcing(const Grid3& grid, double tau, const double* dc, const double* u,
                     const double* u_before, VelocitySource vel_src, double* out,
                     const StepBC& bc, bool parallel);

/// Accumulates one time level of the misfit gradient on mask nodes:
/// g_p += weight tau^2 [sum over faces at p of 0.5 (lam_p - lam_q)(u_q - u_p)/h^2
///        + ghost-face and boundary-load coefficient derivatives].
void accumulate_gradient_step(const Grid3& grid, const RegionMask& mask, double tau,
                              double weight, const double* u, const double* u_before,
                              VelocitySource vel_src, const double* lam, const StepBC& bc,
                              double* g, bool parallel);

/// Conserved leapfrog energy for reflecting boundaries and a coefficient
/// frozen in time: 0.5|v|_w^2 + 0.5 <-D_h u_next, u_curr>_w with trapezoid
/// boundary weights w. Exactly conserved by forward_step under Reflect-all.
double discrete_energy(const Grid3& grid, double tau, const double* ct, const double* u_curr,
                       const double* u_next, bool parallel);

} // namespace cylwave
