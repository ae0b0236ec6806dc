#pragma once

#include "cylwave/forward.hpp"

namespace cylwave {

/// Temporal data cutoff: 1 away from the horizon, smooth cubic decay on
/// [T - 0.1, T - 0.05], exactly zero on the last 0.05. The exact tail keeps
/// the terminal adjoint levels identically zero.
double data_cutoff(double t, double T);

/// Tikhonov functional
///   J = 0.5 sum_{S1,m} (u - u_obs)^2 z(t_m) h^2 tau
///       + (gamma/2) sum_mask (c - c_guess)^2 h^3.
double tikhonov_misfit(const BoundaryRecord& u_rec, const BoundaryRecord& u_obs,
                       const ScalarField3& c, const ScalarField3& c_guess, double gamma_reg,
                       const RegionMask& mask);

/// Cutoff-weighted residual (u - u_obs) z(t) on the observation face.
MisfitResidual misfit_residual(const BoundaryRecord& u_rec, const BoundaryRecord& u_obs);

/// Exact transpose of the forward recursion, driven by the residual injected
/// as a boundary load on the observation face. Terminal levels vanish for
/// cutoff residuals. Returns the stride-1 multiplier history (level 0 unused).
WaveHistory solve_adjoint(const ConductivityModel& model, const MisfitResidual& residual,
                          const ForwardOptions& opts);

/// Exact gradient of the discrete Tikhonov functional with respect to the
/// space part of the conductivity, supported on the mask:
///   g = sum_m w_m tau^2 * (coefficient derivative of the step map paired
///       with u and lambda) + gamma_reg (c - c_guess) h^3.
/// theta0/theta1 are the run's initial data (they enter through the start-up
/// step). Both histories must have stride 1.
ScalarField3 assemble_gradient(const WaveHistory& u_hist, const WaveHistory& lam_hist,
                               const ScalarField3& c, const ScalarField3& c_guess,
                               double gamma_reg, const RegionMask& mask,
                               const ScalarField3& theta0, const ScalarField3& theta1,
                               const ForwardOptions& opts);

} // namespace cylwave
