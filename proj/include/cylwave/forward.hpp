#pragma once

#include "cylwave/kernels.hpp"
#include "cylwave/model.hpp"
#include "cylwave/records.hpp"

namespace cylwave {

/// Boundary-condition set of a whole run.
enum class BoundaryPolicy {
    PaperMixed,   // S1 driven then absorbing, S2 absorbing, S3 reflecting
    NeumannAll,   // homogeneous Neumann everywhere (energy conservation tests)
    DirichletAll, // value pinned to zero everywhere (stability probe)
};

struct ForwardOptions {
    double tau = 0.003;
    double T = 3.0;
    SourcePulse pulse{};
    BoundaryPolicy policy = BoundaryPolicy::PaperMixed;
    int front_axis = 0;
    int history_stride = 1; // 0 = keep no snapshots
    bool parallel = true;
    bool record_front = true;

    int step_count() const;
};

struct ForwardResult {
    WaveHistory history;
    BoundaryRecord record;
};

/// Explicit three-level solve of u_tt = div(ctilde grad u) with the policy's
/// boundary conditions. theta0/theta1 are the initial displacement and
/// velocity on the model grid. Throws CflViolation before stepping and
/// NonFiniteState if the state stops being finite (checked every 100 steps).
ForwardResult solve_forward(const ConductivityModel& model, const ScalarField3& theta0,
                            const ScalarField3& theta1, const ForwardOptions& opts);

/// Boundary modes of time step m under a policy (used by the adjoint and the
/// gradient assembly; exposed for tests).
StepBC step_bc(const ForwardOptions& opts, int m);

/// Directional derivative of the forward map with respect to the space part
/// of the conductivity: returns the front-face samples of du for the
/// perturbation dc, linearized around the stride-1 history u_hist.
BoundaryRecord solve_forward_tangent(const ConductivityModel& model, const ScalarField3& dc,
                                     const ScalarField3& theta0, const ScalarField3& theta1,
                                     const WaveHistory& u_hist, const ForwardOptions& opts);

} // namespace cylwave
