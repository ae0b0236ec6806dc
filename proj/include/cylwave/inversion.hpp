#pragma once

#include <string>
#include <vector>

#include "cylwave/adjoint.hpp"

namespace cylwave {

/// Reconstruction loop parameters. Defaults reproduce the reference setup.
struct InverseConfig {
    double gamma_reg = 0.01;
    double c_low = 1.0;
    double c_high = 10.0;
    int max_iters = 30;
    double T_inv = 3.0;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    double step_init = 1.0;      // scaled by 1/|g_0|_inf before use
    double grad_rtol = 1e-3;     // stop when |g_n| <= grad_rtol |g_0|
    double misfit_stag_rtol = 1e-6; // stop when |J_n - J_{n-1}| <= rtol J_0
    double c_true_max = 6.0;     // contrast-error denominator in the trace
    bool parallel = true;
};

/// Per-iteration log of the reconstruction.
struct OptTrace {
    std::vector<double> misfit;
    std::vector<double> grad_norm;
    std::vector<double> max_contrast;
    std::vector<double> contrast_error_pct;
    std::vector<double> step_length;
    int accepted_steps = 0; // final iteration count
    std::string stop_reason;
};

/// Everything about the problem the inversion treats as known.
struct KnownParts {
    CosineTimePart time_part{};
    double background = 1.0;
    ScalarField3 theta0;
    ScalarField3 theta1;
    SourcePulse pulse{};
    int front_axis = 0;
};

/// Node-wise clamp onto the admissible interval; idempotent.
ScalarField3 project_admissible(const ScalarField3& c, double c_low, double c_high);

/// 100 |max_mask c - c_true_max| / c_true_max.
double contrast_error(const ScalarField3& c_rec, const RegionMask& mask, double c_true_max);

/// Threshold-to-background post-processing: values below
/// 1 + p (max c - 1) become 1, the rest are kept, then clamped to [1,10].
ScalarField3 postprocess(const ScalarField3& c, double fraction);

struct InversionResult {
    ScalarField3 c;
    OptTrace trace;
};

/// Projected Polak-Ribiere conjugate gradients with Armijo backtracking over
/// the admissible set, reconstructing the space part of the conductivity
/// inside the mask from front-face observations.
InversionResult invert(const InverseConfig& config, const BoundaryRecord& data,
                       const KnownParts& known, const Grid3& grid, const RegionMask& mask);

} // namespace cylwave
