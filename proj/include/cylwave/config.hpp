#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cylwave/analytic.hpp"
#include "cylwave/carleman.hpp"
#include "cylwave/grid.hpp"

namespace cylwave {

/// Carleman subcommand inputs.
struct CarlemanConfig {
    std::string fixture = "monotone"; // "monotone" or "phantom"
    double base = 2.0;                // monotone fixture offset
    double slope = 0.5;               // monotone fixture slope along a'
    CarlemanSetup setup{};
    int samples = 10000;
    std::uint64_t seed = 7;
    int resolution = 21; // hypothesis sampling lattice per axis
};

/// Stability-probe subcommand inputs.
struct ProbeConfig {
    double ell = 0.8;
    double L = 1.6;
    double T = 1.5;
    double base = 2.0;  // probe background conductivity offset
    double slope = 0.5; // slope along the computational long axis
    double theta0_width = 0.2;
    std::vector<double> epsilons = {0.01, 0.01778279410038923, 0.03162277660168379,
                                    0.05623413251903491, 0.1};
};

/// Fully validated run configuration; defaults reproduce the reference
/// reconstruction setup (h = 0.1, tau = 0.003, T = 3, omega_p = 40,
/// gamma = 0.01, admissible interval [1, 10]).
struct RunConfig {
    // domain
    Box3 outer{{-1.8, -0.8, -0.8}, {1.8, 0.8, 0.8}};
    Box3 inner{{-1.6, -0.6, -0.6}, {1.6, 0.6, 0.6}};
    double h = 0.1;
    int front_axis = 0;
    // time
    double tau = 0.003;
    double T = 3.0;
    // source
    double omega_p = 40.0;
    // initial displacement
    double init_amplitude = 1.0;
    std::array<double, 3> init_center{0.0, 0.0, 0.0};
    std::array<double, 3> init_widths{1.0, 1.0, 1.0};
    bool init_literal_cubic = false;
    // conductivity model
    double background = 1.0;
    std::vector<Gaussian3> phantom = {
        {5.0, {0.5, 0.0, 0.0}, {0.2, 0.2, 0.2}},
        {5.0, {-1.0, 0.0, 0.0}, {0.2, 0.2, 0.2}},
    };
    CosineTimePart time_part{0.01, {0.0, 0.0, 0.0}, {0.2, 0.2, 0.2}};
    // synthetic data
    int refine = 2;
    double sigma = 0.03;
    std::uint64_t seed = 424242;
    std::string data_path; // record base path for invert (default: <out>/record)
    // inversion
    double gamma_reg = 0.01;
    double c_low = 1.0;
    double c_high = 10.0;
    int max_iters = 30;
    double T_inv = 3.0;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    double step_init = 1.0;
    double c_true_max = 6.0;
    // carleman / probe
    CarlemanConfig carleman{};
    ProbeConfig probe{};
    // postprocess
    double post_fraction = 0.7;
    std::string post_input; // field base path (default: <out>/c_final)
    // output
    std::string out_dir = "out";
    int snapshot_stride = 0;
};

/// Parses the keyed-section config text. Unknown keys are rejected with
/// ParseError; physical invariants are re-checked and raise ValidationError.
/// An empty text yields the all-defaults configuration.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Canonical one-line-per-field rendering; equal configurations render to
/// equal text. Hashed into run manifests.
std::string canonical_config(const RunConfig& cfg);

/// Re-checks every invariant of a programmatically built config.
void validate_config(const RunConfig& cfg);

} // namespace cylwave
