#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cylwave/forward.hpp"

namespace cylwave {

// The verifier works in cylinder coordinates x = (x'_1, x'_2, x_n): a bounded
// cross-section omega in the transverse plane and an unbounded axis x_n. The
// computational grid maps its long axis x1 to x_n and (x2, x3) to x'.

/// Geometry and constants of the weight-function hypotheses.
struct CarlemanSetup {
    std::array<double, 2> cross_lo{-0.8, -0.8};
    std::array<double, 2> cross_hi{0.8, 0.8};
    std::array<double, 2> a_prime{1.0, 0.0}; // unit transverse direction
    double a0 = 0.5;                          // lower bound in the monotonicity hypothesis
    double c_m = 1.0;                         // ellipticity constant
    double c_M = 1.0;                         // norm bound
    double delta = 0.0;                       // weight shift (0 = search for it)
    double gamma_w = 1.0;                     // weight exponent
    double ell = 1.6;                         // reconstruction half-extent
    double L = 0.0;                           // observation half-extent
    double T = 0.0;                           // time horizon
    double eps = 0.0;                         // level-set margin
    double zeta = 0.0;                        // level-set gap

    /// Diameter of the cross-section (the |omega| constant in the bounds).
    double cross_diameter() const;
    void validate() const;
};

/// psi(x,t) = |x' - delta a'|^2 - x_n^2 - t^2 at the setup's delta.
double weight_psi(const CarlemanSetup& s, const std::array<double, 3>& x, double t);
/// exp(gamma psi); overflows to +inf past exp(700), use weight_log_phi then.
double weight_phi(const CarlemanSetup& s, const std::array<double, 3>& x, double t);
/// log of the weight, gamma * psi: the overflow-safe path.
double weight_log_phi(const CarlemanSetup& s, const std::array<double, 3>& x, double t);

/// g_ell(delta) = (sup_omega |x'-delta a'|^2 - inf_omega |x'-delta a'|^2 + ell^2)^(1/2).
double g_ell(const CarlemanSetup& s, double delta);

struct Delta0Result {
    double delta0 = 0.0;
    double margin_main = 0.0;    // slack of the delta inequality at delta0
    double margin_enlarge = 0.0; // slack of sqrt(c_m) inf |x'-delta a'| > g_ell
    int scan_index = 0;
};

/// Smallest delta on the geometric grid 1.05^k (from 1, capped at 1e6)
/// satisfying both admissibility inequalities. Throws NotFoundBelowCap when
/// the constants are inconsistent.
Delta0Result find_delta0(const CarlemanSetup& s);

struct LTReport {
    bool ok = false;
    double margin_main = 0.0;   // slack of the (delta, L, T) inequality
    double margin_time = 0.0;   // slack of sqrt(c_m) inf |x'-delta a'| > T
    double window_lo = 0.0;     // g_ell(delta)
    double window_width = 0.0;  // largest admissible window width
};

/// Checks that (L, T) are admissible for the given delta: both strict
/// inequalities hold and L, T lie in (g_ell, g_ell + width) for the largest
/// width found by bisection.
LTReport check_LT(const CarlemanSetup& s, double delta, double L, double T);

/// Pointwise conductivity sampler in cylinder coordinates with a finite
/// difference step for derivatives (one-sided near the stated bounds).
struct CtildeSampler {
    std::function<double(const std::array<double, 3>&, double)> value;
    double fd_step = 0.05;
    std::array<double, 3> x_lo{}, x_hi{}; // sampling domain (axis included)
    double t_lo = 0.0, t_hi = 0.0;

    double eval(const std::array<double, 3>& x, double t) const { return value(x, t); }
    std::array<double, 3> grad_x(const std::array<double, 3>& x, double t) const;
    double dt(const std::array<double, 3>& x, double t) const;
};

struct ScanResult {
    double min_bracket = 0.0;        // minimum of the symbol-positivity bracket
    double min_J_lower_bound = 0.0;  // 4 * min_bracket (unit dual variable)
    double min_A2_at_gradpsi = 0.0;
    std::array<double, 4> witness_bracket{}; // (x'_1, x'_2, x_n, t)
    std::array<double, 4> witness_A2{};
    bool positive = false;
};

/// Monte Carlo scan of the reduced symbol-positivity bound and of
/// A2(x, grad psi) over omega x [-L, L] x [0, T]; deterministic under seed.
ScanResult scan_J_positivity(const CarlemanSetup& s, const CtildeSampler& ctilde, int samples,
                             std::uint64_t seed);

struct LevelSetReport {
    bool ok = false;
    double log_d_ell = 0.0;      // gamma * min psi at t = 0 over the core
    double log_dtilde_ell = 0.0; // log_d_ell - gamma zeta^2
    double d_ell = 0.0;          // exp of the above (may overflow to inf)
    double dtilde_ell = 0.0;
    double eps = 0.0;
    double zeta = 0.0;
    double tightest_margin = 0.0; // most violated slack when not ok
};

/// Verifies the level-set sandwich of the weight: the core value at t = 0
/// dominates the weight near |t| = T and near |x_n| = L by a factor
/// exp(-gamma zeta^2), for some eps < (L - ell)/2 found on a grid.
LevelSetReport verify_level_sets(const CarlemanSetup& s, double delta, double L, double T);

struct HypothesisCondition {
    std::string name;
    bool pass = false;
    double margin = 0.0;
    std::array<double, 4> witness{}; // (x'_1, x'_2, x_n, t) of the extremum
    std::string note;
};

struct HypothesisReport {
    std::vector<HypothesisCondition> conditions;
    bool all_pass() const {
        for (const auto& c : conditions)
            if (!c.pass) return false;
        return true;
    }
    const HypothesisCondition* find(const std::string& name) const {
        for (const auto& c : conditions)
            if (c.name == name) return &c;
        return nullptr;
    }
};

/// Samples the coefficient hypotheses (ellipticity, norm bound, transverse
/// monotonicity), the initial-condition conditions, and the time-part side
/// conditions. Derivatives are sampled to order 2; higher orders are noted,
/// not estimated. theta0 is a spatial function in cylinder coordinates.
HypothesisReport check_hypotheses(const CtildeSampler& ctilde,
                                  const std::function<double(const std::array<double, 3>&)>& theta0,
                                  const CarlemanSetup& s, int resolution, double T,
                                  bool time_part_is_cosine);

struct ProbeResult {
    std::vector<double> epsilons;
    std::vector<double> lhs; // H1(Omega_ell) coefficient distances
    std::vector<double> rhs; // H3(0,T;L2(Gamma_L)) flux distances
    double kappa_fit = 0.0;  // least-squares slope of log lhs vs log rhs
};

/// One flux-vs-coefficient comparison with the Dirichlet-lateral solver.
struct ProbePair {
    double lhs = 0.0;
    double rhs = 0.0;
};
ProbePair stability_probe_pair(const ConductivityModel& c1, const ConductivityModel& c2,
                               double ell, double L, double tau, double T,
                               const ScalarField3& theta0, bool parallel);

/// Empirical stability exponent: runs the pair probe for c2 = c1 + eps * bump
/// over a log-spaced sweep and fits the Holder exponent.
ProbeResult stability_probe(const ConductivityModel& c1, const ScalarField3& bump, double ell,
                            double L, double tau, double T, const ScalarField3& theta0,
                            const std::vector<double>& epsilons, bool parallel);

/// Samplers in cylinder coordinates for the two standard test coefficients.
CtildeSampler monotone_fixture_sampler(const CarlemanSetup& s, double base, double slope,
                                       double axis_halfwidth, double T);
CtildeSampler model_sampler(const CarlemanSetup& s, const GaussianSum& space,
                            const CosineTimePart& time_part, double axis_halfwidth, double T);

} // namespace cylwave
