#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "cylwave/analytic.hpp"
#include "cylwave/grid.hpp"

namespace cylwave {

/// Single-cycle sine pulse driving the front face: f(t) = sin(omega_p t) on
/// (0, 2 pi / omega_p), zero afterwards.
struct SourcePulse {
    double omega_p = 40.0;

    double duration() const { return 2.0 * std::numbers::pi / omega_p; }
    double operator()(double t) const {
        if (t <= 0.0 || t >= duration()) return 0.0;
        return std::sin(omega_p * t);
    }
    /// Time after which the front face switches from driven to absorbing.
    double switch_time() const { return duration(); }
};

/// Total conductivity c(x) + amplitude cos(t) G(x): a grid-sampled space part
/// over a fixed background plus an analytic time-dependent part. Positivity
/// over [0, T] is sampled at construction.
class ConductivityModel {
public:
    ConductivityModel(Grid3 grid, std::vector<double> space_part, CosineTimePart time_part,
                      double background, double horizon);

    /// Builds the model from analytic descriptors; keeps them for off-grid
    /// evaluation (refined-grid sampling, hypothesis checks).
    static ConductivityModel from_analytic(const Grid3& grid, const GaussianSum& space,
                                           const CosineTimePart& time_part, double background,
                                           double horizon);

    const Grid3& grid() const { return grid_; }
    const std::vector<double>& space_part() const { return space_; }
    std::vector<double>& mutable_space_part() { return space_; }
    const std::vector<double>& time_profile() const { return time_profile_; }
    const CosineTimePart& time_part() const { return time_; }
    double background() const { return background_; }
    double horizon() const { return horizon_; }
    double ctilde_min() const { return ct_min_; }
    double ctilde_max() const { return ct_max_; }
    const std::optional<GaussianSum>& space_analytic() const { return space_analytic_; }

    double ctilde_at(std::size_t node, double t) const {
        return space_[node] + time_.amplitude * std::cos(t) * time_profile_[node];
    }
    /// Fills out with the nodal coefficient at time t.
    void fill_ctilde(double t, double* out) const;

    /// Recomputes the sampled positivity bounds (after editing the space part).
    void refresh_bounds();

private:
    Grid3 grid_;
    std::vector<double> space_;
    std::vector<double> time_profile_; // G(x) at nodes
    CosineTimePart time_;
    double background_ = 1.0;
    double horizon_ = 0.0;
    double ct_min_ = 0.0, ct_max_ = 0.0;
    std::optional<GaussianSum> space_analytic_;
};

/// Nodal coefficient value at a node and time (the model contract surface).
double evaluate_ctilde(const ConductivityModel& model, std::size_t node, double t);

struct CflReport {
    bool ok = false;
    double tau_max = 0.0;
};

/// Explicit-scheme bound tau_max = h / (sqrt(3) max sqrt(ctilde)).
CflReport cfl_check(const ConductivityModel& model, double h, double tau);

} // namespace cylwave
