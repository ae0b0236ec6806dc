#include "cylwave/model.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace cylwave {

namespace {

// Range of cos(t) over [0, horizon].
std::pair<double, double> cos_range(double horizon) {
    double lo = std::min(1.0, std::cos(horizon));
    if (horizon >= std::numbers::pi) lo = -1.0;
    return {lo, 1.0};
}

} // namespace

ConductivityModel::ConductivityModel(Grid3 grid, std::vector<double> space_part,
                                     CosineTimePart time_part, double background, double horizon)
    : grid_(grid),
      space_(std::move(space_part)),
      time_(time_part),
      background_(background),
      horizon_(horizon) {
    if (space_.size() != grid_.count()) {
        throw ShapeMismatch("space part size does not match grid node count");
    }
    time_profile_.resize(grid_.count());
    for (std::size_t idx = 0; idx < grid_.count(); ++idx) {
        time_profile_[idx] = time_.spatial(grid_.coords(idx));
    }
    refresh_bounds();
}

ConductivityModel ConductivityModel::from_analytic(const Grid3& grid, const GaussianSum& space,
                                                   const CosineTimePart& time_part,
                                                   double background, double horizon) {
    std::vector<double> values(grid.count());
    for (std::size_t idx = 0; idx < grid.count(); ++idx) values[idx] = space(grid.coords(idx));
    ConductivityModel model(grid, std::move(values), time_part, background, horizon);
    model.space_analytic_ = space;
    return model;
}

void ConductivityModel::fill_ctilde(double t, double* out) const {
    const double s = time_.amplitude * std::cos(t);
    const std::size_t n = grid_.count();
    if (s == 0.0) {
        std::copy(space_.begin(), space_.end(), out);
        return;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = space_[i] + s * time_profile_[i];
}

void ConductivityModel::refresh_bounds() {
    const auto [cmin, cmax] = cos_range(horizon_);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const double a = time_.amplitude;
    for (std::size_t i = 0; i < space_.size(); ++i) {
        const double g = time_profile_[i];
        const double t1 = space_[i] + a * cmin * g;
        const double t2 = space_[i] + a * cmax * g;
        lo = std::min({lo, t1, t2});
        hi = std::max({hi, t1, t2});
    }
    ct_min_ = lo;
    ct_max_ = hi;
    if (!(ct_min_ > 0.0)) {
        throw ValidationError("conductivity loses ellipticity: min over nodes and times is " +
                              std::to_string(ct_min_));
    }
}

double evaluate_ctilde(const ConductivityModel& model, std::size_t node, double t) {
    if (node >= model.grid().count()) throw IndexOutOfRange("node index out of range");
    return model.ctilde_at(node, t);
}

CflReport cfl_check(const ConductivityModel& model, double h, double tau) {
    CflReport r;
    r.tau_max = h / (std::sqrt(3.0) * std::sqrt(model.ctilde_max()));
    r.ok = tau <= r.tau_max;
    return r;
}

} // namespace cylwave
