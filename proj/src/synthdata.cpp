#include "cylwave/synthdata.hpp"

#include <cmath>
#include <string>

#include "cylwave/rng.hpp"

namespace cylwave {

BoundaryRecord generate_data(const TruthSetup& truth, const Grid3& coarse_grid, int refine,
                             double tau, double T, bool parallel) {
    if (refine < 2) {
        throw ValidationError("data generation requires refine >= 2 to avoid the inverse crime");
    }
    const Grid3 fine = build_grid(coarse_grid.box, coarse_grid.h / refine);
    const double fine_tau = tau / refine;

    ConductivityModel model =
        ConductivityModel::from_analytic(fine, truth.space, truth.time_part, truth.background, T);

    ScalarField3 theta0 = sample_field(fine, truth.theta0);
    ScalarField3 theta1(fine, 0.0);
    if (truth.theta1) theta1 = sample_field(fine, truth.theta1);

    ForwardOptions opts;
    opts.tau = fine_tau;
    opts.T = T;
    opts.pulse = truth.pulse;
    opts.policy = BoundaryPolicy::PaperMixed;
    opts.front_axis = truth.front_axis;
    opts.history_stride = 0;
    opts.parallel = parallel;

    const auto fwd = solve_forward(model, theta0, theta1, opts);
    const BoundaryRecord& fine_rec = fwd.record;

    // Restrict to coarse face nodes (every refine-th fine node per axis) and
    // coarse time levels (every refine-th fine level).
    BoundaryRecord coarse;
    coarse.grid = coarse_grid;
    coarse.front_axis = truth.front_axis;
    coarse.tau = tau;
    coarse.steps = static_cast<int>(std::llround(T / tau));
    coarse.face_nodes = front_face_nodes(coarse_grid, truth.front_axis);
    coarse.samples.resize(coarse.levels() * coarse.node_count());

    // Map coarse face-node positions into the fine record's node list.
    std::vector<std::size_t> pick(coarse.face_nodes.size());
    {
        // Fine face nodes are ordered like coarse ones (ascending linear
        // index); index arithmetic gives the match without a search.
        const int a = truth.front_axis;
        const int t1 = (a + 1) % 3, t2 = (a + 2) % 3;
        // transverse axes sorted by memory order for face-node enumeration
        const int lo_ax = std::min(t1, t2), hi_ax = std::max(t1, t2);
        const int fine_lo = fine.n[lo_ax];
        for (std::size_t q = 0; q < coarse.face_nodes.size(); ++q) {
            const auto ijk = coarse_grid.unpack(coarse.face_nodes[q]);
            const int jl = ijk[lo_ax] * refine;
            const int jh = ijk[hi_ax] * refine;
            pick[q] = static_cast<std::size_t>(jl) + static_cast<std::size_t>(fine_lo) * jh;
        }
    }

    for (int m = 0; m <= coarse.steps; ++m) {
        const double* src = fine_rec.level(m * refine);
        double* dst = coarse.level(m);
        for (std::size_t q = 0; q < coarse.face_nodes.size(); ++q) dst[q] = src[pick[q]];
    }
    return coarse;
}

BoundaryRecord add_noise(const BoundaryRecord& record, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw ValidationError("noise level must be >= 0");
    BoundaryRecord out = record;
    if (sigma == 0.0) return out;
    const std::size_t n = out.samples.size();
    for (std::size_t s = 0; s < n; ++s) {
        out.samples[s] *= 1.0 + sigma * counter_uniform_pm1(seed, s);
    }
    return out;
}

} // namespace cylwave
