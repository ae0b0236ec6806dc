#include "cylwave/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "cylwave/carleman.hpp"
#include "cylwave/field_io.hpp"
#include "cylwave/rng.hpp"

namespace cylwave {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file " + path.string());
    out << j.dump(2) << "\n";
}

json manifest_base(const std::string& subcommand, const RunConfig& cfg) {
    return json{{"subcommand", subcommand},
                {"version", kVersion},
                {"config_hash", fnv1a64_hex(canonical_config(cfg))},
                {"rng", kCounterRngName},
                {"seed", cfg.seed},
                {"threads", parallel_enabled() ? "parallel" : "serial"}};
}

std::string model_hash(const RunConfig& cfg) {
    std::string s;
    for (const auto& g : cfg.phantom) {
        s += fmt_double(g.amplitude);
        for (double v : g.center) s += ',' + fmt_double(v);
        for (double v : g.widths) s += ',' + fmt_double(v);
        s += ';';
    }
    s += fmt_double(cfg.background) + ';' + fmt_double(cfg.time_part.amplitude);
    for (double v : cfg.time_part.center) s += ',' + fmt_double(v);
    for (double v : cfg.time_part.widths) s += ',' + fmt_double(v);
    return fnv1a64_hex(s);
}

void write_trace_csv(const fs::path& path, const OptTrace& trace) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file " + path.string());
    out << "iter,J,gradnorm,maxc,contrast_error_pct,step\n";
    for (std::size_t n = 0; n < trace.misfit.size(); ++n) {
        out << n << ',' << fmt_double(trace.misfit[n]) << ',' << fmt_double(trace.grad_norm[n])
            << ',' << fmt_double(trace.max_contrast[n]) << ','
            << fmt_double(trace.contrast_error_pct[n]) << ','
            << fmt_double(trace.step_length[n]) << '\n';
    }
}

json condition_json(const HypothesisCondition& c) {
    return json{{"name", c.name},
                {"pass", c.pass},
                {"margin", c.margin},
                {"witness", c.witness},
                {"note", c.note}};
}

int run_forward(const RunConfig& cfg, const fs::path& out_dir) {
    const Grid3 grid = make_grid(cfg);
    const auto model = ConductivityModel::from_analytic(grid, make_phantom(cfg), cfg.time_part,
                                                        cfg.background, cfg.T);
    const ScalarField3 theta0 = make_theta0(cfg, grid);
    const ScalarField3 theta1(grid, 0.0);

    ForwardOptions opts;
    opts.tau = cfg.tau;
    opts.T = cfg.T;
    opts.pulse.omega_p = cfg.omega_p;
    opts.front_axis = cfg.front_axis;
    opts.history_stride = cfg.snapshot_stride;
    opts.parallel = parallel_enabled();

    const auto res = solve_forward(model, theta0, theta1, opts);
    write_record_csv(out_dir / "record.csv", res.record);
    write_record_raw(out_dir / "record", res.record);
    if (cfg.snapshot_stride > 0) {
        for (std::size_t s = 0; s < res.history.snapshots.size(); ++s) {
            ScalarField3 snap(grid);
            snap.values = res.history.snapshots[s];
            char name[32];
            std::snprintf(name, sizeof(name), "u_%06zu.vtk",
                          s * static_cast<std::size_t>(cfg.snapshot_stride));
            write_vtk(out_dir / name, snap, "u");
        }
    }
    return 0;
}

int run_gen_data(const RunConfig& cfg, const fs::path& out_dir) {
    const Grid3 grid = make_grid(cfg);
    const TruthSetup truth = make_truth(cfg);
    BoundaryRecord record =
        generate_data(truth, grid, cfg.refine, cfg.tau, cfg.T, parallel_enabled());
    record = add_noise(record, cfg.sigma, cfg.seed);
    write_record_raw(out_dir / "record", record);
    write_record_csv(out_dir / "record.csv", record);

    json gen{{"refine", cfg.refine},
             {"sigma", cfg.sigma},
             {"seed", cfg.seed},
             {"rng", kCounterRngName},
             {"fine_h", cfg.h / cfg.refine},
             {"fine_tau", cfg.tau / cfg.refine},
             {"fine_dims",
              {(grid.n[0] - 1) * cfg.refine + 1, (grid.n[1] - 1) * cfg.refine + 1,
               (grid.n[2] - 1) * cfg.refine + 1}},
             {"true_model_hash", model_hash(cfg)}};
    write_json(out_dir / "generation_manifest.json", gen);
    return 0;
}

int run_invert(const RunConfig& cfg, const fs::path& out_dir) {
    const Grid3 grid = make_grid(cfg);
    const RegionMask mask = make_mask(cfg, grid);
    const fs::path data_base =
        cfg.data_path.empty() ? out_dir / "record" : fs::path(cfg.data_path);
    const BoundaryRecord data = read_record_raw(data_base);

    InverseConfig inv;
    inv.gamma_reg = cfg.gamma_reg;
    inv.c_low = cfg.c_low;
    inv.c_high = cfg.c_high;
    inv.max_iters = cfg.max_iters;
    inv.T_inv = cfg.T_inv;
    inv.armijo_c1 = cfg.armijo_c1;
    inv.backtrack = cfg.backtrack;
    inv.step_init = cfg.step_init;
    inv.c_true_max = cfg.c_true_max;
    inv.parallel = parallel_enabled();

    const KnownParts known = make_known(cfg, grid);
    const auto result = invert(inv, data, known, grid, mask);

    write_trace_csv(out_dir / "trace.csv", result.trace);
    write_vtk(out_dir / "c_final.vtk", result.c, "c");
    write_field_raw(out_dir / "c_final", result.c);

    const auto& trace = result.trace;
    json summary{{"config_hash", fnv1a64_hex(canonical_config(cfg))},
                 {"config", canonical_config(cfg)},
                 {"front_axis", cfg.front_axis},
                 {"iterations", trace.accepted_steps},
                 {"stop_reason", trace.stop_reason},
                 {"final_misfit", trace.misfit.back()},
                 {"final_gradnorm", trace.grad_norm.back()},
                 {"max_contrast", trace.max_contrast.back()},
                 {"contrast_error_pct", trace.contrast_error_pct.back()},
                 {"seed", cfg.seed}};
    write_json(out_dir / "summary.json", summary);
    return 0;
}

int run_carleman_check(const RunConfig& cfg, const fs::path& out_dir) {
    CarlemanSetup setup = cfg.carleman.setup;
    setup.validate();
    const double axis_hw = std::max(std::abs(cfg.outer.lo[cfg.front_axis]),
                                    std::abs(cfg.outer.hi[cfg.front_axis]));

    const auto delta = find_delta0(setup);
    if (setup.delta <= 0.0) setup.delta = delta.delta0;
    const double g = g_ell(setup, setup.delta);
    if (setup.L <= 0.0) setup.L = g * 1.001;
    if (setup.T <= 0.0) setup.T = g * 1.001;
    const auto lt = check_LT(setup, setup.delta, setup.L, setup.T);
    const auto levels = verify_level_sets(setup, setup.delta, setup.L, setup.T);

    CtildeSampler sampler;
    bool cosine_time = true;
    if (cfg.carleman.fixture == "monotone") {
        sampler = monotone_fixture_sampler(setup, cfg.carleman.base, cfg.carleman.slope, setup.L,
                                           setup.T);
    } else {
        sampler = model_sampler(setup, make_phantom(cfg), cfg.time_part, setup.L, setup.T);
    }
    const auto scan = scan_J_positivity(setup, sampler, cfg.carleman.samples, cfg.carleman.seed);

    // Hypotheses are checked over the physical box, not the admissible slab.
    CtildeSampler hyp_sampler = sampler;
    hyp_sampler.x_lo[2] = -axis_hw;
    hyp_sampler.x_hi[2] = axis_hw;
    const auto theta0_fn = initial_pulse(cfg.init_amplitude, cfg.init_center, cfg.init_widths,
                                         cfg.init_literal_cubic);
    auto theta0_cyl = [&](const std::array<double, 3>& x) {
        return theta0_fn({x[2], x[0], x[1]});
    };
    const auto hyp = check_hypotheses(hyp_sampler, theta0_cyl, setup, cfg.carleman.resolution,
                                      cfg.T, cosine_time);

    json rep{{"fixture", cfg.carleman.fixture},
             {"cross_diameter", setup.cross_diameter()},
             {"delta0", delta.delta0},
             {"delta0_margin_main", delta.margin_main},
             {"delta0_margin_enlarge", delta.margin_enlarge},
             {"delta", setup.delta},
             {"g_ell", g},
             {"L", setup.L},
             {"T", setup.T},
             {"lt_ok", lt.ok},
             {"lt_margin_main", lt.margin_main},
             {"lt_margin_time", lt.margin_time},
             {"lt_window_width", lt.window_width},
             {"scan_min_bracket", scan.min_bracket},
             {"scan_min_J_lower_bound", scan.min_J_lower_bound},
             {"scan_min_A2", scan.min_A2_at_gradpsi},
             {"scan_positive", scan.positive},
             {"levels_ok", levels.ok},
             {"levels_zeta", levels.zeta},
             {"levels_eps", levels.eps},
             {"levels_log_d_ell", levels.log_d_ell},
             {"levels_log_dtilde_ell", levels.log_dtilde_ell},
             {"hypotheses", json::array()},
             {"hypotheses_all_pass", hyp.all_pass()}};
    for (const auto& c : hyp.conditions) rep["hypotheses"].push_back(condition_json(c));
    write_json(out_dir / "carleman_report.json", rep);

    std::ofstream csv(out_dir / "witnesses.csv");
    csv << "what,x1p,x2p,xn,t,value\n";
    csv << "bracket_min," << fmt_double(scan.witness_bracket[0]) << ','
        << fmt_double(scan.witness_bracket[1]) << ',' << fmt_double(scan.witness_bracket[2])
        << ',' << fmt_double(scan.witness_bracket[3]) << ',' << fmt_double(scan.min_bracket)
        << '\n';
    csv << "A2_min," << fmt_double(scan.witness_A2[0]) << ',' << fmt_double(scan.witness_A2[1])
        << ',' << fmt_double(scan.witness_A2[2]) << ',' << fmt_double(scan.witness_A2[3]) << ','
        << fmt_double(scan.min_A2_at_gradpsi) << '\n';
    for (const auto& c : hyp.conditions) {
        csv << c.name << ',' << fmt_double(c.witness[0]) << ',' << fmt_double(c.witness[1])
            << ',' << fmt_double(c.witness[2]) << ',' << fmt_double(c.witness[3]) << ','
            << fmt_double(c.margin) << '\n';
    }
    return 0;
}

int run_stability_probe(const RunConfig& cfg, const fs::path& out_dir) {
    const Grid3 grid = make_grid(cfg);
    const double T = cfg.probe.T;

    // Base coefficient: affine along the long axis; bump supported inside the
    // reconstruction slab |x1| < ell.
    std::vector<double> base(grid.count());
    for (std::size_t idx = 0; idx < grid.count(); ++idx) {
        base[idx] = cfg.probe.base + cfg.probe.slope * grid.coords(idx)[0];
    }
    ConductivityModel c1(grid, std::move(base), CosineTimePart{}, cfg.background, T);

    ScalarField3 bump(grid, 0.0);
    for (std::size_t idx = 0; idx < grid.count(); ++idx) {
        const auto x = grid.coords(idx);
        const double rx = x[0] / (0.9 * cfg.probe.ell);
        const double ry = x[1] / (0.9 * cfg.outer.hi[1]);
        const double rz = x[2] / (0.9 * cfg.outer.hi[2]);
        const double r2 = rx * rx + ry * ry + rz * rz;
        bump.values[idx] = r2 < 1.0 ? std::exp(-r2 / (1.0 - r2)) : 0.0;
    }

    ScalarField3 theta0 = sample_field(grid, initial_pulse(1.0, {0, 0, 0},
                                                           {cfg.probe.theta0_width,
                                                            cfg.probe.theta0_width,
                                                            cfg.probe.theta0_width}));

    const auto probe = stability_probe(c1, bump, cfg.probe.ell, cfg.probe.L, cfg.tau, T, theta0,
                                       cfg.probe.epsilons, parallel_enabled());

    json rep{{"ell", cfg.probe.ell},
             {"L", cfg.probe.L},
             {"T", T},
             {"epsilons", probe.epsilons},
             {"lhs", probe.lhs},
             {"rhs", probe.rhs},
             {"kappa_fit", probe.kappa_fit},
             {"kappa_in_theorem_range", probe.kappa_fit > 0.0 && probe.kappa_fit < 1.0}};
    write_json(out_dir / "probe.json", rep);

    std::ofstream csv(out_dir / "probe.csv");
    csv << "epsilon,lhs,rhs\n";
    for (std::size_t i = 0; i < probe.epsilons.size(); ++i) {
        csv << fmt_double(probe.epsilons[i]) << ',' << fmt_double(probe.lhs[i]) << ','
            << fmt_double(probe.rhs[i]) << '\n';
    }
    return 0;
}

int run_postprocess(const RunConfig& cfg, const fs::path& out_dir) {
    const fs::path input =
        cfg.post_input.empty() ? out_dir / "c_final" : fs::path(cfg.post_input);
    const ScalarField3 field = read_field_raw(input);
    const ScalarField3 processed = postprocess(field, cfg.post_fraction);
    write_vtk(out_dir / "c_post.vtk", processed, "c_post");
    write_field_raw(out_dir / "c_post", processed);
    return 0;
}

} // namespace

Grid3 make_grid(const RunConfig& cfg) { return build_grid(cfg.outer, cfg.h); }

RegionMask make_mask(const RunConfig& cfg, const Grid3& grid) {
    return build_mask(grid, cfg.inner);
}

GaussianSum make_phantom(const RunConfig& cfg) {
    GaussianSum sum;
    sum.offset = cfg.background;
    sum.terms = cfg.phantom;
    return sum;
}

ScalarField3 make_theta0(const RunConfig& cfg, const Grid3& grid) {
    return sample_field(grid, initial_pulse(cfg.init_amplitude, cfg.init_center, cfg.init_widths,
                                            cfg.init_literal_cubic));
}

TruthSetup make_truth(const RunConfig& cfg) {
    TruthSetup truth;
    truth.space = make_phantom(cfg);
    truth.time_part = cfg.time_part;
    truth.background = cfg.background;
    truth.pulse.omega_p = cfg.omega_p;
    truth.theta0 = initial_pulse(cfg.init_amplitude, cfg.init_center, cfg.init_widths,
                                 cfg.init_literal_cubic);
    truth.front_axis = cfg.front_axis;
    return truth;
}

KnownParts make_known(const RunConfig& cfg, const Grid3& grid) {
    KnownParts known;
    known.time_part = cfg.time_part;
    known.background = cfg.background;
    known.theta0 = make_theta0(cfg, grid);
    known.theta1 = ScalarField3(grid, 0.0);
    known.pulse.omega_p = cfg.omega_p;
    known.front_axis = cfg.front_axis;
    return known;
}

int dispatch(const std::string& subcommand, const RunConfig& cfg) {
    const fs::path out_dir(cfg.out_dir);
    try {
        std::filesystem::create_directories(out_dir);
        json manifest = manifest_base(subcommand, cfg);
        write_json(out_dir / "manifest.json", manifest);

        const auto t0 = std::chrono::steady_clock::now();
        int status = 0;
        if (subcommand == "forward") {
            status = run_forward(cfg, out_dir);
        } else if (subcommand == "gen-data") {
            status = run_gen_data(cfg, out_dir);
        } else if (subcommand == "invert") {
            status = run_invert(cfg, out_dir);
        } else if (subcommand == "carleman-check") {
            status = run_carleman_check(cfg, out_dir);
        } else if (subcommand == "stability-probe") {
            status = run_stability_probe(cfg, out_dir);
        } else if (subcommand == "postprocess") {
            status = run_postprocess(cfg, out_dir);
        } else {
            std::cerr << "unknown subcommand '" << subcommand << "'\n";
            return 2;
        }
        const auto t1 = std::chrono::steady_clock::now();
        manifest["wall_time_s"] = std::chrono::duration<double>(t1 - t0).count();
        write_json(out_dir / "manifest.json", manifest);
        return status;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) { // shape/data/index/containment
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) { // CFL, blow-up, search failures
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

} // namespace cylwave
