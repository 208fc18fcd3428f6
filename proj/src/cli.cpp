#include "cnls/cli.hpp"
#include "cnls/acceptance.hpp"
#include "cnls/errors.hpp"
#include "cnls/linearized.hpp"
#include "cnls/mass.hpp"
#include "cnls/pipeline.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

namespace cnls {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Artifacts {
public:
    explicit Artifacts(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::ofstream open(const std::string& name) const
    {
        std::ofstream os(dir_ / name, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + path(name));
        return os;
    }

    void json_file(const std::string& name, const json& j) const { open(name) << j.dump(2) << "\n"; }

private:
    fs::path dir_;
};

// reports.json + reports.txt; exit 0 iff every report passes
int finish(const Artifacts& a, const std::vector<CheckReport>& reps, std::ostream& log)
{
    a.open("reports.json") << reports_json(reps) << "\n";
    auto t = a.open("reports.txt");
    write_reports_table(t, reps);
    write_reports_table(log, reps);
    for (const auto& r : reps)
        if (!r.pass || r.inconclusive) return exit_check_failure;
    return exit_pass;
}

std::shared_ptr<const GroundState> ground_state(const RunConfig& cfg, int dim)
{
    return std::make_shared<const GroundState>(solve_ground_state(dim, cfg.r_max, cfg.n_nodes));
}

int mode_ground_state(const RunConfig& cfg, const Artifacts& a, std::ostream& log)
{
    const GroundState g = solve_ground_state(cfg.dim, cfg.r_max, cfg.n_nodes);
    {
        auto os = a.open("ground_state.txt");
        write_ground_state(os, g);
    }
    // log w + r + (N-1)/2 log r on [R/2, 3R/4]
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (size_t i = 0; i < g.r_grid.size(); ++i) {
        const double r = g.r_grid[i];
        if (r < 0.5 * g.r_max || r > 0.75 * g.r_max) continue;
        const double c = g.values[i] * std::exp(r) * std::pow(r, 0.5 * (g.dim - 1));
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    const double spread = (hi - lo) / g.tail_constant;
    a.json_file("tail.json", {{"dim", g.dim},
                              {"r_max", g.r_max},
                              {"tail_constant", g.tail_constant},
                              {"window", {0.5 * g.r_max, 0.75 * g.r_max}},
                              {"relative_spread", spread},
                              {"w0", g.w0()},
                              {"residual", g.residual}});
    std::vector<CheckReport> reps;
    reps.push_back(make_bound_check("ground-state residual", {g.residual}, 1e-8, Provenance::trivial));
    reps.push_back(make_bound_check("tail constant spread", {spread}, 0.01, Provenance::paper));
    if (g.dim == 2) reps.push_back(scalar_virial_check(g));
    return finish(a, reps, log);
}

int mode_corrections(const RunConfig& cfg, const Artifacts& a, std::ostream& log)
{
    auto gs = ground_state(cfg, cfg.dim);
    ProfilePair pp = make_profiles(gs, cfg.coupling(), cfg.dim);
    auto basis = std::make_shared<const CorrectionBasis>(pp);
    Grid g;
    g.dim = cfg.dim;
    const int n = 2 * int(std::lround(cfg.corr_half / cfg.corr_h));
    for (int d = 0; d < 3; ++d) {
        g.n[d] = d < cfg.dim ? n : 1;
        g.x0[d] = d < cfg.dim ? -cfg.corr_half : 0;
    }
    g.h = cfg.corr_h;
    const double wz0 = cfg.dim == 2 ? solve_z0_radial(*gs).wz0_integral : 0.0;
    std::vector<CheckReport> reps;
    json out = json::array();
    for (size_t l = 0; l < cfg.spec.wells.size(); ++l) {
        CorrectionPair c = solve_correction_pair(int(l), cfg.spec, basis, g);
        const std::string name = "correction_well" + std::to_string(l + 1);
        write_field_binary(a.path(name + ".bin"), c.fields);
        DecayFit d = correction_decay(c.field);
        json j{{"well", l + 1}, {"residual", c.residual}, {"decay_slope", d.slope}, {"reduced_slope", d.reduced_slope}};
        // the sampled radial solution meets the grid operator at its spectral floor
        const double scale = std::max({1.0, sup_norm(c.fields.u), sup_norm(c.fields.v)});
        reps.push_back(make_bound_check("correction residual (relative)", {c.residual / scale}, 1e-6,
                                        Provenance::trivial, "well " + std::to_string(l + 1)));
        if (!c.field.zero())
            reps.push_back(make_at_most_check("correction tail log-slope", {d.slope, d.reduced_slope}, -0.9,
                                              Provenance::paper, "well " + std::to_string(l + 1)));
        if (cfg.dim == 2) {
            CorrectionIntegrals ci = correction_integrals(pp, c, cfg.spec, int(l), wz0);
            j["I"] = ci.I;
            j["I_target"] = ci.I_target;
            j["half"] = ci.half;
            j["half_target"] = ci.half_target;
            for (auto r : correction_identity_checks(pp, c, cfg.spec, int(l), wz0)) {
                r.detail = "well " + std::to_string(l + 1) + " " + r.detail;
                reps.push_back(r);
            }
        }
        out.push_back(j);
    }
    if (cfg.dim == 2) {
        reps.push_back(z0_identity_check(*gs, wz0));
        a.json_file("corrections.json", {{"wells", out}, {"wz0_integral", wz0}});
    } else {
        a.json_file("corrections.json", {{"wells", out}});
    }
    return finish(a, reps, log);
}

void write_state(const Artifacts& a, const std::string& stem, const SolvedState& st)
{
    write_field_binary(a.path(stem + ".bin"), st.fields);
    a.open(stem + ".json") << st.to_json() << "\n";
    auto os = a.open(stem + ".csv");
    write_field_csv(os, st.fields);
}

int mode_solve(const RunConfig& cfg, const Artifacts& a, std::ostream& log)
{
    Problem pr = make_problem(cfg, ground_state(cfg, cfg.dim));
    SpectrumReport spec = kernel_diagnostics(pr.pp, 6);
    a.open("spectrum.json") << spec.to_json() << "\n";
    const DegeneracyInfo deg = near_degeneracy(*pr.pp.gs, pr.pp.cp);
    if (deg.flagged)
        log << "warning: coupling lies within 0.05 of a degeneracy threshold (" << deg.nearest_threshold << ")\n";
    SolvedState st = solve_at(cfg.epsilon, pr, cfg.solver, cfg.margin_y, cfg.h_y);
    write_state(a, "state", st);
    std::vector<CheckReport> reps;
    reps.push_back(make_bound_check("residual sup-norm", {st.residual_norm}, cfg.solver.tol, Provenance::trivial));
    reps.push_back(make_check("positivity", {st.positive ? 1.0 : 0.0, st.min_value}, 1, 0, Tolerance::absolute,
                              Provenance::paper));
    reps.push_back(make_at_most_check("newton iterations", {double(st.iterations)}, cfg.solver.max_iter,
                                      Provenance::trivial));
    for (const auto& r : balance_check(st, pr.spec, pr.pp.cp)) reps.push_back(r);
    if (cfg.dim == 2)
        for (size_t l = 0; l < pr.spec.wells.size(); ++l) {
            try {
                reps.push_back(local_pohozaev_check(st, pr.spec, pr.pp.cp, int(l), 1.0, 0));
            } catch (const ConfigError& e) {
                log << "note: Pohozaev check skipped for well " << l + 1 << ": " << e.what() << "\n";
            }
        }
    return finish(a, reps, log);
}

double automatic_guess(const Problem& pr, double rho_sq)
{
    const double r0 = rho0_squared(pr.pp, int(pr.spec.wells.size()), 2);
    const double ac = consistent_A(pr.spec, pr.pp.cp, *pr.pp.gs, solve_z0_radial(*pr.pp.gs).wz0_integral);
    const double d = (rho_sq - r0) / ac;
    if (!(d > 0))
        throw WrongMassSide("mass.rho_sq_factor: rho^2 - rho0^2 must have the sign of S*wz0 (" +
                            std::to_string(ac) + ")");
    return std::pow(d, 0.25);
}

GridMassRoot grid_mass_root(const RunConfig& cfg, const Problem& pr, double rho_sq)
{
    double lo = cfg.eps_lo, hi = cfg.eps_hi;
    if (hi == 0) {
        const double g = automatic_guess(pr, rho_sq);
        lo = 0.75 * g;
        hi = 1.25 * g;
    }
    return find_epsilon_for_mass(std::sqrt(rho_sq), pr, lo, hi, cfg.mass_tol, cfg.solver);
}

int mode_mass_root(const RunConfig& cfg, const Artifacts& a, std::ostream& log)
{
    auto gs = ground_state(cfg, cfg.dim);
    std::vector<CheckReport> reps;
    if (cfg.dim == 3) {
        ProfilePair pp = make_profiles(gs, cfg.coupling(), 3);
        const double r0 = rho0_squared(pp, 1, 3), rho2 = cfg.rho_sq_factor * r0;
        RadialPath path(pp, cfg.spec);
        RadialMassRoot m = find_epsilon_for_mass_radial(std::sqrt(rho2), path, r0, cfg.mass_tol);
        a.json_file("mass_root.json", {{"dim", 3},
                                       {"rho_sq", rho2},
                                       {"rho0_sq", r0},
                                       {"epsilon", m.root.epsilon},
                                       {"lambda", m.lambda},
                                       {"F", m.F},
                                       {"evaluations", m.root.evaluations},
                                       {"bracket", {m.root.bracket_lo, m.root.bracket_hi}},
                                       {"lambda_prediction", r0 * r0 / (rho2 * rho2)}});
        reps.push_back(make_bound_check("|F(eps)-1|", {std::abs(m.F - 1)}, 1e-8, Provenance::paper));
        reps.push_back(make_range_check("eps inside bracket", {m.root.epsilon}, rho2 / (2 * r0), 3 * rho2 / (2 * r0),
                                        Provenance::paper));
        return finish(a, reps, log);
    }
    if (cfg.dim != 2) throw NotApplicable("mass-root: defined for dim = 2 and 3");
    Problem pr = make_problem(cfg, gs);
    const double r0 = rho0_squared(pr.pp, int(pr.spec.wells.size()), 2), rho2 = cfg.rho_sq_factor * r0;
    GridMassRoot m = grid_mass_root(cfg, pr, rho2);
    write_state(a, "state", m.state);
    a.json_file("mass_root.json", {{"dim", 2},
                                   {"rho_sq", rho2},
                                   {"rho0_sq", r0},
                                   {"epsilon", m.root.epsilon},
                                   {"lambda", 1 / (m.root.epsilon * m.root.epsilon)},
                                   {"deviation", m.root.deviation},
                                   {"evaluations", m.root.evaluations},
                                   {"bracket", {m.root.bracket_lo, m.root.bracket_hi}}});
    reps.push_back(make_bound_check("|mass - rho^2| / rho^2", {std::abs(m.root.deviation) / rho2}, 1e-6,
                                    Provenance::trivial));
    reps.push_back(make_bound_check("residual sup-norm", {m.state.residual_norm}, cfg.solver.tol, Provenance::trivial));
    return finish(a, reps, log);
}

int mode_sweep(const RunConfig& cfg, const Artifacts& a, std::ostream& log)
{
    auto gs = ground_state(cfg, cfg.dim);
    std::vector<CheckReport> reps;
    SweepOutcome s;
    if (cfg.sweep_parameter == "epsilon") {
        Problem pr = make_problem(cfg, gs);
        s = epsilon_sweep(pr, cfg.sweep_values, cfg);
        reps = s.reports;
    } else {
        // values are ρ²/ρ₀²
        const std::vector<double> v = dedup_values(cfg.sweep_values, s.warnings);
        if (v.size() < 4) throw ConfigError("sweep.values: at least 4 distinct values required");
        s.samples.resize(v.size());
        std::vector<RelationSample> rel;
        MassParams mp;
        mp.dim = cfg.dim;
        if (cfg.dim == 3) {
            ProfilePair pp = make_profiles(gs, cfg.coupling(), 3);
            mp.rho0_sq = rho0_squared(pp, 1, 3);
            RadialPath path(pp, cfg.spec);
            for (size_t i = 0; i < v.size(); ++i) {
                SweepSample& x = s.samples[i];
                x.rho_sq = v[i] * mp.rho0_sq;
                try {
                    RadialMassRoot m = find_epsilon_for_mass_radial(std::sqrt(x.rho_sq), path, mp.rho0_sq, cfg.mass_tol);
                    x.epsilon = m.root.epsilon;
                    x.lambda = m.lambda;
                    x.F = m.F;
                    x.iterations = m.root.evaluations;
                    x.ok = true;
                } catch (const SolverError& e) {
                    x.error = e.what();
                }
            }
        } else if (cfg.dim == 2) {
            Problem pr = make_problem(cfg, gs);
            const int k = int(pr.spec.wells.size());
            mp.k = k;
            mp.rho0_sq = rho0_squared(pr.pp, k, 2);
            mp.A = constant_A(pr.spec, pr.pp.cp, *gs);
            auto errs = parallel_for(v.size(), cfg.jobs, [&](size_t i) {
                SweepSample& x = s.samples[i];
                x.rho_sq = v[i] * mp.rho0_sq;
                GridMassRoot m = grid_mass_root(cfg, pr, x.rho_sq);
                x.epsilon = m.root.epsilon;
                x.lambda = 1 / (x.epsilon * x.epsilon);
                x.F = x.rho_sq + m.root.deviation;
                x.remainder_H = m.state.remainder_H_norm;
                for (int l = 0; l < k; ++l)
                    x.shifts.push_back((m.state.peaks.centers[l] - pr.spec.wells[l].xi).norm());
                x.iterations = m.root.evaluations;
                x.ok = true;
            });
            for (size_t i = 0; i < v.size(); ++i)
                if (errs[i]) {
                    try {
                        std::rethrow_exception(errs[i]);
                    } catch (const ConfigError&) {
                        throw;
                    } catch (const std::exception& e) {
                        s.samples[i].error = e.what();
                    }
                }
        } else {
            throw NotApplicable("sweep over rho: defined for dim = 2 and 3");
        }
        for (const auto& x : s.samples) {
            if (x.ok) {
                rel.push_back({x.rho_sq, x.lambda});
            } else {
                s.warnings.push_back("sweep: rho^2/rho0^2=" + std::to_string(x.rho_sq / mp.rho0_sq) +
                                     " failed: " + x.error);
            }
        }
        try {
            reps.push_back(lambda_mass_relation_check(rel, mp));
        } catch (const ConfigError& e) {
            reps.push_back(make_check("lambda-rho relation", {std::nan("")}, 0, 0, Tolerance::absolute,
                                      Provenance::paper, e.what()));
        }
        {
            auto os = a.open("lambda_rho.csv");
            os << "rho_sq,lambda\n" << std::setprecision(17);
            for (const auto& r : rel) os << r.rho_sq << ',' << r.lambda << '\n';
        }
    }
    for (const auto& w : s.warnings) log << "warning: " << w << "\n";
    {
        auto os = a.open("sweep.csv");
        write_sweep_csv(os, s);
    }
    if (cfg.sweep_parameter == "epsilon") write_sweep_plots(a.path(""), "sweep", s);
    return finish(a, reps, log);
}

int mode_verify_all(const RunConfig& cfg, std::ostream& log)
{
    AcceptanceRun run = run_acceptance(cfg, cfg.out, &log);
    for (const auto& w : run.warnings) log << "warning: " << w << "\n";
    write_acceptance_summary(log, run);
    return run.all_pass() ? exit_pass : exit_check_failure;
}

} // namespace

int run_mode(const RunConfig& cfg, std::ostream& log)
{
    try {
        cfg.validate();
        if (cfg.mode == "verify-all") return mode_verify_all(cfg, log);
        Artifacts a(cfg.out);
        if (cfg.mode == "ground-state") return mode_ground_state(cfg, a, log);
        if (cfg.mode == "corrections") return mode_corrections(cfg, a, log);
        if (cfg.mode == "solve") return mode_solve(cfg, a, log);
        if (cfg.mode == "sweep") return mode_sweep(cfg, a, log);
        return mode_mass_root(cfg, a, log);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const NotApplicable& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const SolverError& e) {
        log << "solver failure (" << cfg.mode << "): " << e.what() << "\n";
        return exit_solver_failure;
    } catch (const std::exception& e) {
        log << "failure (" << cfg.mode << "): " << e.what() << "\n";
        return exit_solver_failure;
    }
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"coupled NLS concentration solver"};
    std::string mode, config, outdir;
    int jobs = 0;
    std::uint64_t seed = 0;
    app.add_option("mode", mode, "pipeline to run")
        ->required()
        ->check(CLI::IsMember({"ground-state", "corrections", "solve", "sweep", "mass-root", "verify-all"}));
    app.add_option("--config", config, "INI config file")->required();
    auto* o_out = app.add_option("--out", outdir, "output directory (overrides run.out)");
    auto* o_jobs = app.add_option("--jobs", jobs, "worker threads (overrides run.jobs)")->check(CLI::PositiveNumber);
    auto* o_seed = app.add_option("--seed", seed, "random seed (overrides run.seed)");
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_pass : exit_config_error;
    }
    RunConfig cfg;
    try {
        cfg = load_config(config);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
    cfg.mode = mode;
    if (*o_out) cfg.out = outdir;
    if (*o_jobs) cfg.jobs = jobs;
    if (*o_seed) cfg.seed = seed;
    return run_mode(cfg, err);
}

} // namespace cnls
