#include "cnls/pipeline.hpp"
#include "cnls/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

namespace cnls {

std::vector<std::exception_ptr> parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn)
{
    std::vector<std::exception_ptr> errs(n);
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    const size_t t = std::min<size_t>(std::max(jobs, 1), n);
    if (t <= 1) {
        worker();
        return errs;
    }
    std::vector<std::thread> pool;
    for (size_t k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return errs;
}

Problem make_problem(const RunConfig& cfg, std::shared_ptr<const GroundState> gs, const std::vector<int>& wells)
{
    Problem pr;
    pr.pp = make_profiles(std::move(gs), cfg.coupling(), cfg.dim);
    pr.spec = cfg.spec;
    if (!wells.empty()) {
        pr.spec.wells.clear();
        for (int l : wells) {
            if (l < 0 || l >= int(cfg.spec.wells.size())) throw ConfigError("potential: well index out of range");
            pr.spec.wells.push_back(cfg.spec.wells[l]);
        }
    }
    auto basis = std::make_shared<const CorrectionBasis>(pr.pp);
    for (const auto& w : pr.spec.wells) pr.corrections.emplace_back(basis, w);
    return pr;
}

PeakSet well_centres(const PotentialSpec& spec)
{
    PeakSet p;
    for (const auto& w : spec.wells) p.centers.push_back(w.xi);
    return p;
}

std::vector<double> dedup_values(const std::vector<double>& v, std::vector<std::string>& warnings)
{
    std::vector<double> out;
    for (double x : v) {
        bool dup = std::any_of(out.begin(), out.end(),
                               [&](double y) { return std::abs(x - y) <= 1e-12 * std::max(std::abs(x), std::abs(y)); });
        if (dup) {
            std::ostringstream m;
            m << "sweep: duplicate value " << x << " dropped";
            warnings.push_back(m.str());
        } else {
            out.push_back(x);
        }
    }
    return out;
}

namespace {

CheckReport fit_report(const std::string& name, const std::vector<std::pair<double, double>>& s, double lo, double hi,
                       Provenance prov, OrderFit* fit)
{
    std::ostringstream d;
    try {
        OrderFit f = order_fit(s);
        if (fit) *fit = f;
        d << "n=" << s.size() << " log-residual=" << f.residual;
        return make_range_check(name, {f.slope, f.intercept}, lo, hi, prov, d.str());
    } catch (const ConfigError& e) {
        CheckReport r = make_range_check(name, {std::nan("")}, lo, hi, prov, e.what());
        return r;
    }
}

} // namespace

SweepOutcome epsilon_sweep(const Problem& pr, const std::vector<double>& eps_in, const RunConfig& cfg,
                           bool keep_states)
{
    SweepOutcome out;
    const std::vector<double> eps = dedup_values(eps_in, out.warnings);
    if (eps.size() < 4) throw ConfigError("sweep.values: at least 4 distinct values required");
    const size_t k = pr.spec.wells.size();
    out.samples.resize(eps.size());
    auto errs = parallel_for(eps.size(), cfg.jobs, [&](size_t i) {
        SweepSample& s = out.samples[i];
        s.epsilon = eps[i];
        s.lambda = 1 / (eps[i] * eps[i]);
        SolvedState st = solve_at(eps[i], pr, cfg.solver, cfg.margin_y, cfg.h_y);
        s.iterations = st.iterations;
        s.F = s.rho_sq = field_mass(st.fields) * s.lambda;
        s.remainder_H = st.remainder_H_norm;
        for (size_t l = 0; l < k; ++l) s.shifts.push_back((st.peaks.centers[l] - pr.spec.wells[l].xi).norm());
        s.balance = balance_vector_norms(st, pr.spec, pr.pp.cp);
        s.ok = true;
        if (keep_states) s.state = std::make_shared<SolvedState>(std::move(st));
    });
    for (size_t i = 0; i < eps.size(); ++i) {
        if (!errs[i]) continue;
        try {
            std::rethrow_exception(errs[i]);
        } catch (const std::exception& e) {
            out.samples[i].error = e.what();
        }
        out.samples[i].ok = false;
        std::ostringstream m;
        m << "sweep: eps=" << eps[i] << " failed: " << out.samples[i].error;
        out.warnings.push_back(m.str());
    }

    std::vector<std::pair<double, double>> rem;
    std::vector<std::vector<std::pair<double, double>>> sh(k), ba(k);
    for (const auto& s : out.samples) {
        if (!s.ok) continue;
        out.reports.push_back(make_bound_check("newton iterations", {double(s.iterations)}, cfg.solver.max_iter + 0.5,
                                               Provenance::paper, "eps=" + std::to_string(s.epsilon)));
        rem.push_back({s.epsilon, s.remainder_H});
        for (size_t l = 0; l < k; ++l) {
            sh[l].push_back({s.epsilon, s.shifts[l]});
            ba[l].push_back({s.epsilon, s.balance[l]});
        }
    }
    const double nd = pr.spec.dim;
    out.reports.push_back(fit_report("remainder order (H-norm)", rem, 4 + nd / 2 + 0.5, 4 + nd / 2 + 1.5,
                                     Provenance::paper, &out.remainder_fit));
    out.shift_fits.resize(k);
    out.balance_fits.resize(k);
    for (size_t l = 0; l < k; ++l) {
        out.reports.push_back(fit_report("peak shift order, well " + std::to_string(l + 1), sh[l], 1.7, 2.3,
                                         Provenance::paper, &out.shift_fits[l]));
        out.reports.push_back(fit_report("balance order, well " + std::to_string(l + 1), ba[l], 1.6, 2.4,
                                         Provenance::paper, &out.balance_fits[l]));
    }
    return out;
}

void write_sweep_csv(std::ostream& os, const SweepOutcome& s)
{
    size_t k = 0;
    for (const auto& x : s.samples) k = std::max(k, x.shifts.size());
    os << "epsilon,lambda,rho_sq,F,remainder_H";
    for (size_t l = 0; l < k; ++l) os << ",shift_" << l + 1;
    os << ",iterations,status\n";
    os << std::setprecision(17);
    for (const auto& x : s.samples) {
        os << x.epsilon << ',' << x.lambda << ',';
        if (x.ok) {
            os << x.rho_sq << ',' << x.F << ',' << x.remainder_H;
            for (size_t l = 0; l < k; ++l) os << ',' << (l < x.shifts.size() ? x.shifts[l] : std::nan(""));
        } else {
            os << "nan,nan,nan";
            for (size_t l = 0; l < k; ++l) os << ",nan";
        }
        os << ',' << x.iterations << ',' << (x.ok ? "ok" : "failed") << '\n';
    }
}

void write_sweep_plots(const std::string& dir, const std::string& stem, const SweepOutcome& s)
{
    namespace fs = std::filesystem;
    auto emit = [&](const std::string& name, std::vector<std::pair<double, double>> pts) {
        if (pts.size() < 4) return;
        try {
            OrderFit f = order_fit(pts);
            std::ofstream os(fs::path(dir) / (stem + "_" + name + ".csv"));
            write_order_fit_csv(os, pts, f);
        } catch (const ConfigError&) {
        }
    };
    std::vector<std::pair<double, double>> rem;
    size_t k = 0;
    for (const auto& x : s.samples)
        if (x.ok) {
            rem.push_back({x.epsilon, x.remainder_H});
            k = std::max(k, x.shifts.size());
        }
    emit("remainder", rem);
    for (size_t l = 0; l < k; ++l) {
        std::vector<std::pair<double, double>> sh, ba;
        for (const auto& x : s.samples)
            if (x.ok) {
                sh.push_back({x.epsilon, x.shifts[l]});
                ba.push_back({x.epsilon, x.balance[l]});
            }
        emit("shift_" + std::to_string(l + 1), sh);
        emit("balance_" + std::to_string(l + 1), ba);
    }
}

} // namespace cnls
