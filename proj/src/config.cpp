#include "cnls/config.hpp"
#include "cnls/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cnls {

namespace pt = boost::property_tree;

namespace {

Eigen::VectorXd to_vec(const std::vector<double>& v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
}

// Reads sections and keys, recording every key that was consumed so that
// leftovers can be reported as unknown.
class Reader {
public:
    explicit Reader(const pt::ptree& t) : t_(t) {}

    bool has_section(const std::string& s) const { return t_.find(s) != t_.not_found(); }

    std::optional<std::string> raw(const std::string& sec, const std::string& key)
    {
        used_.insert(sec + "." + key);
        auto it = t_.find(sec);
        if (it == t_.not_found()) return std::nullopt;
        auto k = it->second.find(key);
        if (k == it->second.not_found()) return std::nullopt;
        return k->second.data();
    }

    template <class T>
    void get(const std::string& sec, const std::string& key, T& out)
    {
        auto s = raw(sec, key);
        if (!s) return;
        std::istringstream is(*s);
        T v{};
        is >> v;
        std::string rest;
        if (is.fail() || (is >> rest)) throw ConfigError(sec + "." + key + ": cannot parse '" + *s + "'");
        out = v;
    }

    void get(const std::string& sec, const std::string& key, std::string& out)
    {
        if (auto s = raw(sec, key)) out = *s;
    }

    void get_list(const std::string& sec, const std::string& key, std::vector<double>& out)
    {
        if (auto s = raw(sec, key)) out = parse_list(*s, sec + "." + key);
    }

    void check_unknown() const
    {
        for (const auto& [sec, body] : t_) {
            if (body.empty() && !body.data().empty())
                throw ConfigError(sec + ": key outside any section");
            for (const auto& [key, val] : body)
                if (!used_.count(sec + "." + key)) throw ConfigError(sec + "." + key + ": unknown key");
        }
    }

private:
    const pt::ptree& t_;
    std::set<std::string> used_;
};

void require(bool ok, const std::string& field, const std::string& reason)
{
    if (!ok) throw ConfigError(field + ": " + reason);
}

} // namespace

std::vector<double> parse_list(const std::string& s, const std::string& field)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::istringstream is(item);
        double v;
        std::string rest;
        if (!(is >> v) || (is >> rest)) throw ConfigError(field + ": cannot parse '" + item + "' as a number");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError(field + ": empty list");
    return out;
}

CouplingParams RunConfig::coupling() const { return coupling_sigmas(mu1, mu2, beta); }

RunConfig default_config()
{
    RunConfig c;
    c.spec.dim = 2;
    c.spec.blend_radius = 5;
    CriticalPoint a, b;
    a.xi = to_vec({-11, 0});
    b.xi = to_vec({11, 0});
    a.p = b.p = to_vec({0.1, 0.1});
    a.q = b.q = to_vec({0.1, 0.15});
    a.cubic_p = to_vec({-0.02, 0});
    a.cubic_q = to_vec({-0.01, 0});
    b.cubic_p = to_vec({0.02, 0});
    b.cubic_q = to_vec({0.01, 0});
    c.spec.wells = {a, b};
    return c;
}

void RunConfig::validate() const
{
    static const std::set<std::string> modes{"ground-state", "corrections", "solve", "sweep", "mass-root", "verify-all"};
    require(modes.count(mode) > 0, "mode", "unknown mode '" + mode + "'");
    require(dim >= 1 && dim <= 3, "run.dim", "must be 1, 2 or 3");
    require(mu1 > 0 && mu2 > 0, "coupling.mu1/mu2", "must be positive");
    if (!admissible(mu1, mu2, beta))
        throw InadmissibleCoupling("coupling.beta: " + std::to_string(beta) + " is not admissible; admissible β: " +
                                   admissible_intervals(mu1, mu2));
    require(spec.dim == dim, "potential", "well dimension differs from run.dim");
    spec.validate();
    require(margin_y >= 10, "grid.margin", "must be ≥ 10 (units of ε)");
    require(h_y > 0 && h_y <= 0.25, "grid.spacing", "must lie in (0, 0.25] (units of ε)");
    require(solver.tol > 0, "solver.tol", "must be positive");
    require(solver.max_iter >= 1, "solver.max_iter", "must be ≥ 1");
    require(r_max >= 10, "ground_state.r_max", "must be ≥ 10");
    require(n_nodes >= 400, "ground_state.n_nodes", "must be ≥ 400");
    require(corr_half >= 12, "corrections.half_width", "must be ≥ 12");
    require(corr_h > 0 && corr_h <= 0.25, "corrections.spacing", "must lie in (0, 0.25]");
    require(epsilon > 0 && epsilon <= 1, "solve.epsilon", "must lie in (0, 1]");
    require(sweep_parameter == "epsilon" || sweep_parameter == "rho", "sweep.parameter", "must be epsilon or rho");
    for (double v : sweep_values) require(v > 0 && std::isfinite(v), "sweep.values", "values must be positive");
    require(rho_sq_factor > 0, "mass.rho_sq_factor", "must be positive");
    require(eps_lo >= 0 && eps_hi >= 0 && (eps_hi == 0 || eps_hi > eps_lo), "mass.eps_lo/eps_hi",
            "need 0 ≤ eps_lo < eps_hi (0 = automatic)");
    require(mass_tol > 0, "mass.tol", "must be positive");
    require(radial_p > 0 && radial_q > 0, "radial3.p/q", "must be positive (isotropic minimum)");
    require(radial_blend > 0, "radial3.blend_radius", "must be positive");
    for (double f : rho_factors) require(f > 0 && f < 1, "radial3.rho_factors", "factors must lie in (0, 1)");
    require(uniq_epsilon > 0 && uniq_epsilon <= 1, "uniqueness.epsilon", "must lie in (0, 1]");
    require(uniq_restarts >= 1, "uniqueness.restarts", "must be ≥ 1");
    require(uniq_scale >= 0, "uniqueness.scale", "must be ≥ 0");
    require(jobs >= 1, "run.jobs", "must be ≥ 1");
    require(!out.empty(), "run.out", "must not be empty");
}

RunConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot read '" + path + "'");
    pt::ptree t;
    try {
        pt::read_ini(is, t);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    Reader r(t);
    RunConfig c = default_config();

    r.get("run", "mode", c.mode);
    r.get("run", "dim", c.dim);
    r.get("run", "seed", c.seed);
    r.get("run", "jobs", c.jobs);
    r.get("run", "out", c.out);

    r.get("coupling", "mu1", c.mu1);
    r.get("coupling", "mu2", c.mu2);
    r.get("coupling", "beta", c.beta);

    int n_wells = static_cast<int>(c.spec.wells.size());
    r.get("potential", "blend_radius", c.spec.blend_radius);
    r.get("potential", "wells", n_wells);
    require(n_wells >= 1 && n_wells <= 8, "potential.wells", "must lie in [1, 8]");
    c.spec.dim = c.dim;
    bool explicit_wells = false;
    for (int l = 1; l <= n_wells; ++l) explicit_wells |= r.has_section("well" + std::to_string(l));
    if (explicit_wells || c.dim != 2 || n_wells != static_cast<int>(c.spec.wells.size())) {
        c.spec.wells.clear();
        for (int l = 1; l <= n_wells; ++l) {
            const std::string sec = "well" + std::to_string(l);
            require(r.has_section(sec), sec, "missing section");
            std::vector<double> xi, p, q, cp(c.dim, 0.0), cq(c.dim, 0.0);
            r.get_list(sec, "xi", xi);
            r.get_list(sec, "p", p);
            r.get_list(sec, "q", q);
            r.get_list(sec, "cubic_p", cp);
            r.get_list(sec, "cubic_q", cq);
            for (auto* v : {&xi, &p, &q, &cp, &cq})
                require(static_cast<int>(v->size()) == c.dim, sec, "every vector needs run.dim components");
            CriticalPoint w;
            w.xi = to_vec(xi);
            w.p = to_vec(p);
            w.q = to_vec(q);
            w.cubic_p = to_vec(cp);
            w.cubic_q = to_vec(cq);
            c.spec.wells.push_back(w);
        }
    }

    r.get("grid", "margin", c.margin_y);
    r.get("grid", "spacing", c.h_y);
    r.get("solver", "tol", c.solver.tol);
    r.get("solver", "max_iter", c.solver.max_iter);
    r.get("ground_state", "r_max", c.r_max);
    r.get("ground_state", "n_nodes", c.n_nodes);
    r.get("corrections", "half_width", c.corr_half);
    r.get("corrections", "spacing", c.corr_h);
    r.get("solve", "epsilon", c.epsilon);
    r.get("sweep", "parameter", c.sweep_parameter);
    r.get_list("sweep", "values", c.sweep_values);
    r.get("mass", "rho_sq_factor", c.rho_sq_factor);
    r.get("mass", "eps_lo", c.eps_lo);
    r.get("mass", "eps_hi", c.eps_hi);
    r.get("mass", "tol", c.mass_tol);
    r.get("radial3", "p", c.radial_p);
    r.get("radial3", "q", c.radial_q);
    r.get("radial3", "blend_radius", c.radial_blend);
    r.get_list("radial3", "rho_factors", c.rho_factors);
    r.get("uniqueness", "epsilon", c.uniq_epsilon);
    r.get("uniqueness", "restarts", c.uniq_restarts);
    r.get("uniqueness", "scale", c.uniq_scale);
    r.check_unknown();
    return c;
}

} // namespace cnls
