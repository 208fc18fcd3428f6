#include "cnls/mass.hpp"
#include "cnls/errors.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace cnls {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double rho0_squared(const ProfilePair& pp, int k, int dim)
{
    if (pp.gs->dim != dim) throw ConfigError("rho0: ground state dimension does not match");
    if (k < 1) throw ConfigError("rho0: k must be at least 1");
    return k * pp.cp.s2() * pp.gs->moment(2);
}

double mass_map(const SolvedState& st, double rho)
{
    const double eps = st.sp.epsilon, m = field_mass(st.fields);
    switch (st.fields.grid.dim) {
    case 2:
        return m / (eps * eps);
    case 3:
        return m / (eps * eps * rho * rho);
    default:
        throw NotApplicable("mass map: defined for N = 2, 3");
    }
}

double constant_A(const PotentialSpec& spec, const CouplingParams& cp, const GroundState& gs)
{
    if (spec.dim != 2 || gs.dim != 2) throw NotApplicable("constant A: defined for N = 2");
    return -0.75 * h3_sum(spec, cp) * gs.moment(2, 1);
}

double consistent_A(const PotentialSpec& spec, const CouplingParams& cp, const GroundState& gs, double wz0)
{
    if (spec.dim != 2 || gs.dim != 2) throw NotApplicable("constant A: defined for N = 2");
    return h3_sum(spec, cp) * wz0;
}

double lambda_prediction(double rho, const MassParams& mp, std::optional<double> c_fit)
{
    if (mp.dim == 3 || mp.dim == 1) return std::pow(mp.rho0_sq / (rho * rho), 2);
    const double d = rho * rho - mp.rho0_sq;
    if (mp.A == 0 || d * mp.A <= 0)
        throw WrongMassSide("lambda prediction: ρ² - ρ₀² must have the sign of A (no solution on this side)");
    const double s = std::sqrt(d / mp.A);
    double corr = 1;
    if (c_fit) {
        const double q = *c_fit / (2 * mp.A);
        corr += q * s - 1.5 * q * q * s * s;
    }
    return corr / s;
}

MassRoot bisect_mass(const std::function<double(double)>& dev, double lo, double hi, double tol)
{
    if (!(lo < hi) || lo <= 0) throw ConfigError("mass root: bracket must satisfy 0 < lo < hi");
    MassRoot r;
    r.bracket_lo = lo;
    r.bracket_hi = hi;
    double flo = dev(lo), fhi = dev(hi);
    r.evaluations = 2;
    if (flo == 0 || fhi == 0) {
        r.epsilon = flo == 0 ? lo : hi;
        return r;
    }
    if ((flo > 0) == (fhi > 0))
        throw NoSignChange("mass root: no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                               "]: deviations " + std::to_string(flo) + ", " + std::to_string(fhi),
                           flo, fhi);
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        const double fm = dev(mid);
        ++r.evaluations;
        r.epsilon = mid;
        r.deviation = fm;
        if (std::abs(fm) < tol || hi - lo < 4e-16 * mid) break;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return r;
}

RadialPath::RadialPath(const ProfilePair& pp, const PotentialSpec& spec, int n, double R)
    : pp_(pp), spec_(spec), ch_(n, R, pp.gs->dim)
{
    if (spec.wells.size() != 1) throw ConfigError("radial path: exactly one well required");
    if (spec.dim != pp.gs->dim) throw ConfigError("radial path: potential and ground-state dimensions differ");
    const auto& w = spec.wells[0];
    for (int i = 1; i < spec.dim; ++i)
        if (w.p[i] != w.p[0] || w.q[i] != w.q[0]) throw ConfigError("radial path: well must be isotropic");
    if (spec.has_cubic()) throw ConfigError("radial path: cubic terms break radial symmetry");
    const VectorXd& r = ch_.r();
    U_.resize(r.size());
    V_.resize(r.size());
    for (int i = 0; i < r.size(); ++i) {
        U_[i] = pp.w_star(r[i]);
        V_[i] = pp.w_star2(r[i]);
    }
}

double RadialPath::solve(double eps)
{
    if (!(eps > 0)) throw ConfigError("radial path: epsilon must be positive");
    const VectorXd& r = ch_.r();
    const int m = int(r.size()), n = ch_.n();
    const auto& cp = pp_.cp;
    VectorXd eP(m), eQ(m);
    Eigen::VectorXd x = spec_.wells[0].xi;
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd p = x;
        p[0] += eps * r[i];
        eP[i] = eps * eps * potential_value(spec_, Which::P, p);
        eQ[i] = eps * eps * potential_value(spec_, Which::Q, p);
    }
    const MatrixXd L = ch_.laplacian(ch_.dim());
    const double rob = ch_.robin(ch_.dim());
    MatrixXd J(2 * m, 2 * m);
    VectorXd F(2 * m);
    iters_ = 0;
    double prev_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 40; ++it) {
        VectorXd LU = L * U_, LV = L * V_;
        J.setZero();
        for (int i = 0; i < m; ++i) {
            const double u = U_[i], v = V_[i];
            F[i] = -LU[i] + (1 + eP[i]) * u - cp.mu1 * u * u * u - cp.beta * u * v * v;
            F[m + i] = -LV[i] + (1 + eQ[i]) * v - cp.mu2 * v * v * v - cp.beta * v * u * u;
            J.block(i, 0, 1, m) = -L.row(i);
            J.block(m + i, m, 1, m) = -L.row(i);
            J(i, i) += 1 + eP[i] - 3 * cp.mu1 * u * u - cp.beta * v * v;
            J(m + i, m + i) += 1 + eQ[i] - 3 * cp.mu2 * v * v - cp.beta * u * u;
            J(i, m + i) = -2 * cp.beta * u * v;
            J(m + i, i) = -2 * cp.beta * u * v;
        }
        residual_ = 0;
        for (int i = 1; i < n; ++i) residual_ = std::max({residual_, std::abs(F[i]), std::abs(F[m + i])});
        // regular origin and Robin tail for both components
        for (int c = 0; c < 2; ++c) {
            const VectorXd& f = c == 0 ? U_ : V_;
            const int o = c * m;
            J.row(o).setZero();
            J.block(o, o, 1, m) = ch_.D1().row(0);
            F[o] = ch_.D1().row(0).dot(f);
            J.row(o + n).setZero();
            J.block(o + n, o, 1, m) = ch_.D1().row(n);
            J(o + n, o + n) += rob;
            F[o + n] = ch_.D1().row(n).dot(f) + rob * f[n];
        }
        VectorXd d = J.partialPivLu().solve(-F);
        U_ += d.head(m);
        V_ += d.tail(m);
        ++iters_;
        // relative step; below 1e-9 a non-decreasing step means the roundoff floor
        const double step = d.cwiseAbs().maxCoeff() / std::max(1.0, U_.cwiseAbs().maxCoeff() + V_.cwiseAbs().maxCoeff());
        if (it > 0 && (step < 1e-13 || (step < 1e-9 && step >= 0.5 * prev_step))) break;
        prev_step = step;
        if (it == 39) throw SolverError("radial path: Newton did not converge");
    }
    VectorXd dens = U_.array().square() + V_.array().square();
    return ch_.integrate(dens);
}

RadialMassRoot find_epsilon_for_mass_radial(double rho, RadialPath& path, double rho0_sq, double tol)
{
    const double rho2 = rho * rho;
    auto dev = [&](double eps) { return eps * path.solve(eps) / rho2 - 1.0; };
    RadialMassRoot out;
    out.root = bisect_mass(dev, rho2 / (2 * rho0_sq), 3 * rho2 / (2 * rho0_sq), tol);
    // leave the path at the root for inspection
    out.F = 1.0 + dev(out.root.epsilon);
    out.root.deviation = out.F - 1.0;
    out.lambda = 1.0 / (out.root.epsilon * out.root.epsilon);
    return out;
}

GridMassRoot find_epsilon_for_mass(double rho, const Problem& pr, double eps_lo, double eps_hi, double tol,
                                   const SolveOptions& opt)
{
    if (pr.spec.dim != 2) throw NotApplicable("grid mass root: N = 2 only (use the radial path for N = 3)");
    double lo[3], hi[3];
    for (int d = 0; d < 2; ++d) {
        lo[d] = 1e300;
        hi[d] = -1e300;
        for (const auto& w : pr.spec.wells) {
            lo[d] = std::min(lo[d], w.xi[d]);
            hi[d] = std::max(hi[d], w.xi[d]);
        }
    }
    const Grid g = Grid::covering(2, lo, hi, 20 * eps_hi, 0.2 * eps_lo);
    PeakSet wells;
    for (const auto& w : pr.spec.wells) wells.centers.push_back(w.xi);

    // solved remainders by ε; a new solve starts from the assembled
    // approximation plus the remainder of the nearest previous solve
    std::map<double, Field2> done;
    GridMassRoot out;
    auto dev = [&](double eps) {
        ScaleParams sp = ScaleParams::from_epsilon(eps);
        Field2 U = assemble_approximation(sp, wells, pr.pp, pr.corrections, g);
        Field2 init = U;
        if (!done.empty()) {
            auto it = done.lower_bound(eps);
            if (it == done.end() || (it != done.begin() && eps - std::prev(it)->first < it->first - eps)) --it;
            for (size_t i = 0; i < g.size(); ++i) {
                init.u[i] += it->second.u[i];
                init.v[i] += it->second.v[i];
            }
        }
        out.state = newton_ls_solve(init, sp, pr, wells, opt);
        Field2 rem(g);
        for (size_t i = 0; i < g.size(); ++i) {
            rem.u[i] = out.state.fields.u[i] - U.u[i];
            rem.v[i] = out.state.fields.v[i] - U.v[i];
        }
        done.emplace(eps, std::move(rem));
        return mass_map(out.state, rho) - rho * rho;
    };
    out.root = bisect_mass(dev, eps_lo, eps_hi, tol);
    if (out.state.sp.epsilon != out.root.epsilon) dev(out.root.epsilon);
    return out;
}

} // namespace cnls
