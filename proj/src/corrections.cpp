#include "cnls/corrections.hpp"
#include "cnls/errors.hpp"
#include "cnls/gmres.hpp"
#include "cnls/linearized.hpp"

#include <algorithm>
#include <cmath>

namespace cnls {

using Eigen::VectorXd;

namespace {

RadialBlock radial_block(const GroundState& gs, double lambda)
{
    const ChebRadial& ch = *gs.cheb;
    const int N = gs.dim;
    VectorXd w = gs.vec(), r = ch.r();
    VectorXd coef = lambda * w.array().square().matrix();
    RadialBlock b;
    b.lambda = lambda;
    VectorXd rhs0 = -(r.array().square() * w.array()).matrix();
    VectorXd rhs2 = -w;
    b.z0 = ch.solve(N, coef, rhs0);
    b.g2 = ch.solve(N + 4, coef, rhs2);
    auto resid = [&](int d, const VectorXd& f, const VectorXd& rhs) {
        VectorXd res = -(ch.laplacian(d) * f) + f - coef.cwiseProduct(f) - rhs;
        // relative to the solution size: roundoff in D2 scales with |f|
        return res.segment(1, ch.n() - 1).cwiseAbs().maxCoeff() / std::max(1.0, f.cwiseAbs().maxCoeff());
    };
    b.residual = std::max(resid(N, b.z0, rhs0), resid(N + 4, b.g2, rhs2));
    b.z0t = RadialTable(ch, b.z0, N);
    b.g2t = RadialTable(ch, b.g2, N + 4);
    return b;
}

double quad_form(const std::array<double, 3>& c, const double* y, int dim)
{
    double s = 0;
    for (int i = 0; i < dim; ++i) s += c[i] * y[i] * y[i];
    return s;
}

} // namespace

CorrectionBasis::CorrectionBasis(const ProfilePair& pp) : pp_(pp)
{
    SigmaEigenBasis e = sigma_eigen_decomposition(pp.cp);
    par_ = radial_block(*pp.gs, e.lambda_parallel);
    perp_ = radial_block(*pp.gs, e.lambda_perp);
}

CorrectionField::CorrectionField(std::shared_ptr<const CorrectionBasis> basis, const CriticalPoint& well)
    : basis_(std::move(basis))
{
    const CouplingParams& cp = basis_->profiles().cp;
    dim_ = static_cast<int>(well.p.size());
    const double s1 = cp.sigma1, s2 = cp.sigma2;
    std::array<double, 3> c{}, d{};
    for (int i = 0; i < dim_; ++i) {
        c[i] = s1 * s1 * well.p[i] + s2 * s2 * well.q[i];
        d[i] = s1 * s2 * (well.p[i] - well.q[i]);
        cbar_ += c[i] / dim_;
        dbar_ += d[i] / dim_;
    }
    zero_ = true;
    for (int i = 0; i < dim_; ++i) {
        hc_[i] = c[i] - cbar_;
        hd_[i] = d[i] - dbar_;
        if (c[i] != 0 || d[i] != 0) zero_ = false;
    }
}

void CorrectionField::eval(const double* y, double& ws, double& wt) const
{
    if (zero_) {
        ws = wt = 0;
        return;
    }
    double r2 = 0;
    for (int i = 0; i < dim_; ++i) r2 += y[i] * y[i];
    const double r = std::sqrt(r2);
    const auto& P = basis_->parallel();
    const auto& Q = basis_->perp();
    const CouplingParams& cp = basis_->profiles().cp;
    const double s = std::sqrt(cp.s2());
    double a = (cbar_ * P.z0t.value(r) + P.g2t.value(r) * quad_form(hc_, y, dim_)) / s;
    double b = (dbar_ * Q.z0t.value(r) + Q.g2t.value(r) * quad_form(hd_, y, dim_)) / s;
    ws = (cp.sigma1 * a + cp.sigma2 * b) / s;
    wt = (cp.sigma2 * a - cp.sigma1 * b) / s;
}

namespace {

void check_well(int l, const PotentialSpec& spec, const Grid& g)
{
    if (l < 0 || l >= static_cast<int>(spec.wells.size())) throw ConfigError("correction: well index out of range");
    if (g.dim != spec.dim) throw ConfigError("correction: grid dimension does not match the potential");
    for (int d = 0; d < g.dim; ++d)
        if (g.length(d) < 24.0) throw ConfigError("correction: y-box must extend at least 12 in every direction");
}

// Right-hand side (-Σ p_i y_i² w*, -Σ q_i y_i² w⋆) on a centred grid.
Field2 correction_rhs(const CriticalPoint& well, const ProfilePair& pp, const Grid& g)
{
    Field2 f(g);
    double y[3];
    for (size_t i = 0; i < g.size(); ++i) {
        g.point(i, y);
        double r2 = 0, qp = 0, qq = 0;
        for (int d = 0; d < g.dim; ++d) {
            r2 += y[d] * y[d];
            qp += well.p[d] * y[d] * y[d];
            qq += well.q[d] * y[d] * y[d];
        }
        double w = pp.gs->w(std::sqrt(r2));
        f.u[i] = -qp * pp.cp.sigma1 * w;
        f.v[i] = -qq * pp.cp.sigma2 * w;
    }
    return f;
}

} // namespace

double correction_residual(const CorrectionPair& c, const PotentialSpec& spec, const ProfilePair& pp)
{
    const Grid& g = c.fields.grid;
    LinearizedOperator L(pp, g);
    Field2 Lw = L.apply(c.fields);
    Field2 rhs = correction_rhs(spec.wells[c.well], pp, g);
    double m = 0;
    for (size_t i = 0; i < g.size(); ++i)
        m = std::max({m, std::abs(Lw.u[i] - rhs.u[i]), std::abs(Lw.v[i] - rhs.v[i])});
    return m;
}

CorrectionPair solve_correction_pair(int l, const PotentialSpec& spec, std::shared_ptr<const CorrectionBasis> basis,
                                     const Grid& g)
{
    check_well(l, spec, g);
    CorrectionPair c;
    c.well = l;
    c.field = CorrectionField(basis, spec.wells[l]);
    c.fields = Field2(g);
    double y[3];
    for (size_t i = 0; i < g.size(); ++i) {
        g.point(i, y);
        c.field.eval(y, c.fields.u[i], c.fields.v[i]);
    }
    c.residual = correction_residual(c, spec, basis->profiles());
    return c;
}

CorrectionPair solve_correction_pair_grid(int l, const PotentialSpec& spec, const ProfilePair& pp, const Grid& g,
                                          double rtol)
{
    check_well(l, spec, g);
    const size_t n = g.size();
    LinearizedOperator L(pp, g);
    Spectral& sp = L.spectral();
    Field2 rhs = correction_rhs(spec.wells[l], pp, g);

    std::vector<double> b(2 * n), x(2 * n, 0.0);
    std::copy(rhs.u.begin(), rhs.u.end(), b.begin());
    std::copy(rhs.v.begin(), rhs.v.end(), b.begin() + n);
    LinearMap A = [&](const std::vector<double>& in, std::vector<double>& out) {
        out.resize(2 * n);
        L.apply(in.data(), in.data() + n, out.data(), out.data() + n);
    };
    LinearMap M = [&](const std::vector<double>& in, std::vector<double>& out) {
        out.resize(2 * n);
        sp.helmholtz_inverse(in.data(), out.data(), 1.0, 1.0);
        sp.helmholtz_inverse(in.data() + n, out.data() + n, 1.0, 1.0);
    };
    GmresResult gr = gmres(A, M, b, x, rtol, 80, 2000);
    if (!gr.converged)
        throw SolverError("correction: GMRES stagnated at relative residual " + std::to_string(gr.rel_residual));

    // project out the discrete translation modes
    const auto& w = L.w();
    std::vector<double> dw(n);
    for (int d = 0; d < g.dim; ++d) {
        sp.derivative(w.data(), d, dw.data());
        double zz = 0, xz = 0;
        for (size_t i = 0; i < n; ++i) {
            double z1 = pp.cp.sigma1 * dw[i], z2 = pp.cp.sigma2 * dw[i];
            zz += z1 * z1 + z2 * z2;
            xz += x[i] * z1 + x[n + i] * z2;
        }
        const double c = xz / zz;
        for (size_t i = 0; i < n; ++i) {
            x[i] -= c * pp.cp.sigma1 * dw[i];
            x[n + i] -= c * pp.cp.sigma2 * dw[i];
        }
    }
    CorrectionPair c;
    c.well = l;
    c.fields = Field2(g);
    std::copy(x.begin(), x.begin() + n, c.fields.u.begin());
    std::copy(x.begin() + n, x.end(), c.fields.v.begin());
    c.residual = correction_residual(c, spec, pp);
    return c;
}

RadialCorrection solve_z0_radial(const GroundState& gs)
{
    if (gs.dim != 2) throw NotApplicable("z0: defined for dim = 2");
    RadialBlock b = radial_block(gs, 3.0);
    RadialCorrection rc;
    rc.r = gs.cheb->r();
    rc.z0 = b.z0;
    rc.residual = b.residual;
    rc.wz0_integral = gs.cheb->integrate(gs.vec().cwiseProduct(b.z0));
    return rc;
}

double CorrectionIntegrals::I_gap() const
{
    return I_target != 0 ? std::abs(I - I_target) / std::abs(I_target) : std::abs(I);
}

double CorrectionIntegrals::half_gap() const
{
    return half_target != 0 ? std::abs(half - half_target) / std::abs(half_target) : std::abs(half);
}

CorrectionIntegrals correction_integrals(const ProfilePair& pp, const CorrectionPair& c, const PotentialSpec& spec,
                                         int l, double wz0)
{
    if (spec.dim != 2 || c.fields.grid.dim != 2) throw NotApplicable("correction integrals: defined for dim = 2");
    const Grid& g = c.fields.grid;
    const size_t n = g.size();
    Spectral sp(g);
    std::vector<double> ws(n), wt(n);
    double y[3];
    for (size_t i = 0; i < n; ++i) {
        g.point(i, y);
        double w = pp.gs->w(std::hypot(y[0], y[1]));
        ws[i] = pp.cp.sigma1 * w;
        wt[i] = pp.cp.sigma2 * w;
    }
    CorrectionIntegrals out;
    std::vector<double> a(n), b(n), e(n), f(n);
    double grad = 0;
    for (int d = 0; d < 2; ++d) {
        sp.derivative(ws.data(), d, a.data());
        sp.derivative(c.fields.u.data(), d, b.data());
        sp.derivative(wt.data(), d, e.data());
        sp.derivative(c.fields.v.data(), d, f.data());
        for (size_t i = 0; i < n; ++i) grad += a[i] * b[i] + e[i] * f[i];
    }
    double mass = 0;
    for (size_t i = 0; i < n; ++i) mass += ws[i] * c.fields.u[i] + wt[i] * c.fields.v[i];
    out.half = mass * g.cell();
    out.I = (grad + mass) * g.cell();

    const CriticalPoint& wl = spec.wells[l];
    double S = 0;
    for (int i = 0; i < 2; ++i) S += pp.cp.sigma1 * pp.cp.sigma1 * wl.p[i] + pp.cp.sigma2 * pp.cp.sigma2 * wl.q[i];
    out.I_target = 0.25 * S * pp.gs->moment(2, 1);
    out.half_target = 0.5 * S * wz0;
    return out;
}

DecayFit correction_decay(const CorrectionField& f, double r_lo, double r_hi)
{
    const int N = f.dim();
    // directions: coordinate axes and the main diagonal of each coordinate plane
    std::vector<std::array<double, 3>> dirs;
    for (int i = 0; i < N; ++i) {
        std::array<double, 3> e{};
        e[i] = 1;
        dirs.push_back(e);
        for (int j = i + 1; j < N; ++j) {
            std::array<double, 3> g{};
            g[i] = g[j] = std::sqrt(0.5);
            dirs.push_back(g);
        }
    }
    const int m = 41;
    double sx = 0, sy = 0, sz = 0, sxx = 0, sxy = 0, sxz = 0;
    for (int k = 0; k < m; ++k) {
        const double r = r_lo + (r_hi - r_lo) * k / (m - 1);
        double mx = 0;
        for (const auto& d : dirs) {
            double y[3] = {r * d[0], r * d[1], r * d[2]}, a, b;
            f.eval(y, a, b);
            mx = std::max(mx, std::hypot(a, b));
        }
        if (mx <= 0) return {};
        const double ly = std::log(mx), lz = ly - 0.5 * (N + 3) * std::log(r);
        sx += r;
        sxx += r * r;
        sy += ly;
        sxy += r * ly;
        sz += lz;
        sxz += r * lz;
    }
    const double den = m * sxx - sx * sx;
    return {(m * sxy - sx * sy) / den, (m * sxz - sx * sz) / den};
}

} // namespace cnls
