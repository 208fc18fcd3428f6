#include "cnls/solver.hpp"
#include "cnls/errors.hpp"
#include "cnls/gmres.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>

namespace cnls {

namespace {

struct Sampled {
    std::vector<double> P, Q;
};

Sampled sample_potentials(const PotentialSpec& spec, const Grid& g)
{
    Sampled s;
    s.P.resize(g.size());
    s.Q.resize(g.size());
    Eigen::VectorXd x(g.dim);
    double p[3];
    for (size_t i = 0; i < g.size(); ++i) {
        g.point(i, p);
        for (int d = 0; d < g.dim; ++d) x[d] = p[d];
        s.P[i] = potential_value(spec, Which::P, x);
        s.Q[i] = potential_value(spec, Which::Q, x);
    }
    return s;
}

// out = (-ε²Δ + ε²V + 1) a
void apply_H(Spectral& sp, double eps, const std::vector<double>& V, const double* a, double* out)
{
    const size_t n = V.size();
    sp.laplacian(a, out);
    const double e2 = eps * eps;
    for (size_t i = 0; i < n; ++i) out[i] = -e2 * out[i] + (e2 * V[i] + 1.0) * a[i];
}

void residual_into(Spectral& sp, double eps, const Sampled& pot, const CouplingParams& cp, const double* u,
                   const double* v, double* ru, double* rv)
{
    const size_t n = pot.P.size();
    apply_H(sp, eps, pot.P, u, ru);
    apply_H(sp, eps, pot.Q, v, rv);
    for (size_t i = 0; i < n; ++i) {
        const double uu = u[i] * u[i], vv = v[i] * v[i];
        ru[i] -= (cp.mu1 * uu + cp.beta * vv) * u[i];
        rv[i] -= (cp.mu2 * vv + cp.beta * uu) * v[i];
    }
}

double sup(const std::vector<double>& a, size_t lo, size_t hi)
{
    double m = 0;
    for (size_t i = lo; i < hi; ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

// Radial profile derivatives at y (rescaled, relative to a centre).
void profile_derivs(const GroundState& gs, const double* y, int N, double* d1, double* d2)
{
    double r2 = 0;
    for (int d = 0; d < N; ++d) r2 += y[d] * y[d];
    const double r = std::sqrt(r2);
    const double wp = gs.table.deriv(r), wpp = gs.table.deriv2(r);
    const double wp_r = r > 1e-8 ? wp / r : wpp;
    for (int j = 0; j < N; ++j) {
        d1[j] = wp_r * y[j];
        if (d2)
            for (int m = 0; m < N; ++m) {
                double e = r > 1e-8 ? y[j] * y[m] / r2 : 0.0;
                d2[j * N + m] = wpp * e + wp_r * ((j == m ? 1.0 : 0.0) - e);
            }
    }
}

class NewtonLS {
public:
    NewtonLS(const ScaleParams& sp, const Problem& pr, const Grid& g)
        : sp_(sp), pr_(pr), g_(g), spc_(g), n_(g.size()), k_(int(pr.spec.wells.size())), N_(g.dim),
          pot_(sample_potentials(pr.spec, g))
    {
        if (!pr.corrections.empty() && int(pr.corrections.size()) != k_)
            throw ConfigError("solve: one correction per well required");
    }

    SolvedState run(const Field2& init, const PeakSet& peaks0, const SolveOptions& opt);

private:
    ScaleParams sp_;
    const Problem& pr_;
    Grid g_;
    Spectral spc_;
    size_t n_;
    int k_, N_;
    Sampled pot_;

    std::vector<Eigen::VectorXd> xi_;
    std::vector<double> phi_;                    // 2n
    std::vector<double> U_;                      // 2n, Σ well pieces
    std::vector<std::vector<double>> piece_;     // per well, 2n
    std::vector<std::vector<double>> T_, Zh_;    // per (l,j), 2n
    Eigen::MatrixXd B_;                          // kN × kN
    std::vector<double> c11_, c22_, c12_, tmp_;

    size_t m() const { return size_t(k_) * N_; }
    const CorrectionField& corr(int l) const
    {
        static const CorrectionField none;
        return pr_.corrections.empty() ? none : pr_.corrections[l];
    }
    void build_pieces(const std::vector<Eigen::VectorXd>& xi);
    void build_kernel(const std::vector<double>& u);
    void apply_J(const double* a, const double* b, double* oa, double* ob);
    double merit(const std::vector<double>& F, const std::vector<double>& C) const
    {
        double s = 0;
        for (double x : F) s += x * x;
        for (double x : C) s += x * x;
        return s;
    }
    void evaluate(std::vector<double>& u, std::vector<double>& F, std::vector<double>& C);
};

void NewtonLS::build_pieces(const std::vector<Eigen::VectorXd>& xi)
{
    piece_.assign(k_, std::vector<double>(2 * n_, 0.0));
    U_.assign(2 * n_, 0.0);
    for (int l = 0; l < k_; ++l) {
        add_well(g_, sp_.epsilon, xi[l], pr_.pp, corr(l), piece_[l].data(), piece_[l].data() + n_);
        for (size_t i = 0; i < 2 * n_; ++i) U_[i] += piece_[l][i];
    }
}

// Current fields u = U(ξ) + φ, residual F and constraints C.
void NewtonLS::evaluate(std::vector<double>& u, std::vector<double>& F, std::vector<double>& C)
{
    u.resize(2 * n_);
    for (size_t i = 0; i < 2 * n_; ++i) u[i] = U_[i] + phi_[i];
    F.resize(2 * n_);
    residual_into(spc_, sp_.epsilon, pot_, pr_.pp.cp, u.data(), u.data() + n_, F.data(), F.data() + n_);
    C.assign(m(), 0.0);
    for (size_t a = 0; a < Zh_.size(); ++a) {
        double s = 0;
        for (size_t i = 0; i < 2 * n_; ++i) s += phi_[i] * Zh_[a][i];
        C[a] = s;
    }
}

// Kernel directions at the current centres: Ẑ = H Z / |H Z| (Euclidean),
// T = ∂U/∂η with η = ξ/ε, and B = ∂C/∂η at fixed φ.
void NewtonLS::build_kernel(const std::vector<double>& u)
{
    const double eps = sp_.epsilon, s1 = pr_.pp.cp.sigma1, s2 = pr_.pp.cp.sigma2;
    const GroundState& gs = *pr_.pp.gs;
    T_.assign(m(), std::vector<double>(2 * n_));
    Zh_.assign(m(), std::vector<double>(2 * n_));
    B_ = Eigen::MatrixXd::Zero(m(), m());

    std::vector<double> Hphi(2 * n_);
    apply_H(spc_, eps, pot_.P, phi_.data(), Hphi.data());
    apply_H(spc_, eps, pot_.Q, phi_.data() + n_, Hphi.data() + n_);

    std::vector<double> Z(2 * n_), d2(size_t(N_) * N_ * n_);
    for (int l = 0; l < k_; ++l) {
        double x[3], y[3], dd1[3], dd2[9];
        for (int j = 0; j < N_; ++j) {
            for (size_t i = 0; i < n_; ++i) {
                g_.point(i, x);
                for (int d = 0; d < N_; ++d) y[d] = (x[d] - xi_[l][d]) / eps;
                profile_derivs(gs, y, N_, dd1, j == 0 ? dd2 : nullptr);
                if (j == 0)
                    for (int q = 0; q < N_ * N_; ++q) d2[size_t(q) * n_ + i] = dd2[q];
                Z[i] = s1 * dd1[j];
                Z[n_ + i] = s2 * dd1[j];
            }
            const size_t a = size_t(l) * N_ + j;
            apply_H(spc_, eps, pot_.P, Z.data(), Zh_[a].data());
            apply_H(spc_, eps, pot_.Q, Z.data() + n_, Zh_[a].data() + n_);
            double nz = 0;
            for (double t : Zh_[a]) nz += t * t;
            nz = std::sqrt(nz);
            for (double& t : Zh_[a]) t /= nz;
            // ∂C_a/∂η_{l,mm} = -⟨Hφ, ∂_{y_mm} Z_a⟩ / |HZ_a|
            for (int mm = 0; mm < N_; ++mm) {
                const double* dz = d2.data() + size_t(j * N_ + mm) * n_;
                double s = 0;
                for (size_t i = 0; i < n_; ++i) s += (Hphi[i] * s1 + Hphi[n_ + i] * s2) * dz[i];
                B_(a, size_t(l) * N_ + mm) = -s / nz;
            }
            // T = ∂U_l/∂η_j = -∂_{y_j} U_l = -ε ∂_{x_j} U_l
            spc_.derivative(piece_[l].data(), j, T_[a].data());
            spc_.derivative(piece_[l].data() + n_, j, T_[a].data() + n_);
            for (double& t : T_[a]) t *= -eps;
        }
    }
    const auto& cp = pr_.pp.cp;
    c11_.resize(n_);
    c22_.resize(n_);
    c12_.resize(n_);
    for (size_t i = 0; i < n_; ++i) {
        const double uu = u[i] * u[i], vv = u[n_ + i] * u[n_ + i];
        c11_[i] = 3 * cp.mu1 * uu + cp.beta * vv;
        c22_[i] = 3 * cp.mu2 * vv + cp.beta * uu;
        c12_[i] = 2 * cp.beta * u[i] * u[n_ + i];
    }
}

void NewtonLS::apply_J(const double* a, const double* b, double* oa, double* ob)
{
    apply_H(spc_, sp_.epsilon, pot_.P, a, oa);
    apply_H(spc_, sp_.epsilon, pot_.Q, b, ob);
    for (size_t i = 0; i < n_; ++i) {
        oa[i] -= c11_[i] * a[i] + c12_[i] * b[i];
        ob[i] -= c22_[i] * b[i] + c12_[i] * a[i];
    }
}

SolvedState NewtonLS::run(const Field2& init, const PeakSet& peaks0, const SolveOptions& opt)
{
    if (!(init.grid == g_)) throw ConfigError("solve: initial data on a different grid");
    if (int(peaks0.centers.size()) != k_) throw ConfigError("solve: one initial peak per well required");
    xi_ = peaks0.centers;
    build_pieces(xi_);
    phi_.resize(2 * n_);
    for (size_t i = 0; i < n_; ++i) {
        phi_[i] = init.u[i] - U_[i];
        phi_[n_ + i] = init.v[i] - U_[n_ + i];
    }
    SolvedState st;
    st.sp = sp_;
    // The bordered system [J, JT; Ẑᵀ, B][δφ; δη] = -[F; C] is solved by block
    // elimination: δu = δφ + Tδη solves J δu = -F (symmetric, MINRES with
    // the SPD preconditioner (-ε²Δ+1)⁻¹), then (B - ẐᵀT) δη = -C - Ẑᵀδu.
    std::vector<double> u, F, C, rhs(2 * n_), du(2 * n_);
    LinearMap A = [&](const std::vector<double>& in, std::vector<double>& out) {
        out.resize(2 * n_);
        apply_J(in.data(), in.data() + n_, out.data(), out.data() + n_);
    };
    LinearMap P = [&](const std::vector<double>& in, std::vector<double>& out) {
        out.resize(2 * n_);
        const double e2 = sp_.epsilon * sp_.epsilon;
        spc_.helmholtz_inverse(in.data(), out.data(), e2, 1.0);
        spc_.helmholtz_inverse(in.data() + n_, out.data() + n_, e2, 1.0);
    };

    evaluate(u, F, C);
    build_kernel(u);
    evaluate(u, F, C);
    for (int it = 0;; ++it) {
        const double res = sup(F, 0, F.size());
        const double cres = C.empty() ? 0.0 : sup(C, 0, C.size());
        st.residual_history.push_back(res);
        if (it >= 1 && res < opt.tol && cres < 10 * opt.tol) break;
        if (it >= opt.max_iter)
            throw SolverError("newton: no convergence in " + std::to_string(opt.max_iter) +
                              " iterations (residual " + std::to_string(res) + ")");
        for (size_t i = 0; i < 2 * n_; ++i) rhs[i] = -F[i];
        std::fill(du.begin(), du.end(), 0.0);
        // inexact Newton: the forcing term shrinks with the residual
        const double rtol = std::clamp(1e-2 * res, opt.gmres_rtol, 1e-4);
        GmresResult gr = minres(A, P, rhs, du, rtol, opt.gmres_max);
        st.gmres_iterations += gr.iterations;
        if (!gr.converged)
            throw SolverError("newton: linear solve did not converge (relative residual " +
                              std::to_string(gr.rel_residual) + ")");
        Eigen::MatrixXd S = B_;
        Eigen::VectorXd r(m());
        for (size_t a = 0; a < m(); ++a) {
            double zd = 0;
            for (size_t i = 0; i < 2 * n_; ++i) zd += Zh_[a][i] * du[i];
            r[a] = -C[a] - zd;
            for (size_t b = 0; b < m(); ++b) {
                double zt = 0;
                for (size_t i = 0; i < 2 * n_; ++i) zt += Zh_[a][i] * T_[b][i];
                S(a, b) -= zt;
            }
        }
        Eigen::VectorXd deta = m() ? Eigen::VectorXd(S.fullPivLu().solve(r)) : Eigen::VectorXd();
        std::vector<double> dx(du);
        for (size_t a = 0; a < m(); ++a)
            for (size_t i = 0; i < 2 * n_; ++i) dx[i] -= deta[a] * T_[a][i];
        double step = 0;
        for (double t : du) step = std::max(step, std::abs(t));
        for (size_t a = 0; a < m(); ++a) step = std::max(step, std::abs(deta[a]));
        st.step_norms.push_back(step);

        // backtracking on |F|² + |C|²
        const double m0 = merit(F, C);
        const std::vector<double> phi0 = phi_;
        const std::vector<Eigen::VectorXd> xi0 = xi_;
        double t = 1;
        bool ok = false;
        for (int h = 0; h <= 8; ++h, t *= 0.5) {
            for (size_t i = 0; i < 2 * n_; ++i) phi_[i] = phi0[i] + t * dx[i];
            for (int l = 0; l < k_; ++l)
                for (int j = 0; j < N_; ++j) xi_[l][j] = xi0[l][j] + t * sp_.epsilon * deta[size_t(l) * N_ + j];
            build_pieces(xi_);
            evaluate(u, F, C);
            if (merit(F, C) < m0 || m0 < 1e-28) {
                ok = true;
                break;
            }
        }
        if (!ok) throw SolverError("newton: line search failed after 8 halvings");
        st.iterations = it + 1;
        build_kernel(u);
        evaluate(u, F, C);
    }

    st.fields = Field2(g_);
    std::copy(u.begin(), u.begin() + n_, st.fields.u.begin());
    std::copy(u.begin() + n_, u.end(), st.fields.v.begin());
    st.residual_norm = sup(F, 0, F.size());
    st.constraint_norm = C.empty() ? 0.0 : sup(C, 0, C.size());
    st.centers.centers = xi_;
    double umax = 0, mn = 1e300;
    for (size_t i = 0; i < 2 * n_; ++i) {
        umax = std::max(umax, u[i]);
        mn = std::min(mn, u[i]);
    }
    st.min_value = mn;
    st.positive = mn > -opt.positivity_tol * umax;
    return st;
}

} // namespace

Field2 residual_eq1(const Field2& f, const ScaleParams& sp, const PotentialSpec& spec, const CouplingParams& cp)
{
    Spectral s(f.grid);
    Sampled pot = sample_potentials(spec, f.grid);
    Field2 r(f.grid);
    residual_into(s, sp.epsilon, pot, cp, f.u.data(), f.v.data(), r.u.data(), r.v.data());
    return r;
}

double h_inner(const Field2& a, const Field2& b, const ScaleParams& sp, const PotentialSpec& spec)
{
    if (!(a.grid == b.grid)) throw ConfigError("h_inner: grid mismatch");
    Spectral s(a.grid);
    Sampled pot = sample_potentials(spec, a.grid);
    const size_t n = a.grid.size();
    std::vector<double> hb(n);
    double acc = 0;
    apply_H(s, sp.epsilon, pot.P, b.u.data(), hb.data());
    for (size_t i = 0; i < n; ++i) acc += a.u[i] * hb[i];
    apply_H(s, sp.epsilon, pot.Q, b.v.data(), hb.data());
    for (size_t i = 0; i < n; ++i) acc += a.v[i] * hb[i];
    return acc * a.grid.cell();
}

SolvedState newton_ls_solve(const Field2& initial, const ScaleParams& sp, const Problem& pr, const PeakSet& peaks0,
                            const SolveOptions& opt)
{
    NewtonLS solver(sp, pr, initial.grid);
    SolvedState st = solver.run(initial, peaks0, opt);
    double radius = pr.spec.blend_radius;
    st.peaks = recover_peaks(st.fields, pr.pp.cp, st.centers, radius);
    RemainderReport rr = remainder_report(st, pr, st.centers);
    st.remainder_H_norm = rr.H_norm;
    st.remainder_sup = rr.sup;
    return st;
}

SolvedState solve_at(double eps, const Problem& pr, const SolveOptions& opt, double margin_y, double h_y)
{
    ScaleParams sp = ScaleParams::from_epsilon(eps);
    Grid g = solution_grid(pr.spec, eps, margin_y, h_y);
    PeakSet p0;
    for (const auto& w : pr.spec.wells) p0.centers.push_back(w.xi);
    Field2 init = assemble_approximation(sp, p0, pr.pp, pr.corrections, g);
    return newton_ls_solve(init, sp, pr, p0, opt);
}

RemainderReport remainder_report(const SolvedState& st, const Problem& pr, const PeakSet& centers)
{
    const Grid& g = st.fields.grid;
    Field2 U = assemble_approximation(st.sp, centers, pr.pp, pr.corrections, g);
    RemainderReport rr;
    rr.remainder = Field2(g);
    for (size_t i = 0; i < g.size(); ++i) {
        rr.remainder.u[i] = st.fields.u[i] - U.u[i];
        rr.remainder.v[i] = st.fields.v[i] - U.v[i];
    }
    rr.sup = std::max(sup_norm(rr.remainder.u), sup_norm(rr.remainder.v));
    rr.H_norm = h_norm(rr.remainder, st.sp, pr.spec);
    const double eps = st.sp.epsilon;
    const int N = g.dim;
    for (const auto& c : centers.centers) {
        for (int j = 0; j < N; ++j) {
            Field2 Z(g);
            double x[3], y[3], d1[3];
            for (size_t i = 0; i < g.size(); ++i) {
                g.point(i, x);
                for (int d = 0; d < N; ++d) y[d] = (x[d] - c[d]) / eps;
                profile_derivs(*pr.pp.gs, y, N, d1, nullptr);
                Z.u[i] = pr.pp.cp.sigma1 * d1[j];
                Z.v[i] = pr.pp.cp.sigma2 * d1[j];
            }
            rr.projections.push_back(h_inner(rr.remainder, Z, st.sp, pr.spec) / h_norm(Z, st.sp, pr.spec));
        }
    }
    return rr;
}

PeakSet recover_peaks(const Field2& f, const CouplingParams& cp, const PeakSet& guesses, double radius)
{
    const Grid& g = f.grid;
    const int N = g.dim;
    std::vector<double> s(g.size());
    for (size_t i = 0; i < g.size(); ++i) s[i] = cp.sigma1 * f.u[i] + cp.sigma2 * f.v[i];
    Spectral sp(g);
    TrigInterp ti(sp, s.data());
    PeakSet out;
    for (const auto& c : guesses.centers) {
        // discrete maximum within the search radius
        size_t best = 0;
        double bv = -1e300, x[3];
        for (size_t i = 0; i < g.size(); ++i) {
            g.point(i, x);
            double r2 = 0;
            for (int d = 0; d < N; ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
            if (r2 <= radius * radius && s[i] > bv) {
                bv = s[i];
                best = i;
            }
        }
        // 3^N least-squares quadratic fit
        std::array<int, 3> idx{0, 0, 0};
        {
            size_t r = best;
            for (int d = N - 1; d >= 0; --d) {
                idx[d] = int(r % g.n[d]);
                r /= g.n[d];
            }
        }
        const int nb = N == 1 ? 3 : (N == 2 ? 9 : 27);
        const int np = 1 + N + N * (N + 1) / 2;
        Eigen::MatrixXd A(nb, np);
        Eigen::VectorXd b(nb);
        for (int t = 0; t < nb; ++t) {
            int off[3] = {0, 0, 0}, tt = t;
            for (int d = 0; d < N; ++d) {
                off[d] = tt % 3 - 1;
                tt /= 3;
            }
            size_t lin = 0;
            for (int d = 0; d < N; ++d) lin = lin * g.n[d] + size_t((idx[d] + off[d] + g.n[d]) % g.n[d]);
            int col = 0;
            A(t, col++) = 1;
            for (int d = 0; d < N; ++d) A(t, col++) = off[d];
            for (int d = 0; d < N; ++d)
                for (int e = d; e < N; ++e) A(t, col++) = d == e ? 0.5 * off[d] * off[d] : double(off[d] * off[e]);
            b[t] = s[lin];
        }
        Eigen::VectorXd cf = A.colPivHouseholderQr().solve(b);
        Eigen::VectorXd gr(N);
        Eigen::MatrixXd H(N, N);
        int col = 1 + N;
        for (int d = 0; d < N; ++d) gr[d] = cf[1 + d];
        for (int d = 0; d < N; ++d)
            for (int e = d; e < N; ++e) H(d, e) = H(e, d) = cf[col++];
        Eigen::VectorXd off = -H.ldlt().solve(gr);
        Eigen::VectorXd p(N);
        for (int d = 0; d < N; ++d) p[d] = g.coord(d, idx[d]) + g.h * std::clamp(off[d], -1.0, 1.0);
        // Newton on the trigonometric interpolant
        for (int it = 0; it < 20; ++it) {
            double gg[3], hh[9];
            ti.gradient(p.data(), gg);
            ti.hessian(p.data(), hh);
            Eigen::VectorXd gv = Eigen::Map<Eigen::VectorXd>(gg, N);
            Eigen::MatrixXd hv = Eigen::Map<Eigen::Matrix<double, -1, -1, Eigen::RowMajor>>(hh, N, N);
            Eigen::VectorXd dp = -hv.ldlt().solve(gv);
            if (dp.norm() > g.h) dp *= g.h / dp.norm();
            p += dp;
            if (dp.norm() < 1e-14 * (1 + p.norm())) break;
        }
        out.centers.push_back(p);
    }
    return out;
}

double reflection_defect(const Field2& f, int axis)
{
    const Grid& g = f.grid;
    double m = 0;
    std::array<int, 3> n{1, 1, 1};
    for (int d = 0; d < g.dim; ++d) n[d] = g.n[d];
    for (int i = 0; i < n[0]; ++i)
        for (int j = 0; j < n[1]; ++j)
            for (int k = 0; k < n[2]; ++k) {
                std::array<int, 3> a{i, j, k}, b = a;
                b[axis] = (n[axis] - a[axis]) % n[axis];
                size_t ia = (size_t(a[0]) * n[1] + a[1]) * n[2] + a[2];
                size_t ib = (size_t(b[0]) * n[1] + b[1]) * n[2] + b[2];
                m = std::max({m, std::abs(f.u[ia] - f.u[ib]), std::abs(f.v[ia] - f.v[ib])});
            }
    return m;
}

bool reflection_symmetric(const PotentialSpec& spec, const Grid& g, int axis)
{
    const double c = g.x0[axis] + 0.5 * g.n[axis] * g.h;
    auto cubic = [](const Eigen::VectorXd& v, int d) { return v.size() > d ? v[d] : 0.0; };
    for (const auto& w : spec.wells) {
        bool found = false;
        for (const auto& o : spec.wells) {
            bool same = std::abs(o.xi[axis] - (2 * c - w.xi[axis])) < 1e-12;
            for (int d = 0; d < spec.dim && same; ++d) {
                if (d != axis && std::abs(o.xi[d] - w.xi[d]) > 1e-12) same = false;
                if (o.p[d] != w.p[d] || o.q[d] != w.q[d]) same = false;
                double sgn = d == axis ? -1.0 : 1.0;
                if (cubic(o.cubic_p, d) != sgn * cubic(w.cubic_p, d) || cubic(o.cubic_q, d) != sgn * cubic(w.cubic_q, d))
                    same = false;
            }
            if (same) found = true;
        }
        if (!found) return false;
    }
    return true;
}

std::string SolvedState::to_json() const
{
    nlohmann::json j;
    j["epsilon"] = sp.epsilon;
    j["lambda"] = sp.lambda;
    auto pts = [](const PeakSet& p) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& c : p.centers) a.push_back(std::vector<double>(c.data(), c.data() + c.size()));
        return a;
    };
    j["peaks"] = pts(peaks);
    j["centers"] = pts(centers);
    j["remainder_H_norm"] = remainder_H_norm;
    j["remainder_sup"] = remainder_sup;
    j["residual_norm"] = residual_norm;
    j["constraint_norm"] = constraint_norm;
    j["iterations"] = iterations;
    j["gmres_iterations"] = gmres_iterations;
    j["step_norms"] = step_norms;
    j["residual_history"] = residual_history;
    j["min_value"] = min_value;
    j["positive"] = positive;
    j["grid"] = {{"dim", fields.grid.dim},
                 {"n", std::vector<int>(fields.grid.n.begin(), fields.grid.n.begin() + fields.grid.dim)},
                 {"h", fields.grid.h}};
    return j.dump(2);
}

} // namespace cnls
