#include "cnls/potentials.hpp"
#include "cnls/errors.hpp"

#include <cmath>
#include <sstream>

namespace cnls {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// second-order jet for the bump
struct Jet {
    double v, d, dd;
};
Jet operator*(Jet a, Jet b) { return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2 * a.d * b.d + a.v * b.dd}; }
Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
Jet recip(Jet a)
{
    double i = 1.0 / a.v;
    return {i, -a.d * i * i, (2 * a.d * a.d * i - a.dd) * i * i};
}
// e^{-1/t} as a jet in t (zero for t <= 0)
Jet flat(Jet t)
{
    if (t.v <= 0) return {0, 0, 0};
    double e = std::exp(-1.0 / t.v), it = 1.0 / t.v;
    double f1 = e * it * it, f2 = e * (it * it * it * it - 2 * it * it * it);
    return {e, f1 * t.d, f2 * t.d * t.d + f1 * t.dd};
}

} // namespace

Bump blend(double r, double Rb)
{
    if (r <= Rb) return {1, 0, 0};
    if (r >= 2 * Rb) return {0, 0, 0};
    Jet t{(2 * Rb - r) / Rb, -1.0 / Rb, 0};
    Jet s{1 - t.v, -t.d, 0};
    Jet f = flat(t), g = flat(s);
    Jet out = f * recip(f + g);
    return {out.v, out.d, out.dd};
}

void PotentialSpec::validate() const
{
    if (dim < 1 || dim > 3) throw ConfigError("potential: dim must be 1..3");
    if (!(blend_radius > 0)) throw ConfigError("potential: blend_radius must be positive");
    for (size_t l = 0; l < wells.size(); ++l) {
        const auto& w = wells[l];
        auto chk = [&](const VectorXd& v, const char* name) {
            if (v.size() != dim)
                throw ConfigError("potential: well " + std::to_string(l + 1) + " field '" + name + "' needs " +
                                  std::to_string(dim) + " entries");
        };
        chk(w.xi, "xi");
        chk(w.p, "p");
        chk(w.q, "q");
        chk(w.cubic_p, "cubic_p");
        chk(w.cubic_q, "cubic_q");
        for (size_t m = 0; m < l; ++m)
            if ((w.xi - wells[m].xi).norm() <= 4 * blend_radius)
                throw ConfigError("potential: wells " + std::to_string(m + 1) + " and " + std::to_string(l + 1) +
                                  " closer than 4*blend_radius");
    }
}

PotentialSpec PotentialSpec::scaled(double f) const
{
    PotentialSpec s = *this;
    for (auto& w : s.wells) {
        w.p *= f;
        w.q *= f;
        w.cubic_p *= f;
        w.cubic_q *= f;
    }
    return s;
}

bool PotentialSpec::has_cubic() const
{
    for (const auto& w : wells)
        if (w.cubic_p.cwiseAbs().maxCoeff() > 0 || w.cubic_q.cwiseAbs().maxCoeff() > 0) return true;
    return false;
}

namespace {
const VectorXd& coef(const CriticalPoint& c, Which w) { return w == Which::P ? c.p : c.q; }
const VectorXd& cub(const CriticalPoint& c, Which w) { return w == Which::P ? c.cubic_p : c.cubic_q; }
} // namespace

double potential_value(const PotentialSpec& s, Which wh, const VectorXd& x)
{
    double out = 0;
    for (const auto& c : s.wells) {
        VectorXd d = x - c.xi;
        Bump b = blend(d.norm(), s.blend_radius);
        if (b.v == 0) continue;
        double poly = 0;
        for (int i = 0; i < s.dim; ++i) poly += d[i] * d[i] * (coef(c, wh)[i] + cub(c, wh)[i] * d[i]);
        out += b.v * poly;
    }
    return out;
}

VectorXd potential_gradient(const PotentialSpec& s, Which wh, const VectorXd& x)
{
    VectorXd g = VectorXd::Zero(s.dim);
    for (const auto& c : s.wells) {
        VectorXd d = x - c.xi;
        double r = d.norm();
        Bump b = blend(r, s.blend_radius);
        if (b.v == 0 && b.d1 == 0) continue;
        double poly = 0;
        VectorXd dp(s.dim);
        for (int i = 0; i < s.dim; ++i) {
            poly += d[i] * d[i] * (coef(c, wh)[i] + cub(c, wh)[i] * d[i]);
            dp[i] = 2 * coef(c, wh)[i] * d[i] + 3 * cub(c, wh)[i] * d[i] * d[i];
        }
        g += b.v * dp;
        if (b.d1 != 0) g += b.d1 * poly * d / r;
    }
    return g;
}

MatrixXd potential_hessian(const PotentialSpec& s, Which wh, const VectorXd& x)
{
    const int n = s.dim;
    MatrixXd H = MatrixXd::Zero(n, n);
    for (const auto& c : s.wells) {
        VectorXd d = x - c.xi;
        double r = d.norm();
        Bump b = blend(r, s.blend_radius);
        if (b.v == 0 && b.d1 == 0 && b.d2 == 0) continue;
        double poly = 0;
        VectorXd dp(n);
        MatrixXd hp = MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            poly += d[i] * d[i] * (coef(c, wh)[i] + cub(c, wh)[i] * d[i]);
            dp[i] = 2 * coef(c, wh)[i] * d[i] + 3 * cub(c, wh)[i] * d[i] * d[i];
            hp(i, i) = 2 * coef(c, wh)[i] + 6 * cub(c, wh)[i] * d[i];
        }
        H += b.v * hp;
        if (b.d1 != 0 || b.d2 != 0) {
            VectorXd e = d / r;
            MatrixXd hc = b.d2 * e * e.transpose() + b.d1 / r * (MatrixXd::Identity(n, n) - e * e.transpose());
            VectorXd gc = b.d1 * e;
            H += hc * poly + gc * dp.transpose() + dp * gc.transpose();
        }
    }
    return 0.5 * (H + H.transpose());
}

double h3_sum(const PotentialSpec& s, const CouplingParams& cp)
{
    double S = 0;
    for (const auto& c : s.wells)
        S += cp.sigma1 * cp.sigma1 * c.p.sum() + cp.sigma2 * cp.sigma2 * c.q.sum();
    return S;
}

HypothesisReport hypothesis_report(const PotentialSpec& s, const CouplingParams& cp)
{
    HypothesisReport rep;
    rep.h2 = true;
    for (const auto& c : s.wells) {
        MatrixXd M = (cp.beta - cp.mu2) * potential_hessian(s, Which::P, c.xi) +
                     (cp.beta - cp.mu1) * potential_hessian(s, Which::Q, c.xi);
        double det = M.determinant();
        rep.det.push_back(det);
        if (std::abs(det) < 1e-12) rep.h2 = false;
    }
    if (s.dim == 2) {
        rep.S = h3_sum(s, cp);
        rep.h3 = std::abs(*rep.S) > 1e-14;
        rep.mass_side = !rep.h3 ? 0 : (*rep.S > 0 ? -1 : +1);
    }
    return rep;
}

std::string HypothesisReport::describe() const
{
    std::ostringstream os;
    os << "H2 " << (h2 ? "pass" : "FAIL") << " (det:";
    for (double d : det) os << " " << d;
    os << ")";
    if (S) {
        os << "; H3 " << (h3 ? "pass" : "FAIL") << " (S = " << *S << ")";
        if (mass_side < 0) os << "; solutions for rho^2 in (rho0^2 - delta, rho0^2)";
        if (mass_side > 0) os << "; solutions for rho^2 in (rho0^2, rho0^2 + delta)";
    } else {
        os << "; H3 not applicable (N != 2)";
    }
    return os.str();
}

} // namespace cnls
