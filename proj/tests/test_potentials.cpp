#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cnls/errors.hpp"
#include "cnls/potentials.hpp"

using namespace cnls;
using Eigen::VectorXd;

namespace {
CriticalPoint well(VectorXd xi, VectorXd p, VectorXd q)
{
    int n = static_cast<int>(xi.size());
    return {xi, p, q, VectorXd::Zero(n), VectorXd::Zero(n)};
}
VectorXd v2(double a, double b) { return (VectorXd(2) << a, b).finished(); }
} // namespace

TEST_CASE("quadratic wells")
{
    PotentialSpec s;
    s.wells = {well(v2(1, -1), v2(1, 2), v2(3, 1))};
    s.validate();
    VectorXd xi = v2(1, -1);
    CHECK(potential_value(s, Which::P, xi) == 0.0);
    CHECK(potential_gradient(s, Which::P, xi).norm() == 0.0);
    CHECK(potential_value(s, Which::P, xi + v2(0.01, 0)) == doctest::Approx(1e-4).epsilon(1e-12));
    Eigen::MatrixXd H = potential_hessian(s, Which::P, xi);
    CHECK(H(0, 0) == doctest::Approx(2));
    CHECK(H(1, 1) == doctest::Approx(4));
    CHECK(H(0, 1) == 0.0);
    // far field
    CHECK(potential_value(s, Which::Q, v2(10, 10)) == 0.0);
    CHECK(potential_gradient(s, Which::Q, v2(10, 10)).norm() == 0.0);
}

TEST_CASE("gradient and hessian agree with finite differences, including the blend zone")
{
    PotentialSpec s;
    s.wells = {well(v2(0, 0), v2(1, 2), v2(3, 1))};
    s.wells[0].cubic_p = v2(0.3, -0.2);
    for (VectorXd x : {v2(0.2, -0.3), v2(0.55, 0.4), v2(0.8, 0.1), v2(-0.3, 0.75)}) {
        const double h = 1e-6;
        VectorXd g = potential_gradient(s, Which::P, x);
        Eigen::MatrixXd H = potential_hessian(s, Which::P, x);
        CHECK((H - H.transpose()).norm() == 0.0);
        for (int j = 0; j < 2; ++j) {
            VectorXd e = VectorXd::Zero(2);
            e[j] = h;
            double fd = (potential_value(s, Which::P, x + e) - potential_value(s, Which::P, x - e)) / (2 * h);
            CHECK(fd == doctest::Approx(g[j]).epsilon(1e-8).scale(1));
            VectorXd gd = (potential_gradient(s, Which::P, x + e) - potential_gradient(s, Which::P, x - e)) / (2 * h);
            CHECK((gd - H.col(j)).norm() < 1e-6);
        }
    }
}

TEST_CASE("bump is C2 at the transition points")
{
    for (double r : {0.5, 1.0}) {
        Bump a = blend(r - 1e-9, 0.5), b = blend(r + 1e-9, 0.5);
        CHECK(std::abs(a.v - b.v) < 1e-8);
        CHECK(std::abs(a.d1 - b.d1) < 1e-6);
        CHECK(std::abs(a.d2 - b.d2) < 1e-4);
    }
}

TEST_CASE("hypothesis report")
{
    CouplingParams cp = coupling_sigmas(1, 1, 3);
    PotentialSpec s;
    s.wells = {well(v2(0, 0), v2(1, 1), v2(1, 1))};
    HypothesisReport r = hypothesis_report(s, cp);
    CHECK(r.det[0] == doctest::Approx(64));
    CHECK(r.h2);
    REQUIRE(r.S);
    CHECK(*r.S == doctest::Approx(1));
    CHECK(r.mass_side == -1);

    s.wells = {well(v2(0, 0), v2(1, 2), v2(-1, -2))};
    r = hypothesis_report(s, cp);
    CHECK(*r.S == doctest::Approx(0).scale(1));
    CHECK_FALSE(r.h3);

    PotentialSpec s3;
    s3.dim = 3;
    s3.wells = {well(VectorXd::Zero(3), VectorXd::Ones(3), VectorXd::Ones(3))};
    r = hypothesis_report(s3, cp);
    CHECK_FALSE(r.S.has_value());
    CHECK(r.describe().find("not applicable") != std::string::npos);
}

TEST_CASE("validation")
{
    PotentialSpec s;
    s.wells = {well(v2(0, 0), v2(1, 1), v2(1, 1)), well(v2(1.5, 0), v2(1, 1), v2(1, 1))};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.wells[1].xi = v2(2.1, 0);
    CHECK_NOTHROW(s.validate());
    s.wells[1].p = VectorXd::Ones(3);
    CHECK_THROWS_AS(s.validate(), ConfigError);
}
