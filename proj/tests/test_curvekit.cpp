#include <devcauchy/curvekit.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace devcauchy;

namespace {

FieldPtr field(std::vector<std::string> comps, Interval iv) { return ExprField::parse(comps, iv); }

CurveEval circle(Interval iv = {0.0, 6.0}) { return CurveEval(field({"cos(t)", "sin(t)", "0"}, iv)); }

std::string random_trig(std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.3f*sin(%.3f*t + %.3f) + %.3f*t + %.3f*t^2", u(rng), 1.5 * u(rng), 3 * u(rng),
                  u(rng), 0.5 * u(rng));
    return buf;
}

} // namespace

TEST(CurveEval, RejectsIrregularCurves)
{
    try {
        CurveEval c(field({"t^2", "0", "0"}, {-1, 1}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IrregularCurve);
        ASSERT_TRUE(e.where().has_value());
        EXPECT_DOUBLE_EQ(*e.where(), 0.0);
    }
}

TEST(CovariantDerivative, Examples)
{
    const auto f = field({"cos(t)", "sin(t)"}, {-1, 1});
    const Vec d = covariant_derivative(*f, 0.0);
    EXPECT_DOUBLE_EQ(d[0], 0.0);
    EXPECT_DOUBLE_EQ(d[1], 1.0);
    EXPECT_EQ(covariant_derivative(*field({"2", "-3"}, {0, 1}), 0.5).norm(), 0.0);
    EXPECT_THROW(covariant_derivative(*f, 1.5), Error);
}

TEST(CovariantDerivative, TabulatedFieldMatchesExact)
{
    const Interval iv{0.0, 3.0};
    FunctionField tab(2, iv, [](double t) { Vec v(2); v << std::sin(t), std::sin(2 * t); return v; }, 1e-3);
    double worst = 0.0;
    for (double t : uniform_grid(iv, 301)) {
        Vec exact(2);
        exact << std::cos(t), 2 * std::cos(2 * t);
        worst = std::max(worst, (covariant_derivative(tab, t) - exact).norm());
    }
    EXPECT_LE(worst, 1e-7);
}

TEST(HermiteField, ReproducesQuinticsExactly)
{
    std::vector<double> nodes{0.0, 0.3, 1.0};
    std::vector<Vec> v, d1, d2;
    auto p = [](double t) { return 1 - 2 * t + 0.5 * t * t * t - t * t * t * t * t; };
    auto p1 = [](double t) { return -2 + 1.5 * t * t - 5 * t * t * t * t; };
    auto p2 = [](double t) { return 3 * t - 20 * t * t * t; };
    for (double t : nodes) {
        v.push_back(Vec::Constant(1, p(t)));
        d1.push_back(Vec::Constant(1, p1(t)));
        d2.push_back(Vec::Constant(1, p2(t)));
    }
    HermiteField h(nodes, v, d1, d2);
    for (double t : {0.05, 0.3, 0.61, 0.99}) {
        const VecJet j = h.jet(t);
        EXPECT_NEAR(j.d[0][0], p(t), 1e-13);
        EXPECT_NEAR(j.d[1][0], p1(t), 1e-12);
        EXPECT_NEAR(j.d[2][0], p2(t), 1e-11);
        EXPECT_NEAR(j.d[3][0], 3 - 60 * t * t, 1e-9);
    }
}

TEST(AdaptFrame, CircleWithVerticalField)
{
    const CurveEval c = circle();
    const auto frame = adapt_frame(c, {2, {field({"0", "0", "1"}, c.interval())}, Tangency::Check});
    double sign = 0.0;
    for (double t : frame->grid()) {
        const FrameJet f = frame->at(t);
        Vec e1(3), radial(3);
        e1 << -std::sin(t), std::cos(t), 0;
        radial << std::cos(t), std::sin(t), 0;
        EXPECT_NEAR((f.E[0].d[0] - e1).norm(), 0.0, 1e-14);
        EXPECT_NEAR((f.E[1].d[0] - Vec::Unit(3, 2)).norm(), 0.0, 1e-14);
        const double s = f.N[0].d[0].dot(radial);
        EXPECT_NEAR(std::abs(s), 1.0, 1e-12);
        if (sign == 0.0) sign = s;
        EXPECT_GT(s * sign, 0.0);
        const Mat tau = tau_matrix(f);
        EXPECT_NEAR(tau(0, 0), -sign, 1e-12);
        EXPECT_NEAR(tau(1, 0), 0.0, 1e-12);
        const Mat rho = rho_matrix(*frame, t);
        EXPECT_NEAR(rho(0, 0), sign, 1e-12);
        EXPECT_NEAR(rho(1, 0), 0.0, 1e-12);
    }
}

TEST(AdaptFrame, OrthonormalInputIsFixedPoint)
{
    const CurveEval c = circle({0.0, 2.0});
    const auto e1 = field({"-sin(t)", "cos(t)", "0"}, c.interval());
    const auto e2 = field({"0", "0", "1"}, c.interval());
    const auto frame = adapt_frame(c, {2, {e1, e2}, Tangency::Check});
    for (double t : {0.0, 0.77, 2.0}) {
        const FrameJet f = frame->at(t);
        EXPECT_LE((f.E[0].d[0] - e1->value(t)).norm(), 1e-12);
        EXPECT_LE((f.E[1].d[0] - e2->value(t)).norm(), 1e-12);
    }
}

TEST(AdaptFrame, DegenerateAndNonTangentDistributions)
{
    const CurveEval c = circle({0.0, 2.0});
    try {
        adapt_frame(c, {2, {field({"-2*sin(t)", "2*cos(t)", "0"}, c.interval())}, Tangency::Check});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateDistribution);
    }
    try {
        adapt_frame(c, {2, {field({"1", "0", "0"}, c.interval()), field({"0", "0", "1"}, c.interval())}, Tangency::Check});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotTangent);
    }
    // Asserted tangency skips the check.
    EXPECT_NO_THROW(adapt_frame(
        c, {2, {field({"-3*sin(t)", "3*cos(t)", "1"}, c.interval()), field({"0", "0", "1"}, c.interval())}, Tangency::Assert}));
}

TEST(TauMatrix, HelixRectifyingPlane)
{
    const Interval iv{0.0, 4.0};
    const CurveEval helix(field({"cos(t)", "sin(t)", "t"}, iv));
    const auto binormal = field({"sin(t)/sqrt(2)", "-cos(t)/sqrt(2)", "1/sqrt(2)"}, iv);
    const auto frame = adapt_frame(helix, {2, {binormal}, Tangency::Check});
    for (double t : {0.0, 1.3, 4.0}) {
        const FrameJet f = frame->at(t);
        Vec principal(3);
        principal << -std::cos(t), -std::sin(t), 0;
        const double s = f.N[0].d[0].dot(principal);
        EXPECT_NEAR(std::abs(s), 1.0, 1e-12);
        const Mat tau = tau_matrix(f);
        EXPECT_NEAR(s * tau(0, 0), 0.5, 1e-12);
        EXPECT_NEAR(s * tau(1, 0), -0.5, 1e-12);
    }
}

TEST(TauMatrix, NormalParallelFrameGivesZero)
{
    // A plane curve inside a fixed 2-plane field: all frame derivatives stay in D.
    const CurveEval c(field({"cos(t)", "sin(t)", "0", "0"}, {0, 3}));
    const auto frame = adapt_frame(c, {2, {field({"cos(t)", "sin(t)", "0", "0"}, {0, 3})}, Tangency::Check});
    for (double t : {0.5, 2.5}) {
        EXPECT_LE(tau_matrix(*frame, t).norm(), 1e-14);
        EXPECT_LE(rho_matrix(*frame, t).norm(), 1e-14);
    }
}

TEST(Project, SplitsIntoComplementaryParts)
{
    const CurveEval c = circle();
    const auto frame = adapt_frame(c, {2, {field({"0", "0", "1"}, c.interval())}, Tangency::Check});
    const double t = 1.1;
    const Mat e = frame->tangent_basis(t), n = frame->normal_basis(t);
    auto [a, b] = project(*frame, t, e.col(1));
    EXPECT_LE((a - e.col(1)).norm(), 1e-15);
    EXPECT_LE(b.norm(), 1e-15);
    auto [p, q] = project(*frame, t, n.col(0));
    EXPECT_LE(p.norm(), 1e-15);
    EXPECT_LE((q - n.col(0)).norm(), 1e-15);
    std::mt19937 rng(1);
    std::normal_distribution<double> g;
    for (int i = 0; i < 20; ++i) {
        Vec v(3);
        v << g(rng), g(rng), g(rng);
        auto [x, y] = project(*frame, t, v);
        EXPECT_NEAR(x.squaredNorm() + y.squaredNorm(), v.squaredNorm(), 1e-12 * v.squaredNorm());
        EXPECT_LE((x + y - v).norm(), 1e-15 * v.norm());
    }
}

TEST(FrameProperty, RandomScenesSatisfyInvariantsAndRhoEqualsMinusTau)
{
    std::mt19937 rng(77);
    int built = 0;
    for (int trial = 0; built < 100 && trial < 400; ++trial) {
        const int m = 2 + trial % 3;
        const int n = 1 + (trial / 3) % 3;
        const int d = m + n;
        const Interval iv{0.0, 1.0};
        std::vector<std::string> curve;
        for (int i = 0; i < d; ++i) curve.push_back(random_trig(rng) + (i == 0 ? " + 2*t" : ""));
        std::vector<FieldPtr> fields;
        for (int j = 1; j < m; ++j) {
            std::vector<std::string> comps;
            for (int i = 0; i < d; ++i) comps.push_back(random_trig(rng) + (i == j ? " + 2" : ""));
            fields.push_back(field(comps, iv));
        }
        try {
            const CurveEval c(field(curve, iv));
            const auto frame = adapt_frame(c, {m, fields, Tangency::Check}, 129);
            for (double t : {0.0, 0.31, 0.5, 0.87, 1.0}) {
                const FrameJet f = frame->at(t);
                const Mat tau = tau_matrix(f), rho = rho_matrix(f);
                EXPECT_LE((rho + tau).cwiseAbs().maxCoeff(), 1e-8 * (1 + tau.norm()));
                // First row of tau is the normal part of the unit tangent's arclength derivative.
                const Vec acc = f.E[0].d[1] / f.speed.d[0];
                const Vec normal_part = acc - frame->tangent_basis(t) * (frame->tangent_basis(t).transpose() * acc);
                EXPECT_NEAR(tau.row(0).norm(), normal_part.norm(), 1e-10);
            }
            ++built;
        } catch (const Error& e) {
            ASSERT_TRUE(e.kind() == ErrorKind::DegenerateDistribution || e.kind() == ErrorKind::IrregularCurve) << e.what();
        }
    }
    EXPECT_EQ(built, 100);
}
