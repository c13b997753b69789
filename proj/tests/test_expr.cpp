#include <devcauchy/expr.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace devcauchy;

namespace {

// Random expressions that stay finite and smooth on [-1, 1].
Expr random_expr(std::mt19937& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, 11);
    std::uniform_real_distribution<double> num(0.1, 2.0);
    if (depth == 0) return (rng() % 2) ? Expr::var() : Expr::num(std::round(num(rng) * 100.0) / 100.0);
    const Expr a = random_expr(rng, depth - 1);
    switch (pick(rng)) {
    case 0: return a + random_expr(rng, depth - 1);
    case 1: return a - random_expr(rng, depth - 1);
    case 2: return a * random_expr(rng, depth - 1);
    case 3: return a / (Expr::num(2.5) + Expr::call(Func::Cos, random_expr(rng, depth - 1)));
    case 4: return Expr::call(Func::Sin, a);
    case 5: return Expr::call(Func::Cos, a);
    case 6: return Expr::call(Func::Exp, Expr::num(0.3) * Expr::call(Func::Sin, a));
    case 7: return Expr::call(Func::Log, Expr::num(1.5) + Expr::call(Func::Sin, a));
    case 8: return Expr::call(Func::Sqrt, Expr::num(2) + Expr::call(Func::Cos, a));
    case 9: return Expr::pow(Expr::call(Func::Sin, a), static_cast<int>(rng() % 4));
    case 10: return -a;
    default: return Expr::call(rng() % 2 ? Func::Sinh : Func::Cosh, Expr::num(0.5) * Expr::call(Func::Sin, a));
    }
}

double central_fd(const Expr& e, double t, double h)
{
    return (-e.eval(t + 2 * h) + 8 * e.eval(t + h) - 8 * e.eval(t - h) + e.eval(t - 2 * h)) / (12 * h);
}

} // namespace

TEST(ExprParse, Examples)
{
    EXPECT_EQ(parse("cos(t)"), Expr::call(Func::Cos, Expr::var()));
    EXPECT_EQ(parse("2*t^3 - 1"), Expr::num(2) * Expr::pow(Expr::var(), 3) - Expr::num(1));
    EXPECT_EQ(parse("  2 * t ^ 3-1 "), parse("2*t^3 - 1"));
}

TEST(ExprParse, Precedence)
{
    EXPECT_EQ(parse("-t^2"), -Expr::pow(Expr::var(), 2));
    EXPECT_EQ(parse("1-t-2"), (Expr::num(1) - Expr::var()) - Expr::num(2));
    EXPECT_EQ(parse("t/2/3"), (Expr::var() / Expr::num(2)) / Expr::num(3));
    EXPECT_EQ(parse("t^2^3"), Expr::pow(Expr::var(), 8));
    EXPECT_EQ(parse("t^-2"), Expr::pow(Expr::var(), -2));
    EXPECT_EQ(parse("2*-t"), Expr::num(2) * -Expr::var());
    EXPECT_EQ(parse("pi"), Expr::pi());
    EXPECT_DOUBLE_EQ(parse("2^3^2").eval(0.0), 512.0);
}

TEST(ExprParse, SyntaxErrors)
{
    try {
        parse("sin(");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.offset(), 4u);
        EXPECT_FALSE(e.expected().empty());
    }
    auto offset_of = [](const char* src) -> std::size_t {
        try {
            parse(src);
        } catch (const SyntaxError& e) {
            return e.offset();
        }
        return std::string::npos;
    };
    EXPECT_EQ(offset_of("t +* 2"), 3u);
    EXPECT_EQ(offset_of("foo(t)"), 0u);
    EXPECT_EQ(offset_of("t^1.5"), 2u);
    EXPECT_EQ(offset_of("(t"), 2u);
    EXPECT_EQ(offset_of("t t"), 2u);
    EXPECT_EQ(offset_of(""), 0u);
    EXPECT_EQ(offset_of("sin t"), 4u);
}

TEST(ExprEval, JetExamples)
{
    const Jet3 a = eval_jet(parse("t^2"), 3.0);
    EXPECT_DOUBLE_EQ(a.value, 9.0);
    EXPECT_DOUBLE_EQ(a.d1, 6.0);
    EXPECT_DOUBLE_EQ(a.d2, 2.0);
    EXPECT_DOUBLE_EQ(a.d3, 0.0);

    const Jet3 b = eval_jet(parse("sin(t)"), 0.0);
    EXPECT_DOUBLE_EQ(b.value, 0.0);
    EXPECT_DOUBLE_EQ(b.d1, 1.0);
    EXPECT_DOUBLE_EQ(b.d2, 0.0);
    EXPECT_DOUBLE_EQ(b.d3, -1.0);

    const Expr e = parse("exp(2*t)");
    const double h = 1e-4, t = 0.5;
    const double fd1 = (e.eval(t + h) - e.eval(t - h)) / (2 * h);
    const double fd2 = (e.eval(t + h) - 2 * e.eval(t) + e.eval(t - h)) / (h * h);
    const Jet3 c = eval_jet(e, t);
    EXPECT_NEAR(c.d1, fd1, 1e-6 * std::abs(fd1));
    EXPECT_NEAR(c.d2, fd2, 1e-6 * std::abs(fd2));
}

TEST(ExprEval, ClosedFormDerivatives)
{
    const double t = 0.37;
    const Jet3 j = eval_jet(parse("tan(t)"), t);
    const double s = 1.0 / std::cos(t), tn = std::tan(t);
    EXPECT_NEAR(j.d1, s * s, 1e-14);
    EXPECT_NEAR(j.d2, 2 * s * s * tn, 1e-14);
    EXPECT_NEAR(j.d3, 2 * s * s * (s * s + 2 * tn * tn), 1e-13);

    const Jet3 q = eval_jet(parse("1/t"), 2.0);
    EXPECT_DOUBLE_EQ(q.d1, -0.25);
    EXPECT_DOUBLE_EQ(q.d2, 0.25);
    EXPECT_DOUBLE_EQ(q.d3, -0.375);

    const Jet3 r = eval_jet(parse("t^-2"), 2.0);
    EXPECT_DOUBLE_EQ(r.value, 0.25);
    EXPECT_DOUBLE_EQ(r.d1, -0.25);
    EXPECT_DOUBLE_EQ(r.d3, -24.0 / 32.0);

    const Jet3 w = eval_jet(parse("t^3"), 0.0);
    EXPECT_DOUBLE_EQ(w.d3, 6.0);
}

TEST(ExprEval, DomainErrors)
{
    auto kind_of = [](const char* src, double t) {
        try {
            parse(src).eval_jet(t);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Internal;
    };
    EXPECT_EQ(kind_of("log(t)", -1.0), ErrorKind::EvalDomain);
    EXPECT_EQ(kind_of("log(t)", 0.0), ErrorKind::EvalDomain);
    EXPECT_EQ(kind_of("sqrt(t)", -1.0), ErrorKind::EvalDomain);
    EXPECT_EQ(kind_of("1/t", 0.0), ErrorKind::EvalDomain);
    EXPECT_EQ(kind_of("t^-1", 0.0), ErrorKind::EvalDomain);
    EXPECT_EQ(kind_of("exp(exp(exp(t)))", 10.0), ErrorKind::EvalDomain);
    EXPECT_THROW(parse("sqrt(t)").eval(-0.5), Error);
    EXPECT_DOUBLE_EQ(parse("sqrt(t)").eval(0.0), 0.0);
}

TEST(ExprProperty, RandomCorpusDerivativesAndRoundTrip)
{
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> tdist(-1.0, 1.0);
    std::uniform_int_distribution<int> depth(1, 5);
    for (int i = 0; i < 200; ++i) {
        const Expr e = random_expr(rng, depth(rng));
        const std::string text = print(e);
        EXPECT_EQ(parse(text), e) << text;
        const double t = tdist(rng);
        const Jet3 j = e.eval_jet(t);
        EXPECT_DOUBLE_EQ(j.value, e.eval(t)) << text;
        const double fd = central_fd(e, t, 1e-4);
        EXPECT_LE(std::abs(j.d1 - fd), 1e-6 * (1.0 + std::abs(j.d1))) << text;
        // Second and third derivatives against differences of the exact lower-order jets.
        const double h = 1e-5;
        const double fd2 = (e.eval_jet(t + h).d1 - e.eval_jet(t - h).d1) / (2 * h);
        const double fd3 = (e.eval_jet(t + h).d2 - e.eval_jet(t - h).d2) / (2 * h);
        EXPECT_LE(std::abs(j.d2 - fd2), 1e-5 * (1.0 + std::abs(j.d2))) << text;
        EXPECT_LE(std::abs(j.d3 - fd3), 1e-5 * (1.0 + std::abs(j.d3))) << text;
    }
}

TEST(ExprPrint, NumbersRoundTripExactly)
{
    for (double v : {0.1, 1e-5, 123456.789, 3.0, 1e+20, 2.5e-300}) {
        const Expr e = Expr::num(v) * Expr::var();
        EXPECT_EQ(parse(print(e)), e) << print(e);
    }
    EXPECT_EQ(parse(print(Expr::num(-2))), Expr::num(-2));
}
