#include "support/oracles.hpp"

#include <devcauchy/cauchy.hpp>
#include <devcauchy/nullity.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace devcauchy;
using namespace testsupport;

namespace {

SeparablePatch p1(std::vector<std::string> c, double a, double b) { return SeparablePatch::parse(c, Vec::Constant(1, a), Vec::Constant(1, b)); }

SeparablePatch p2(std::vector<std::string> c, Eigen::Vector2d a, Eigen::Vector2d b) { return SeparablePatch::parse(c, a, b); }

SeedPatch latitude_seed()
{
    return SeedPatch(p1({"sqrt(3)/2*cos(t)", "sqrt(3)/2*sin(t)", "1/2", "0"}, 0, 3), {p1({"cos(t)/2", "sin(t)/2", "-sqrt(3)/2", "0"}, 0, 3)}, 2);
}

// unit sphere patch at height x4 = 1 with D spanned by its tangents and the position vector
SeedPatch cone_seed()
{
    const std::vector<std::string> x{"sin(t)|cos(t)", "sin(t)|sin(t)", "cos(t)|1", "1|1"};
    return SeedPatch(p2(x, {0.5, 0}, {2, 2}), {p2(x, {0.5, 0}, {2, 2})}, 3);
}

std::optional<Verdict> curve_verdict(const Scene& s)
{
    try {
        const auto frame = adapt_frame(s.curve_eval(), s.dist());
        return existence_report(*frame).verdict;
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::optional<NullityVerdict> seed_verdict(const Scene& s)
{
    try {
        return nullity_existence(seed_from_scene(s)).verdict;
    } catch (const Error&) {
        return std::nullopt;
    }
}

} // namespace

TEST(Seed, ValidatesItsInput)
{
    auto kind = [](const std::function<void()>& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Internal;
    };
    // seed tangent outside an explicitly spanned D
    EXPECT_EQ(kind([] { SeedPatch(p1({"cos(t)", "sin(t)", "0"}, 0, 3), {p1({"1", "0", "0"}, 0, 3), p1({"0", "0", "1"}, 0, 3)}, 2); }),
              ErrorKind::NotTangent);
    // dependent fields
    EXPECT_EQ(kind([] { SeedPatch(p1({"t", "0", "0"}, 0, 1), {p1({"1", "0", "0"}, 0, 1)}, 2); }), ErrorKind::DegenerateDistribution);
    // not immersed
    EXPECT_EQ(kind([] { SeedPatch(p1({"0", "0", "0"}, 0, 1), {p1({"1", "0", "0"}, 0, 1)}, 2); }), ErrorKind::ImmersionFailure);
    // wrong field count
    EXPECT_EQ(kind([] { SeedPatch(p1({"t", "0", "0", "0"}, 0, 1), {p1({"0", "1", "0", "0"}, 0, 1)}, 3); }), ErrorKind::DimensionMismatch);
}

TEST(Seed, RhoMatchesCurveRhoOnCurves)
{
    // for a curve seed the singular values of rho equal those of the frame rho per unit speed,
    // scaled by the speed of the parametrization
    const Scene s = helix_rectifying_scene();
    const SeedPatch seed = seed_from_scene(s, 33);
    const auto frame = adapt_frame(s.curve_eval(), s.dist(), 33);
    for (double t : {0.5, 2.0, 3.5}) {
        const RhoSample r = rho_sample(seed, Vec::Constant(1, t));
        const FrameJet f = frame->at(t);
        const Vec a = singular_values(r.rho);
        const Vec b = singular_values(rho_matrix(f)) * f.speed.d[0];
        EXPECT_NEAR(a[0], b[0], 1e-9);
        EXPECT_EQ(r.rank, 1);
    }
}

TEST(NullityExistence, Verdicts)
{
    // flat strip: rho vanishes
    const SeedPatch strip(p1({"t", "0", "0", "0"}, 0, 1), {p1({"0", "1", "0", "0"}, 0, 1)}, 2);
    const NullityExistence e = nullity_existence(strip);
    EXPECT_EQ(e.verdict, NullityVerdict::SolvableNotUnique);
    EXPECT_EQ(e.max_rank(), 0);
    EXPECT_EQ(maximal_ruling_space(e.samples[0]).cols(), 2);

    EXPECT_EQ(nullity_existence(latitude_seed()).verdict, NullityVerdict::UniquelySolvable);
    EXPECT_EQ(nullity_existence(cone_seed()).verdict, NullityVerdict::UniquelySolvable);

    // circle in R^4 with a rotating second normal direction: rank 2
    const SeedPatch twisted(p1({"cos(t)", "sin(t)", "0", "0"}, 0, 3), {p1({"0", "0", "cos(t)", "sin(t)"}, 0, 3)}, 2);
    EXPECT_EQ(nullity_existence(twisted).verdict, NullityVerdict::NotSolvable);
}

TEST(NullityExistence, StraightSeedViolatesTheShapeHypothesis)
{
    // rank one everywhere, but a straight seed has A_N = 0 for every N
    const SeedPatch line(p1({"t", "0", "0"}, 0, 1), {p1({"0", "cos(t)", "sin(t)"}, 0, 1)}, 2);
    try {
        nullity_existence(line);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ShapeOperatorSingular);
    }
}

TEST(NullitySolve, LatitudeSeedIsTheTangentCone)
{
    const NullitySolution sol = nullity_solve(latitude_seed());
    const Vec apex = Eigen::Vector4d(0, 0, 2, 0);
    std::vector<Vec> pts;
    for (double t : uniform_grid({0, 3}, 33)) {
        const Vec p = Vec::Constant(1, t);
        const Vec x = sol.rulings(p)[0];
        const Vec d = apex - sol.seed->point(p);
        EXPECT_LT((d - d.dot(x) * x).norm(), 1e-9);
        for (double u : {-sol.epsilon, 0.0, sol.epsilon}) pts.push_back(sol.point(p, Vec::Constant(1, u)));
    }
    EXPECT_EQ(affine_hull_dimension(pts, 1e-6), 3);
    const NullityVerification v = verify_nullity_solution(sol);
    EXPECT_TRUE(v.ok()) << v.fraction() << " " << v.wedge_max;
}

TEST(NullitySolve, TwoDimensionalSeeds)
{
    // sphere patch times a constant direction: rulings e_4
    const std::vector<std::string> x{"sin(t)|cos(t)", "sin(t)|sin(t)", "cos(t)|1", "0|0"};
    const SeedPatch prism(p2(x, {0.5, 0}, {2, 2}), {p2({"0|0", "0|0", "0|0", "1|1"}, {0.5, 0}, {2, 2})}, 3);
    const NullitySolution a = nullity_solve(prism);
    EXPECT_TRUE(exterior::same_span(a.rulings(Eigen::Vector2d(1.0, 1.0)), {Vec::Unit(4, 3)}, 1e-9).has_value());
    EXPECT_TRUE(verify_nullity_solution(a).ok());

    // cone from the origin: rulings along the seed's position vector
    const NullitySolution c = nullity_solve(cone_seed());
    for (const Vec& p : {Vec(Eigen::Vector2d(0.7, 0.2)), Vec(Eigen::Vector2d(1.8, 1.9))})
        EXPECT_TRUE(exterior::same_span(c.rulings(p), {c.seed->point(p)}, 1e-9).has_value());
    const NullityVerification v = verify_nullity_solution(c);
    EXPECT_TRUE(v.ok()) << v.fraction() << " " << v.wedge_max;
    for (int n : v.nullities) EXPECT_EQ(n, 1);
}

TEST(NullitySolve, Errors)
{
    const SeedPatch strip(p1({"t", "0", "0", "0"}, 0, 1), {p1({"0", "1", "0", "0"}, 0, 1)}, 2);
    try {
        nullity_solve(strip);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotUnique);
    }
    const SeedPatch twisted(p1({"cos(t)", "sin(t)", "0", "0"}, 0, 3), {p1({"0", "0", "cos(t)", "sin(t)"}, 0, 3)}, 2);
    try {
        nullity_solve(twisted);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotSolvable);
    }
}

TEST(NullitySolve, ExplicitEpsilonSkipsTheBox)
{
    NullitySolveOptions o;
    o.epsilon = 0.125;
    EXPECT_EQ(nullity_solve(latitude_seed(), o).epsilon, 0.125);
}

TEST(Reduction, CurveSeedsAgreeWithTheCurveSolver)
{
    std::vector<Scene> corpus = random_solvable_scenes(12, 77);
    for (const Scene& s : {cylinder_scene(), helix_rectifying_scene(), line_scene(), rank_two_scene()}) corpus.push_back(s);
    for (const Scene& s : corpus) {
        const auto cv = curve_verdict(s);
        ASSERT_TRUE(cv.has_value()) << s.kind;
        const auto nv = seed_verdict(s);
        EXPECT_TRUE(verdicts_agree(*cv, nv)) << s.kind << " " << to_string(*cv);
        if (*cv != Verdict::Solvable) continue;
        const DevelopableSolution a = solve(s.curve_eval(), s.dist());
        const NullitySolution b = nullity_solve(seed_from_scene(s));
        for (double t : uniform_grid(s.iv, 17))
            EXPECT_TRUE(exterior::same_span(a.rulings.values(t), b.rulings(Vec::Constant(1, t)), 1e-9).has_value()) << s.kind << " t=" << t;
    }
}
