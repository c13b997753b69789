// Acceptance suite: one PASS/FAIL line per criterion; exit status is the number of failures.

#include "support/oracles.hpp"

#include <devcauchy/app.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace devcauchy;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

using testsupport::Scene;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

FramePtr frame_of(const Scene& s) { return adapt_frame(s.curve_eval(), s.dist(), 129); }

RulingSet solved_rulings(const FramePtr& frame) { return ruling_fields(frame, choose_normal_section(frame, existence_report(*frame))); }

const std::string scene_dir = DEVCAUCHY_SOURCE_DIR "/scenes";

Outcome cylinder_end_to_end()
{
    const auto start = std::chrono::steady_clock::now();
    const fs::path mesh = fs::temp_directory_path() / "devcauchy_acceptance_cylinder.obj";
    AppOptions opt;
    opt.mesh = mesh.string();
    std::ostringstream out, err;
    const int code = run_command("solve", scene_dir + "/cylinder.scene", opt, out, err);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const Scene s = cylinder_scene();
    const auto frame = frame_of(s);
    const bool solvable = existence_report(*frame).solvable();
    const DevelopableSolution sol = solve(s.curve_eval(), s.dist());
    bool vertical = true;
    for (double t : frame->grid()) vertical = vertical && exterior::same_span(sol.rulings.values(t), {Vec::Unit(3, 2)}, 1e-9).has_value();

    double mem = 0.0;
    for (const auto& x : sample_mesh(sol.patch(), 1).points) mem = std::max(mem, std::abs(x[0] * x[0] + x[1] * x[1] - 1.0));
    double file = 0.0;
    int vertices = 0;
    std::ifstream in(mesh);
    std::string tag;
    double x, y, z;
    for (std::string line; std::getline(in, line);) {
        std::istringstream ls(line);
        if (!(ls >> tag) || tag != "v") continue;
        ls >> x >> y >> z;
        file = std::max(file, std::abs(x * x + y * y - 1.0));
        ++vertices;
    }
    fs::remove(mesh);
    // vertices are exact to 1e-9 in memory; 9 significant digits in the file add up to 2e-9
    const bool pass = code == 0 && solvable && vertical && vertices > 0 && mem < 1e-9 && file < 2e-9 && seconds < 1.0;
    return {pass, fmt("exit %.0f, max |x^2+y^2-1| %.2e in memory, %.2e in file, %.3f s", code, mem, file, seconds)};
}

Outcome criterion_equivalence()
{
    const auto scenes = random_solvable_scenes(25, 2024);
    int disagreements = 0, misclassified = 0, cases = 0;
    double worst_small = 0.0, least_large = 1e300;
    for (const auto& s : scenes) {
        const auto frame = frame_of(s);
        const RulingSet good = solved_rulings(frame);
        const RulingSet bad = perturbed_rulings(frame, good, 0.3);
        for (const auto* r : {&good, &bad}) {
            double w = 0.0, tau = 0.0;
            for (double t : uniform_grid(s.iv, 9)) {
                for (double v : wedge_criterion(s.curve_eval(), *r, t)) w = std::max(w, v);
                tau = std::max(tau, tau_criterion(*frame, *r, t).cwiseAbs().maxCoeff());
            }
            const bool small = w < 1e-7 && tau < 1e-7, large = w > 1e-3 && tau > 1e-3;
            disagreements += small || large ? 0 : 1;
            misclassified += (r == &good) == small ? 0 : 1;
            if (r == &good) worst_small = std::max({worst_small, w, tau});
            else least_large = std::min({least_large, w, tau});
            ++cases;
        }
    }
    return {cases == 50 && disagreements == 0 && misclassified == 0,
            fmt("%.0f scenes, %.0f disagreements, solutions <= %.2e, perturbed >= %.2e", cases, disagreements, worst_small, least_large)};
}

Outcome route_equivalence()
{
    const auto scenes = random_solvable_scenes(20, 5);
    int failures = 0, checks = 0;
    for (const auto& s : scenes) {
        const auto frame = frame_of(s);
        const auto sec = choose_normal_section(frame, existence_report(*frame));
        std::vector<RulingSet> routes{ruling_fields(frame, sec), ruling_fields_cross(frame, sec), ruling_fields_null_space(frame)};
        if (s.n == 1) routes.push_back(ruling_fields_hypersurface(frame));
        for (double t : frame->grid()) {
            const auto ref = routes[0].values(t);
            for (std::size_t k = 1; k < routes.size(); ++k) {
                ++checks;
                failures += exterior::same_span(routes[k].values(t), ref, 1e-7) ? 0 : 1;
            }
        }
    }
    return {scenes.size() == 20 && failures == 0, fmt("%.0f scenes, %.0f span checks, %.0f mismatches", static_cast<double>(scenes.size()), checks, failures)};
}

std::vector<DevelopableSolution> solution_corpus()
{
    std::vector<DevelopableSolution> out;
    out.push_back(solve(cylinder_scene().curve_eval(), cylinder_scene().dist()));
    out.push_back(solve(helix_rectifying_scene().curve_eval(), helix_rectifying_scene().dist()));
    for (const auto& s : random_solvable_scenes(8, 43)) out.push_back(solve(s.curve_eval(), s.dist()));
    for (const auto& spec : random_frame_specs(4, 11)) {
        const GeneratedFrame g = generate_frame(spec);
        out.push_back(solve_frame(g.curve, g.frame));
    }
    return out;
}

Outcome verification_triad(const std::vector<DevelopableSolution>& corpus)
{
    int ok = 0;
    double worst_fraction = 1.0;
    for (const auto& sol : corpus) {
        const VerificationReport r = verify_solution(sol);
        ok += r.ok() ? 1 : 0;
        worst_fraction = std::min(worst_fraction, r.fraction());
    }
    const PatchEval helicoid = analytic_patch({"cos(t)|t", "sin(t)|t", "t|1"}, Eigen::Vector2d(0, -1), Eigen::Vector2d(6, 1));
    const double control = tangent_constancy(helicoid, 2.0, {Vec::Constant(1, 0.2), Vec::Constant(1, 0.5)});
    const bool pass = ok == static_cast<int>(corpus.size()) && control > 0.1 && !verify_patch(helicoid, 1).ok();
    return {pass, fmt("%.0f/%.0f solutions verified, worst sample fraction %.3f, helicoid constancy %.3f", ok, static_cast<double>(corpus.size()),
                      worst_fraction, control)};
}

Outcome generator_round_trip()
{
    const auto specs = random_frame_specs(20, 99);
    int verified = 0, ratio_ok = 0, drift_ok = 0;
    double rmin = 1e300, rmax = 0, dmin = 1e300, dmax = 0;
    for (const auto& s : specs) {
        const GeneratedFrame g = generate_frame(s);
        verified += verify_solution(solve(g.curve, g.distribution())).ok() ? 1 : 0;
        const double r = step_halving_ratio(s);
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        ratio_ok += r >= 12.0 && r <= 20.0 ? 1 : 0;
        const double d = generate_frame(s, 33).drift.per_unit() / generate_frame(s, 65).drift.per_unit();
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
        drift_ok += d >= 8.0 && d <= 32.0 ? 1 : 0;
    }
    const int n = static_cast<int>(specs.size());
    return {verified == n && ratio_ok == n && drift_ok == n,
            fmt("%.0f/20 verified, halving ratio in [%.2f, %.2f], drift ratio in [%.2f", verified, rmin, rmax, dmin) + fmt(", %.2f]", dmax)};
}

Mat columns_of(std::initializer_list<std::vector<double>> cols)
{
    Mat m(static_cast<Eigen::Index>(cols.begin()->size()), static_cast<Eigen::Index>(cols.size()));
    Eigen::Index j = 0;
    for (const auto& c : cols) m.col(j++) = Eigen::Map<const Vec>(c.data(), static_cast<Eigen::Index>(c.size()));
    return m;
}

Outcome extension()
{
    auto curve = [](std::initializer_list<const char*> x, Interval iv) { return CurveEval(std::make_shared<ExprField>(exprs(x), iv)); };
    const double th = 0.4;
    const std::vector<std::pair<CurveEval, Mat>> cases{
        {curve({"cos(t)", "sin(t)", "0"}, {0.0, 3.0}), columns_of({{0, 1, 0}, {0, 0, 1}})},
        {curve({"cos(t)", "sin(t)", "0"}, {0.0, 3.0}), columns_of({{0, 1, 0}, {0, std::sin(th), std::cos(th)}})},
        {curve({"2*cos(t)", "2*sin(t)", "0"}, {0.0, 3.0}), columns_of({{0, 1, 0}, {0, 0, 1}})},
        {curve({"cos(t)", "sin(t)", "0.5*t", "0.2*t^3"}, {0.0, 2.0}), columns_of({{0, 1, 0.5, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}})},
        {curve({"cos(t)", "sin(t)", "0.5*t", "0.2*t^3", "0.1*t^2"}, {0.0, 2.0}), columns_of({{0, 1, 0.5, 0, 0}, {0, 0, 0, 1, 0}})},
    };
    double geo = 0.0, orth = 0.0;
    bool contains = true;
    for (const auto& [c, d0] : cases) {
        const ExtendedFrame e = extend_curve(c, d0);
        geo = std::max(geo, e.geodesic_residual());
        orth = std::max(orth, e.orthogonality_residual());
        const DevelopableSolution sol = solve_frame(e.curve, e.frame);
        for (double t : uniform_grid(c.interval(), 9)) contains = contains && (sol.point(t, Vec::Zero(e.m() - 1)) - c.point(t)).norm() < 1e-9;
    }
    return {geo < 1e-7 && orth < 1e-8 && contains, fmt("%.0f scenes, geodesic residual %.2e, orthogonality residual %.2e", static_cast<double>(cases.size()), geo, orth)};
}

Outcome adjointness()
{
    const Vec lo = Eigen::Vector2d(0.3, -4), hi = Eigen::Vector2d(2.8, 4);
    const SeparablePatch sphere = SeparablePatch::parse({"sin(t)|cos(t)", "sin(t)|sin(t)", "cos(t)|1"}, lo, hi);
    const SeparablePatch cylinder = SeparablePatch::parse({"cos(t)|1", "sin(t)|1", "1|t"}, Eigen::Vector2d(-4, -2), Eigen::Vector2d(4, 2));
    const SeparablePatch bumpy = SeparablePatch::parse({"t|1", "1|t", "0.1*sin(t)|cos(t)"}, Eigen::Vector2d(-3, -3), Eigen::Vector2d(3, 3));
    const SeparablePatch ellipsoid = SeparablePatch::parse({"2*sin(t)|cos(t)", "sin(t)|sin(t)", "0.7*cos(t)|1"}, lo, hi);
    const std::vector<HostScene> hosts{
        HostScene(sphere, {parse("pi/3"), Expr::var()}, {0.0, 3.0}),
        HostScene(sphere, exprs({"1+0.3*sin(t)", "t"}), {0.0, 3.0}),
        HostScene(cylinder, exprs({"t", "0.3*t"}), {0.0, 3.0}),
        HostScene(bumpy, exprs({"cos(t)", "0.5*sin(t)"}), {0.0, 3.0}),
        HostScene(ellipsoid, exprs({"1.2", "t"}), {0.0, 3.0}),
    };
    double worst = 0.0;
    for (const auto& h : hosts) worst = std::max(worst, max_adjointness_residual(h, 129));
    return {worst < 1e-6, fmt("%.0f hosts, max residual %.2e", static_cast<double>(hosts.size()), worst)};
}

Outcome codimension()
{
    auto report = [](int m, std::vector<Expr> f, std::vector<Expr> g, double alpha) {
        FrameODESpec s;
        s.m = m;
        s.n = static_cast<int>(g.size());
        s.f = std::move(f);
        s.g = std::move(g);
        s.alpha = alpha;
        const GeneratedFrame gf = generate_frame(s);
        return codim_reduction_test(solve_frame(gf.curve, gf.frame));
    };
    const CodimReport a = report(2, exprs({"0"}), exprs({"1", "0.5"}), 1.0);
    const CodimReport b = report(3, exprs({"0.4", "-0.3"}), exprs({"1", "0.5"}), 1.0);
    const CodimReport c = report(2, exprs({"0.3*sin(t)"}), exprs({"1+0.2*cos(t)", "0.5+0.1*cos(t)", "-0.25-0.05*cos(t)"}), 2.0);
    Scene padded = cylinder_scene();
    padded.n = 2;
    padded.curve = exprs({"cos(t)", "sin(t)", "0", "0"});
    padded.fields = {exprs({"0", "0", "1", "0"})};
    const CodimReport d = codim_reduction_test(solve(padded.curve_eval(), padded.dist()));
    const CodimReport rot = report(2, exprs({"0"}), exprs({"1", "cos(t)+1.5"}), 3.0);
    const bool pass = a.hypothesis() && a.affine_hull_dim <= 3 && b.hypothesis() && b.affine_hull_dim <= 4 && c.hypothesis() && c.affine_hull_dim <= 3 &&
                      d.hypothesis() && d.affine_hull_dim <= 3 && !rot.hypothesis() && rot.affine_hull_dim == 4;
    return {pass, fmt("parallel hulls %.0f, %.0f, %.0f, ", a.affine_hull_dim, b.affine_hull_dim, c.affine_hull_dim) +
                      fmt("%.0f (bounds 3, 4, 3, 3); rotating hull %.0f (m+2 = 4)", d.affine_hull_dim, rot.affine_hull_dim)};
}

Outcome first_normal_space(const std::vector<DevelopableSolution>& corpus)
{
    double worst = 1.0;
    for (const auto& sol : corpus) {
        const VerificationReport r = verify_solution(sol);
        int one = 0;
        for (const auto& s : r.samples) one += s.first_normal_dim == 1 ? 1 : 0;
        worst = std::min(worst, r.samples.empty() ? 0.0 : static_cast<double>(one) / static_cast<double>(r.samples.size()));
    }
    const PatchEval plane = analytic_patch({"t|1", "1|t", "0|0"}, Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1));
    const PatchEval torus = analytic_patch({"cos(t)|1", "sin(t)|1", "1|cos(t)", "1|sin(t)"}, Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 3));
    int plane_dim = -1, torus_dim = -1;
    bool controls = true;
    for (const Vec& p : {Vec(Eigen::Vector2d(0.1, -0.2)), Vec(Eigen::Vector2d(-0.5, 0.4))}) {
        plane_dim = second_fundamental_form(plane, p).first_normal_dim;
        controls = controls && plane_dim == 0;
    }
    for (const Vec& p : {Vec(Eigen::Vector2d(1.0, 1.5)), Vec(Eigen::Vector2d(2.0, 0.7))}) {
        torus_dim = second_fundamental_form(torus, p).first_normal_dim;
        controls = controls && torus_dim == 2;
    }
    return {worst >= 0.95 && controls, fmt("dimension 1 on >= %.1f%% of samples over %.0f solutions; plane %.0f, product torus %.0f", 100.0 * worst,
                                           static_cast<double>(corpus.size()), plane_dim, torus_dim)};
}

Outcome nullity_reduction()
{
    std::vector<Scene> corpus = random_solvable_scenes(20, 5);
    for (const Scene& s : {cylinder_scene(), helix_rectifying_scene(), line_scene(), rank_two_scene()}) corpus.push_back(s);
    int verdicts = 0, spans = 0, checks = 0;
    for (const Scene& s : corpus) {
        std::optional<Verdict> cv;
        std::optional<NullityVerdict> nv;
        try {
            cv = existence_report(*frame_of(s)).verdict;
        } catch (const Error&) {
        }
        try {
            nv = nullity_existence(seed_from_scene(s)).verdict;
        } catch (const Error&) {
        }
        if (!cv || !verdicts_agree(*cv, nv)) {
            ++verdicts;
            continue;
        }
        if (*cv != Verdict::Solvable) continue;
        const DevelopableSolution a = solve(s.curve_eval(), s.dist());
        const NullitySolution b = nullity_solve(seed_from_scene(s));
        for (double t : uniform_grid(s.iv, 33)) {
            ++checks;
            spans += exterior::same_span(a.rulings.values(t), b.rulings(Vec::Constant(1, t)), 1e-9) ? 0 : 1;
        }
    }
    // latitude at height 1/2 on the unit sphere, distribution spanned by the meridian tangent
    const SeparablePatch lat = SeparablePatch::parse({"sqrt(3)/2*cos(t)", "sqrt(3)/2*sin(t)", "1/2"}, Vec::Constant(1, 0), Vec::Constant(1, 3));
    const SeparablePatch meridian = SeparablePatch::parse({"cos(t)/2", "sin(t)/2", "-sqrt(3)/2"}, Vec::Constant(1, 0), Vec::Constant(1, 3));
    const NullitySolution cone = nullity_solve(SeedPatch(lat, {meridian}, 2));
    double apex = 0.0;
    for (double t : uniform_grid({0.0, 3.0}, 33)) {
        const Vec p = Vec::Constant(1, t);
        const Vec x = cone.rulings(p)[0];
        const Vec d = Vec(Eigen::Vector3d(0, 0, 2)) - cone.seed->point(p);
        apex = std::max(apex, (d - d.dot(x) * x).norm());
    }
    const bool pass = verdicts == 0 && spans == 0 && checks > 0 && apex < 1e-9 && verify_nullity_solution(cone).ok();
    return {pass, fmt("%.0f scenes, %.0f verdict mismatches, %.0f/%.0f span mismatches, ", static_cast<double>(corpus.size()), verdicts, spans, checks) +
                      fmt("tangent cone apex distance %.2e", apex)};
}

Outcome negative_gates()
{
    struct Gate {
        const char* command;
        const char* file;
        const char* kind;
        int exit;
    };
    const Gate gates[] = {{"solve", "line.scene", "CurveNotCurving", 1}, {"solve", "rank_two_r4.scene", "RankTooHigh", 1}, {"extend", "extend_bad_plane.scene", "BadInitialPlane", 2}};
    std::string detail;
    bool pass = true;
    for (const auto& g : gates) {
        std::ostringstream out, err;
        const int code = run_command(g.command, scene_dir + "/" + g.file, {}, out, err);
        const bool ok = code == g.exit && out.str().find(std::string("error = ") + g.kind) != std::string::npos;
        pass = pass && ok;
        detail += std::string(detail.empty() ? "" : ", ") + g.kind + " -> " + std::to_string(code);
    }
    return {pass, detail};
}

} // namespace

int main()
{
    std::vector<DevelopableSolution> corpus;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"cylinder end-to-end", cylinder_end_to_end},
        {"wedge and tau criteria agree", criterion_equivalence},
        {"ruling routes agree", route_equivalence},
        {"verification triad", [&] {
             corpus = solution_corpus();
             return verification_triad(corpus);
         }},
        {"generator round trip", generator_round_trip},
        {"geodesic extension", extension},
        {"adjointness on hosts", adjointness},
        {"codimension reduction", codimension},
        {"first normal space", [&] { return first_normal_space(corpus); }},
        {"seed reduction to curves", nullity_reduction},
        {"negative gates", negative_gates},
    };
    int failures = 0, index = 0;
    for (const auto& [name, run] : criteria) {
        ++index;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("criterion %2d %-30s %s  %s\n", index, name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", index - failures, index);
    return failures == 0 ? 0 : 1;
}
