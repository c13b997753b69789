#pragma once

// Command implementations behind the devcauchy executable. Each command reads a scene, prints a
// human summary followed by a "[report]" key-value block, and returns the process exit code:
// 0 ok, 1 mathematical failure, 2 input error, 3 numerical collapse or failed verification.

#include "analysis.hpp"
#include "cauchy.hpp"
#include "devcheck.hpp"
#include "generate.hpp"
#include "mesh.hpp"
#include "nullity.hpp"
#include "scene.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <string>

namespace devcauchy {

struct AppOptions {
    std::optional<int> grid;
    std::optional<double> tol;
    std::optional<std::string> mesh;
    bool verify = false;
    std::optional<int> threads;
    MeshOptions mesh_options{};
};

/// --threads, else DEVCAUCHY_THREADS, else 1.
inline int resolve_threads(const AppOptions& opt)
{
    if (opt.threads) return std::max(1, *opt.threads);
    if (const char* env = std::getenv("DEVCAUCHY_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    }
    return 1;
}

namespace app_detail {

inline std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

class Report {
public:
    void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
    void add(const std::string& key, double value) { add(key, fmt("%.9g", value)); }
    void add(const std::string& key, int value) { add(key, std::to_string(value)); }

    void print(std::ostream& out) const
    {
        out << "[report]\n";
        for (const auto& [k, v] : rows_) out << k << " = " << v << "\n";
    }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

struct Context {
    Scene scene;
    AppOptions opt;
    int threads = 1;
    std::ostream& out;
    Report report;

    SolveOptions solve_options() const
    {
        SolveOptions o = scene.solve_options(threads);
        if (opt.grid) o.grid = *opt.grid;
        if (opt.tol) o.existence.rank.relative = *opt.tol;
        return o;
    }
};

inline Scene load(const std::string& path, const AppOptions& opt)
{
    Scene s = load_scene(path);
    if (opt.grid) s.options.grid = *opt.grid;
    if (opt.tol) s.options.tol = *opt.tol;
    return s;
}

inline void require_driver(const Scene& s, std::initializer_list<Driver> allowed, const char* command)
{
    for (Driver d : allowed)
        if (s.driver == d) return;
    throw Error(ErrorKind::Scene, std::string(command) + " does not accept a scene driven by [" + std::string(to_string(s.driver)) + "]");
}

inline void write_mesh_file(Context& c, const PatchEval& patch, int lead)
{
    if (!c.opt.mesh) return;
    const MeshGrid g = sample_mesh(patch, lead, c.opt.mesh_options);
    std::ofstream f(*c.opt.mesh, std::ios::binary);
    if (!f) throw Error(ErrorKind::Scene, "cannot write mesh file '" + *c.opt.mesh + "'");
    write_mesh(f, g);
    c.out << "mesh: " << g.points.size() << " points written to " << *c.opt.mesh << (obj_format(g) ? " (obj)" : " (csv)") << "\n";
    c.report.add("mesh_points", static_cast<int>(g.points.size()));
}

/// Runs the devcheck suite on a curve solution; false when a threshold fails.
inline bool verify(Context& c, const DevelopableSolution& sol)
{
    if (!c.opt.verify) return true;
    VerifyOptions vo;
    vo.threads = c.threads;
    const VerificationReport r = verify_solution(sol, vo);
    c.out << "verify: " << r.summary() << "\n";
    if (r.ok())
        c.out << "verify: nullity=" << r.expected_nullity << ", flatness<1e-4, constancy<1e-6\n";
    c.report.add("verify", r.ok() ? "pass" : "fail");
    c.report.add("verify_fraction", r.fraction());
    c.report.add("verify_constancy_max", r.max_of(&SampleVerdict::constancy));
    c.report.add("verify_flatness_max", r.max_of(&SampleVerdict::riemann));
    return r.ok();
}

inline void describe_solution(Context& c, const DevelopableSolution& sol)
{
    c.out << "solution: m=" << sol.m() << " in R^" << sol.ambient() << ", epsilon " << fmt("%.6g", sol.epsilon) << ", rulings via "
          << sol.route() << "\n";
    c.report.add("verdict", std::string(to_string(sol.report.verdict)));
    c.report.add("epsilon", sol.epsilon);
    c.report.add("route", sol.route());
}

inline int finish_solution(Context& c, const DevelopableSolution& sol)
{
    write_mesh_file(c, sol.patch(), 1);
    const bool ok = verify(c, sol);
    return ok ? 0 : 3;
}

// ---- commands

inline int cmd_check(Context& c)
{
    require_driver(c.scene, {Driver::Curve, Driver::Seed}, "check");
    if (c.scene.driver == Driver::Seed) {
        NullityOptions no;
        no.threads = c.threads;
        if (c.scene.options.tol) no.rank.relative = *c.scene.options.tol;
        const SeedPatch seed = c.scene.seed_patch();
        const NullityExistence e = nullity_existence(seed, no);
        int at_top = 0;
        for (const auto& s : e.samples) at_top += s.rank == seed.k() ? 1 : 0;
        c.out << "# p rank sigma...\n";
        for (const auto& s : e.samples) {
            for (Eigen::Index i = 0; i < s.params.size(); ++i) c.out << fmt("%.6f", s.params[i]) << " ";
            c.out << s.rank;
            for (Eigen::Index i = 0; i < s.singular_values.size(); ++i) c.out << " " << fmt("%.3e", s.singular_values[i]);
            c.out << "\n";
        }
        c.out << "verdict: " << to_string(e.verdict) << "\n";
        c.out << "rank " << seed.k() << " on " << at_top << "/" << e.samples.size() << " samples\n";
        c.report.add("verdict", std::string(to_string(e.verdict)));
        c.report.add("samples", static_cast<int>(e.samples.size()));
        c.report.add("max_rank", e.max_rank());
        return e.verdict == NullityVerdict::NotSolvable ? 1 : 0;
    }
    const CurveEval curve = c.scene.curve_eval();
    const auto frame = adapt_frame(curve, c.scene.distribution(), c.solve_options().grid);
    ExistenceOptions eo = c.solve_options().existence;
    const ExistenceReport r = existence_report(*frame, eo);
    c.out << "# t rank normal_curvature sigma...\n";
    for (const auto& s : r.samples) {
        c.out << fmt("%.6f", s.t) << " " << s.rank << " " << fmt("%.3e", s.normal_curvature);
        for (Eigen::Index i = 0; i < s.singular_values.size(); ++i) c.out << " " << fmt("%.3e", s.singular_values[i]);
        c.out << "\n";
    }
    c.out << "verdict: " << to_string(r.verdict) << "\n";
    c.report.add("verdict", std::string(to_string(r.verdict)));
    c.report.add("samples", static_cast<int>(r.samples.size()));
    c.report.add("rank_one", r.rank_one_count());
    if (r.solvable()) {
        c.out << "rank 1 on " << r.rank_one_count() << "/" << r.samples.size() << " samples\n";
        return 0;
    }
    const auto& s = r.samples[*r.offending];
    c.out << to_string(r.verdict) << " at t=" << fmt("%.3f", s.t) << "\n";
    c.out << "singular values there:";
    for (Eigen::Index i = 0; i < s.singular_values.size(); ++i) c.out << " " << fmt("%.6g", s.singular_values[i]);
    c.out << "\n";
    c.report.add("t_star", s.t);
    return 1;
}

inline int cmd_solve(Context& c)
{
    require_driver(c.scene, {Driver::Curve}, "solve");
    const DevelopableSolution sol = solve(c.scene.curve_eval(), c.scene.distribution(), c.solve_options());
    describe_solution(c, sol);
    return finish_solution(c, sol);
}

inline int cmd_generate(Context& c)
{
    require_driver(c.scene, {Driver::Generate}, "generate");
    const FrameODESpec spec = c.scene.frame_spec();
    const GeneratedFrame g = generate_frame(spec, c.scene.grid(default_generate_samples));
    c.out << "generated frame: m=" << g.m() << ", n=" << g.n() << ", drift per unit " << fmt("%.3g", g.drift.per_unit()) << "\n";
    c.report.add("drift_per_unit", g.drift.per_unit());
    SolveOptions so = c.solve_options();
    if (!c.scene.options.grid && !c.opt.grid) so.grid = default_grid_samples;
    const DevelopableSolution sol = solve_frame(g.curve, g.frame, so);
    describe_solution(c, sol);
    return finish_solution(c, sol);
}

inline int cmd_extend(Context& c)
{
    require_driver(c.scene, {Driver::Curve}, "extend");
    const ExtendedFrame e = extend_curve(c.scene.curve_eval(), c.scene.initial_plane(), c.scene.grid(default_generate_samples));
    const double geo = e.geodesic_residual(), orth = e.orthogonality_residual();
    c.out << "extension: m=" << e.m() << ", geodesic residual " << fmt("%.3g", geo) << ", orthogonality residual " << fmt("%.3g", orth) << "\n";
    c.report.add("geodesic_residual", geo);
    c.report.add("orthogonality_residual", orth);
    SolveOptions so = c.solve_options();
    if (!c.scene.options.grid && !c.opt.grid) so.grid = default_grid_samples;
    const DevelopableSolution sol = solve_frame(e.curve, e.frame, so);
    describe_solution(c, sol);
    return finish_solution(c, sol);
}

inline int cmd_approx(Context& c)
{
    require_driver(c.scene, {Driver::Host}, "approx");
    const HostScene host = c.scene.host_scene();
    const DevelopableSolution sol = approximate_along_curve(host, c.solve_options());
    const double mismatch = tangent_plane_mismatch(sol, host);
    const double adj = max_adjointness_residual(host, c.solve_options().grid);
    c.out << "approximation: tangent plane mismatch " << fmt("%.3g", mismatch) << ", adjointness residual " << fmt("%.3g", adj) << "\n";
    c.report.add("tangent_mismatch", mismatch);
    c.report.add("adjointness_residual", adj);
    describe_solution(c, sol);
    return finish_solution(c, sol);
}

inline int cmd_reduce(Context& c)
{
    require_driver(c.scene, {Driver::Curve, Driver::Generate}, "reduce");
    SolveOptions so = c.solve_options();
    const DevelopableSolution sol = [&] {
        if (c.scene.driver == Driver::Curve) return solve(c.scene.curve_eval(), c.scene.distribution(), so);
        const GeneratedFrame g = generate_frame(c.scene.frame_spec(), c.scene.grid(default_generate_samples));
        if (!c.scene.options.grid && !c.opt.grid) so.grid = default_grid_samples;
        return solve_frame(g.curve, g.frame, so);
    }();
    describe_solution(c, sol);
    const CodimReport r = codim_reduction_test(sol);
    c.out << "parallel normal residual " << fmt("%.3g", r.parallel_residual) << (r.hypothesis() ? " (parallel)" : " (not parallel)") << "\n";
    c.out << "hull dim " << r.affine_hull_dim << (r.reducible() ? " <= m+1: reducible" : " > m+1: full in a larger subspace") << "\n";
    c.report.add("parallel_residual", r.parallel_residual);
    c.report.add("hull_dim", r.affine_hull_dim);
    c.report.add("reducible", r.reducible() ? "yes" : "no");
    return finish_solution(c, sol);
}

inline int cmd_nullity(Context& c)
{
    require_driver(c.scene, {Driver::Seed}, "nullity");
    NullitySolveOptions no;
    no.existence.threads = c.threads;
    if (c.scene.options.tol) no.existence.rank.relative = *c.scene.options.tol;
    no.epsilon = c.scene.options.epsilon;
    const NullitySolution sol = nullity_solve(c.scene.seed_patch(), no);
    c.out << "solution: seed dim " << sol.k() << ", nullity " << sol.l() << " in R^" << sol.seed->ambient() << ", epsilon "
          << fmt("%.6g", sol.epsilon) << "\n";
    c.report.add("verdict", std::string(to_string(sol.report.verdict)));
    c.report.add("epsilon", sol.epsilon);
    write_mesh_file(c, sol.patch(), sol.k());
    if (!c.opt.verify) return 0;
    const NullityVerification v = verify_nullity_solution(sol);
    char buf[200];
    std::snprintf(buf, sizeof buf, "nullity=%d on %d/%d samples, constancy max %.3g, wedge max %.3g%s", v.expected_nullity, v.passed, v.samples,
                  v.constancy_max, v.wedge_max, v.ok() ? ": pass" : ": FAIL");
    c.out << "verify: " << buf << "\n";
    c.report.add("verify", v.ok() ? "pass" : "fail");
    return v.ok() ? 0 : 3;
}

} // namespace app_detail

inline const std::map<std::string, std::function<int(app_detail::Context&)>>& commands()
{
    using namespace app_detail;
    static const std::map<std::string, std::function<int(Context&)>> table{
        {"check", cmd_check},   {"solve", cmd_solve},   {"generate", cmd_generate}, {"extend", cmd_extend},
        {"approx", cmd_approx}, {"reduce", cmd_reduce}, {"nullity", cmd_nullity},
    };
    return table;
}

/// Runs one command on a scene file; errors are printed to `err` and mapped to exit codes.
inline int run_command(const std::string& command, const std::string& scene_path, const AppOptions& opt, std::ostream& out, std::ostream& err)
{
    const auto it = commands().find(command);
    if (it == commands().end()) {
        err << "error: unknown command '" << command << "'\n";
        return 2;
    }
    try {
        app_detail::Context c{app_detail::load(scene_path, opt), opt, resolve_threads(opt), out, {}};
        const int code = it->second(c);
        c.report.add("exit", code);
        c.report.print(out);
        return code;
    } catch (const Error& e) {
        err << "error: " << e.what();
        if (e.where() && e.kind() != ErrorKind::Syntax) err << " (t=" << app_detail::fmt("%.3f", *e.where()) << ")";
        err << "\n";
        const int code = exit_code(e.kind());
        out << "[report]\nerror = " << to_string(e.kind()) << "\nexit = " << code << "\n";
        return code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace devcauchy
