#pragma once

// Existence test, ruling construction (frame formula, cross product, null space of rho and the
// hypersurface route), embedding-box sizing and the assembled ruled solution.

#include "curvekit.hpp"
#include "errors.hpp"
#include "exterior.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "patch.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace devcauchy {

enum class Verdict { Solvable, CurveNotCurving, RankTooHigh, RankDropsToZero };

inline std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::Solvable: return "Solvable";
    case Verdict::CurveNotCurving: return "CurveNotCurving";
    case Verdict::RankTooHigh: return "RankTooHigh";
    case Verdict::RankDropsToZero: return "RankDropsToZero";
    }
    return "?";
}

inline ErrorKind error_kind(Verdict v)
{
    switch (v) {
    case Verdict::CurveNotCurving: return ErrorKind::CurveNotCurving;
    case Verdict::RankTooHigh: return ErrorKind::RankTooHigh;
    case Verdict::RankDropsToZero: return ErrorKind::RankDropsToZero;
    default: return ErrorKind::Internal;
    }
}

struct ExistenceSample {
    double t = 0.0;
    Vec singular_values;
    int rank = 0;
    double normal_curvature = 0.0; // |normal part of the arclength derivative of E_1|
    int distinguished = 0;         // normal index with the largest |tau_1^k|
    double proportionality_residual = 0.0;
};

struct ExistenceReport {
    std::vector<ExistenceSample> samples;
    Verdict verdict = Verdict::Solvable;
    std::optional<std::size_t> offending; // first failing sample

    bool solvable() const { return verdict == Verdict::Solvable; }
    std::optional<double> t_star() const
    {
        if (!offending) return std::nullopt;
        return samples[*offending].t;
    }
    int rank_one_count() const
    {
        int c = 0;
        for (const auto& s : samples) c += s.rank == 1 ? 1 : 0;
        return c;
    }
};

struct ExistenceOptions {
    RankPolicy rank{};
    double curving_tol = 1e-8;
    int threads = 1;
};

inline ExistenceSample existence_sample(const FrameField& frame, double t, RankPolicy policy)
{
    ExistenceSample s;
    s.t = t;
    const Mat rho = rho_matrix(frame, t);
    const Mat tau = -rho;
    s.singular_values = singular_values(rho);
    s.rank = numerical_rank(s.singular_values, policy);
    s.normal_curvature = tau.row(0).norm();
    Eigen::Index best = 0;
    tau.row(0).cwiseAbs().maxCoeff(&best);
    s.distinguished = static_cast<int>(best);
    double res = 0.0;
    for (Eigen::Index i = 0; i < tau.rows(); ++i)
        for (Eigen::Index k = 0; k < tau.cols(); ++k)
            res = std::max(res, std::abs(tau(i, k) * tau(0, best) - tau(i, best) * tau(0, k)));
    s.proportionality_residual = res;
    return s;
}

inline ExistenceReport existence_report(const FrameField& frame, const std::vector<double>& grid, ExistenceOptions opt = {})
{
    ExistenceReport r;
    r.samples.resize(grid.size());
    parallel_for(grid.size(), opt.threads, [&](std::size_t i) { r.samples[i] = existence_sample(frame, grid[i], opt.rank); });
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        const auto& s = r.samples[i];
        Verdict v = Verdict::Solvable;
        if (!(s.normal_curvature > opt.curving_tol)) v = Verdict::CurveNotCurving;
        else if (s.rank >= 2) v = Verdict::RankTooHigh;
        else if (s.rank == 0) v = Verdict::RankDropsToZero;
        if (v != Verdict::Solvable) {
            r.verdict = v;
            r.offending = i;
            break;
        }
    }
    return r;
}

inline ExistenceReport existence_report(const FrameField& frame, ExistenceOptions opt = {})
{
    return existence_report(frame, frame.grid(), opt);
}

/// Thrown by the solver when the existence test fails; carries the full report.
class UnsolvableError : public Error {
public:
    explicit UnsolvableError(ExistenceReport report)
        : Error(error_kind(report.verdict), describe(report), report.t_star()), report_(std::move(report))
    {
    }
    const ExistenceReport& report() const { return report_; }

private:
    static std::string describe(const ExistenceReport& r)
    {
        const auto& s = r.samples[*r.offending];
        char buf[200];
        std::snprintf(buf, sizeof buf, "at t=%.6g (rank %d, normal curvature %.3g)", s.t, s.rank, s.normal_curvature);
        return buf;
    }
    ExistenceReport report_;
};

/// N = normalized normal part of D_t E_1, built from one frame evaluation.
inline VecJet normal_section_from(const FrameJet& f, double t)
{
    const VecJet a = derivative(f.E[0]);
    VecJet p = a;
    for (const auto& e : f.E) p = p - dot(a, e) * e;
    if (!(p.d[0].norm() > 1e-14 * std::max(1.0, a.d[0].norm())))
        throw Error(ErrorKind::SolverPreconditionViolated, "normal part of the tangent derivative vanishes", t);
    return normalized(p);
}

class NormalSection {
public:
    explicit NormalSection(FramePtr frame) : frame_(std::move(frame)) {}

    VecJet jet(double t) const { return normal_section_from(frame_->at(t), t); }
    Vec at(double t) const { return jet(t).d[0]; }
    const FramePtr& frame() const { return frame_; }

private:
    FramePtr frame_;
};

inline NormalSection choose_normal_section(FramePtr frame, const ExistenceReport& report)
{
    if (!report.solvable())
        throw Error(ErrorKind::SolverPreconditionViolated, "normal section needs a solvable scene");
    return NormalSection(std::move(frame));
}

/// m-1 unit ruling fields along the curve. Jets carry at least the first derivative unless
/// `order` says otherwise.
class RulingSet {
public:
    using Fn = std::function<std::vector<VecJet>(double)>;

    RulingSet() = default;
    RulingSet(int count, Fn fn, std::string route) : count_(count), fn_(std::move(fn)), route_(std::move(route)) {}

    int count() const { return count_; }
    const std::string& route() const { return route_; }
    std::vector<VecJet> jets(double t) const { return fn_(t); }

    std::vector<Vec> values(double t) const
    {
        std::vector<Vec> out;
        for (const auto& j : fn_(t)) out.push_back(j.d[0]);
        return out;
    }

private:
    int count_ = 0;
    Fn fn_;
    std::string route_;
};

inline std::vector<VecJet> ruling_jets_from(const FrameJet& f, const VecJet& N, double t)
{
    const VecJet d1 = derivative(f.E[0]);
    const ScalarJet c1 = dot(d1, N);
    if (!(std::abs(c1.d[0]) > 1e-14 * std::max(1.0, d1.d[0].norm())))
        throw Error(ErrorKind::SolverPreconditionViolated, "D_t E_1 . N vanishes", t);
    std::vector<VecJet> out;
    for (std::size_t j = 1; j < f.E.size(); ++j) {
        const ScalarJet cj = dot(derivative(f.E[j]), N);
        out.push_back(normalized(cj * f.E[0] - c1 * f.E[j]));
    }
    return out;
}

/// X_j = (D_t E_{j+1} . N) E_1 - (D_t E_1 . N) E_{j+1}, normalized.
inline RulingSet ruling_fields(FramePtr frame, const NormalSection& section)
{
    (void)section;
    const int count = frame->m() - 1;
    return RulingSet(
        count,
        [frame](double t) {
            const FrameJet f = frame->at(t);
            return ruling_jets_from(f, normal_section_from(f, t), t);
        },
        "frame-formula");
}

/// X_j = D_t N x E_2 x ... (E_{j+1} omitted) ... x E_m in the oriented D-frame. Values only.
inline RulingSet ruling_fields_cross(FramePtr frame, const NormalSection& section)
{
    (void)section;
    const int m = frame->m();
    return RulingSet(
        m - 1,
        [frame, m](double t) {
            const FrameJet f = frame->at(t);
            const VecJet N = normal_section_from(f, t);
            Vec a(m);
            for (int i = 0; i < m; ++i) a[i] = N.d[1].dot(f.E[static_cast<std::size_t>(i)].d[0]);
            std::vector<VecJet> out;
            for (int j = 0; j < m - 1; ++j) {
                std::vector<Vec> args{a};
                for (int l = 1; l < m; ++l)
                    if (l != j + 1) args.push_back(Vec::Unit(m, l));
                const Vec w = exterior::cross_product(args);
                Vec x = Vec::Zero(f.E[0].d[0].size());
                for (int i = 0; i < m; ++i) x += w[i] * f.E[static_cast<std::size_t>(i)].d[0];
                const double nx = x.norm();
                if (!(nx > 1e-14)) throw Error(ErrorKind::SolverPreconditionViolated, "cross-product ruling vanishes", t);
                VecJet jx = constant_jet(Vec(x / nx), 0);
                out.push_back(jx);
            }
            return out;
        },
        "cross-product");
}

/// Orthonormal basis (columns, ambient coordinates) of D_t intersected with (Im rho_t)^perp.
inline Mat ruling_space(const FrameField& frame, double t, RankPolicy policy = {})
{
    const FrameJet f = frame.at(t);
    const Mat rho = rho_matrix(f);
    Eigen::JacobiSVD<Mat> svd(rho, Eigen::ComputeFullU);
    const int r = numerical_rank(svd.singularValues(), policy);
    Mat e(frame.ambient(), frame.m());
    for (int i = 0; i < frame.m(); ++i) e.col(i) = f.E[static_cast<std::size_t>(i)].d[0];
    return e * svd.matrixU().rightCols(frame.m() - r);
}

/// Rulings as an SVD null-space route, projected from the frame legs for continuity.
inline RulingSet ruling_fields_null_space(FramePtr frame, RankPolicy policy = {})
{
    const int m = frame->m();
    return RulingSet(
        m - 1,
        [frame, policy, m](double t) {
            const Mat basis = ruling_space(*frame, t, policy);
            if (basis.cols() != m - 1) throw Error(ErrorKind::RankTooHigh, "ruling space has the wrong dimension", t);
            const FrameJet f = frame->at(t);
            std::vector<Vec> proj;
            for (int j = 1; j < m; ++j) {
                const Vec e = f.E[static_cast<std::size_t>(j)].d[0];
                proj.push_back(basis * (basis.transpose() * e));
            }
            const Mat q = gram_schmidt(columns(proj), 1e-10);
            std::vector<VecJet> out;
            for (Eigen::Index c = 0; c < q.cols(); ++c) out.push_back(constant_jet(Vec(q.col(c)), 0));
            return out;
        },
        "null-space");
}

/// Derivatives of the ruling fields at t: from the jets when available, else central
/// differences of the values.
inline std::vector<Vec> ruling_derivatives(const RulingSet& rulings, double t, Interval iv)
{
    const auto jets = rulings.jets(t);
    std::vector<Vec> out;
    if (jets.front().order >= 1) {
        for (const auto& j : jets) out.push_back(j.d[1]);
        return out;
    }
    const double h = 1e-5 * iv.length();
    const double a = std::max(iv.t0, t - h), b = std::min(iv.t1, t + h);
    const auto lo = rulings.values(a), hi = rulings.values(b);
    for (std::size_t j = 0; j < lo.size(); ++j) out.push_back((hi[j] - lo[j]) / (b - a));
    return out;
}

struct BoxReport {
    double epsilon = 0.0;
    int halvings = 0;
    bool injectivity_checked = true; // false when the curve itself revisits points
};

namespace box_detail {

inline std::vector<Vec> corners(int dims)
{
    std::vector<Vec> out;
    for (int mask = 0; mask < (1 << dims); ++mask) {
        Vec c(dims);
        for (int j = 0; j < dims; ++j) c[j] = (mask >> j) & 1 ? 1.0 : -1.0;
        out.push_back(c);
    }
    return out;
}

struct Sample {
    double t;
    Vec gamma;
    Vec velocity;
    std::vector<Vec> X;
    std::vector<Vec> dX;
};

inline bool immersed(const Sample& s, double eps, const std::vector<Vec>& cs, double floor)
{
    std::vector<Vec> args{s.velocity};
    args.insert(args.end(), s.X.begin(), s.X.end());
    const exterior::KVector z0 = exterior::wedge(args);
    for (const auto& c : cs) {
        Vec dt = s.velocity;
        for (std::size_t j = 0; j < s.X.size(); ++j) dt += eps * c[static_cast<Eigen::Index>(j)] * s.dX[j];
        args[0] = dt;
        const exterior::KVector z = exterior::wedge(args);
        if (!(z.norm() > floor) || !(z.dot(z0) > 0.0)) return false;
    }
    return true;
}

inline bool injective(const std::vector<Sample>& subs, double eps, const std::vector<Vec>& us)
{
    struct P {
        Vec param;
        Vec x;
    };
    std::vector<P> pts;
    for (const auto& s : subs) {
        for (const auto& u : us) {
            Vec x = s.gamma;
            for (std::size_t j = 0; j < s.X.size(); ++j) x += eps * u[static_cast<Eigen::Index>(j)] * s.X[j];
            Vec param(u.size() + 1);
            param << s.t, eps * u;
            pts.push_back({param, x});
        }
    }
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b)
            if ((pts[a].param - pts[b].param).norm() > 1e-3 && !((pts[a].x - pts[b].x).norm() > 1e-9)) return false;
    return true;
}

} // namespace box_detail

/// Box half-width: bisection from 1 by halving until the sampled immersion and injectivity
/// tests pass, then half of the passing value.
inline BoxReport embedding_box(const CurveEval& curve, const RulingSet& rulings, const std::vector<double>& grid,
                               int threads = 1)
{
    using namespace box_detail;
    const int dims = rulings.count();
    const auto cs = corners(dims);
    std::vector<Sample> samples(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        const double t = grid[i];
        samples[i] = {t, curve.point(t), curve.velocity(t), rulings.values(t), ruling_derivatives(rulings, t, curve.interval())};
    });

    const double floor = 1e-8;
    for (const auto& s : samples) {
        std::vector<Vec> args{s.velocity};
        args.insert(args.end(), s.X.begin(), s.X.end());
        if (!(exterior::wedge(args).norm() > floor))
            throw Error(ErrorKind::BoxCollapse, "rulings are not transverse to the curve", s.t);
    }

    std::vector<Sample> subs;
    const std::size_t count = std::min<std::size_t>(33, samples.size());
    for (std::size_t k = 0; k < count; ++k) subs.push_back(samples[k * (samples.size() - 1) / std::max<std::size_t>(1, count - 1)]);
    std::vector<Vec> us = cs;
    us.push_back(Vec::Zero(dims));

    BoxReport rep;
    rep.injectivity_checked = injective(subs, 0.0, {Vec::Zero(dims)});

    double eps = 1.0;
    for (int h = 0; h <= 40; ++h, eps *= 0.5) {
        std::vector<char> ok(samples.size(), 1);
        parallel_for(samples.size(), threads, [&](std::size_t i) { ok[i] = immersed(samples[i], eps, cs, floor) ? 1 : 0; });
        bool pass = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
        if (pass && rep.injectivity_checked) pass = injective(subs, eps, us);
        if (pass) {
            rep.epsilon = eps / 2;
            rep.halvings = h;
            return rep;
        }
    }
    throw Error(ErrorKind::BoxCollapse, "no box width passed after 40 halvings");
}

struct SolveOptions {
    int grid = default_grid_samples;
    ExistenceOptions existence{};
    std::optional<double> epsilon;
};

struct DevelopableSolution {
    CurveEval curve;
    FramePtr frame;
    RulingSet rulings;
    double epsilon = 0.0;
    std::vector<double> grid;
    ExistenceReport report;
    BoxReport box;

    int m() const { return rulings.count() + 1; }
    int ambient() const { return curve.dim(); }
    const std::string& route() const { return rulings.route(); }

    Vec point(double t, const Vec& u) const
    {
        Vec x = curve.point(t);
        const auto X = rulings.values(t);
        for (std::size_t j = 0; j < X.size(); ++j) x += u[static_cast<Eigen::Index>(j)] * X[j];
        return x;
    }

    /// Point evaluator over [t0,t1] x [-eps,eps]^(m-1), caching the per-t data so repeated
    /// stencil evaluations at the same t are cheap. Safe for concurrent use.
    PatchEval patch() const
    {
        struct Cache {
            std::mutex mu;
            std::map<double, std::pair<Vec, std::vector<Vec>>> data;
        };
        auto cache = std::make_shared<Cache>();
        const CurveEval c = curve;
        const RulingSet r = rulings;
        PatchEval p;
        p.params = m();
        p.ambient = ambient();
        p.lo = Vec::Constant(m(), -epsilon);
        p.hi = Vec::Constant(m(), epsilon);
        p.lo[0] = curve.interval().t0;
        p.hi[0] = curve.interval().t1;
        p.eval = [cache, c, r](const Vec& q) {
            const double t = q[0];
            std::pair<Vec, std::vector<Vec>> entry;
            {
                std::lock_guard<std::mutex> lock(cache->mu);
                auto it = cache->data.find(t);
                if (it != cache->data.end()) entry = it->second;
            }
            if (entry.first.size() == 0) {
                entry = {c.point(t), r.values(t)};
                std::lock_guard<std::mutex> lock(cache->mu);
                if (cache->data.size() > 200000) cache->data.clear();
                cache->data.emplace(t, entry);
            }
            Vec x = entry.first;
            for (std::size_t j = 0; j < entry.second.size(); ++j) x += q[static_cast<Eigen::Index>(j + 1)] * entry.second[j];
            return x;
        };
        return p;
    }
};

/// Checks sigma(t,0) = gamma(t), transversality and that the tangent space at u=0 is D_t.
/// Returns the largest span mismatch seen.
inline double check_solution_invariants(const DevelopableSolution& s)
{
    double worst = 0.0;
    for (double t : s.grid) {
        const Vec x0 = s.point(t, Vec::Zero(s.m() - 1));
        if ((x0 - s.curve.point(t)).norm() != 0.0) throw Error(ErrorKind::Internal, "sigma(t,0) differs from the curve", t);
        std::vector<Vec> tangent{s.curve.velocity(t)};
        for (const auto& x : s.rulings.values(t)) tangent.push_back(x);
        if (!(exterior::wedge(tangent).norm() > 1e-8)) throw Error(ErrorKind::Internal, "rulings not transverse", t);
        const Mat e = s.frame->tangent_basis(t);
        std::vector<Vec> ev;
        for (Eigen::Index i = 0; i < e.cols(); ++i) ev.push_back(e.col(i));
        worst = std::max(worst, exterior::span_mismatch(tangent, ev));
    }
    if (worst > 1e-8) throw Error(ErrorKind::Internal, "solution tangent space differs from D");
    return worst;
}

inline DevelopableSolution solve_frame(const CurveEval& curve, FramePtr frame, SolveOptions opt = {})
{
    ExistenceReport report = existence_report(*frame, opt.existence);
    if (!report.solvable()) throw UnsolvableError(std::move(report));
    const NormalSection section = choose_normal_section(frame, report);
    RulingSet rulings = ruling_fields(frame, section);
    DevelopableSolution s{curve, frame, rulings, 0.0, frame->grid(), std::move(report), {}};
    if (opt.epsilon) {
        s.epsilon = *opt.epsilon;
    } else {
        s.box = embedding_box(curve, rulings, s.grid, opt.existence.threads);
        s.epsilon = s.box.epsilon;
    }
    return s;
}

inline DevelopableSolution solve(const CurveEval& curve, const DistributionSpec& dist, SolveOptions opt = {})
{
    const auto frame = adapt_frame(curve, dist, opt.grid);
    return solve_frame(curve, frame, opt);
}

/// Hypersurface route (n = 1): rulings span {v : v . N = 0, v . D_t N = 0}, obtained by
/// projecting the frame legs E_2..E_m onto that space.
inline RulingSet ruling_fields_hypersurface(FramePtr frame)
{
    if (frame->n() != 1) throw Error(ErrorKind::WrongCodimension, "hypersurface route needs n = 1");
    const int m = frame->m();
    return RulingSet(
        m - 1,
        [frame, m](double t) {
            const FrameJet f = frame->at(t);
            const VecJet& N = f.N[0];
            const VecJet dN = derivative(N);
            if (!(dN.d[0].norm() > 1e-14)) throw Error(ErrorKind::SolverPreconditionViolated, "normal is parallel", t);
            const std::vector<VecJet> q = gram_schmidt(std::vector<VecJet>{N, dN});
            std::vector<VecJet> in;
            for (int j = 1; j < m; ++j) {
                VecJet e = f.E[static_cast<std::size_t>(j)];
                e = e - dot(e, q[0]) * q[0];
                e = e - dot(e, q[1]) * q[1];
                in.push_back(e);
            }
            return gram_schmidt(in);
        },
        "hypersurface");
}

inline DevelopableSolution solve_hypersurface_alt(const CurveEval& curve, const DistributionSpec& dist, SolveOptions opt = {})
{
    if (curve.dim() - dist.rank != 1) throw Error(ErrorKind::WrongCodimension, "hypersurface route needs n = 1");
    const auto frame = adapt_frame(curve, dist, opt.grid);
    ExistenceReport report = existence_report(*frame, opt.existence);
    if (!report.solvable()) throw UnsolvableError(std::move(report));
    RulingSet rulings = ruling_fields_hypersurface(frame);
    DevelopableSolution s{curve, frame, rulings, 0.0, frame->grid(), std::move(report), {}};
    if (opt.epsilon) {
        s.epsilon = *opt.epsilon;
    } else {
        s.box = embedding_box(curve, rulings, s.grid, opt.existence.threads);
        s.epsilon = s.box.epsilon;
    }
    return s;
}

} // namespace devcauchy
