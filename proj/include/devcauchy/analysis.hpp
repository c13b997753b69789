#pragma once

// Procedures on a host submanifold: developable approximation along a curve in it, the
// adjointness of rho and alpha along that curve, and the codimension-reduction test for
// solutions.

#include "cauchy.hpp"
#include "devcheck.hpp"
#include "patch.hpp"

#include <algorithm>
#include <memory>
#include <vector>

namespace devcauchy {

/// Host patch M^m in R^(m+n) and a curve given in its parameters.
class HostScene {
public:
    HostScene(SeparablePatch host, std::vector<Expr> curve_in_params, Interval iv, int grid = default_grid_samples)
        : host_(std::make_shared<SeparablePatch>(std::move(host))), c_(std::move(curve_in_params)), iv_(iv)
    {
        if (static_cast<int>(c_.size()) != host_->params())
            throw Error(ErrorKind::DimensionMismatch, "parameter curve needs one expression per host parameter");
        if (host_->params() >= host_->ambient()) throw Error(ErrorKind::WrongCodimension, "host must have positive codimension");
        const FdSteps steps = fd_steps(host_->eval());
        for (double t : uniform_grid(iv_, grid)) {
            const Vec p = params(t);
            for (int a = 0; a < host_->params(); ++a) {
                const double r = 2.0 * steps.h1[a];
                if (p[a] < host_->lo()[a] + r || p[a] > host_->hi()[a] - r)
                    throw Error(ErrorKind::BoundaryTooClose, "curve leaves the host parameter box", t);
            }
        }
        curve_.emplace(std::make_shared<JetField>(host_->ambient(), iv_, [h = host_, c = c_](double t) { return compose_jet(*h, c, t); }),
                       grid);
    }

    int m() const { return host_->params(); }
    int n() const { return host_->ambient() - host_->params(); }
    const SeparablePatch& host() const { return *host_; }
    Interval interval() const { return iv_; }
    const CurveEval& curve() const { return *curve_; }

    Vec params(double t) const
    {
        Vec p(m());
        for (int a = 0; a < m(); ++a) p[a] = c_[static_cast<std::size_t>(a)].eval(t);
        return p;
    }

    Vec param_velocity(double t) const
    {
        Vec v(m());
        for (int a = 0; a < m(); ++a) v[a] = c_[static_cast<std::size_t>(a)].eval_jet(t).d1;
        return v;
    }

    /// D_t = T_{gamma(t)} M, spanned by the m partials of the host along the curve.
    DistributionSpec tangent_distribution() const
    {
        DistributionSpec d;
        d.rank = m();
        for (int a = 0; a < m(); ++a)
            d.fields.push_back(std::make_shared<JetField>(host_->ambient(), iv_,
                                                          [h = host_, c = c_, a](double t) { return compose_partial_jet(*h, c, a, t); }));
        return d;
    }

    /// Orthonormal tangent basis of the host at the curve point.
    Mat tangent_plane(double t) const { return Eigen::HouseholderQR<Mat>(host_->jacobian(params(t))).householderQ() * Mat::Identity(host_->ambient(), m()); }

    /// alpha(v, w) for parameter-space vectors v, w at the curve point: normal part of the
    /// second derivative.
    Vec alpha(double t, const Vec& v, const Vec& w) const
    {
        const Vec p = params(t);
        const PatchJet j = host_->jet(p, 2);
        Vec s = Vec::Zero(host_->ambient());
        for (int a = 0; a < m(); ++a)
            for (int b = 0; b < m(); ++b) s += v[a] * w[b] * j.d2[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        const Mat q = tangent_plane(t);
        return s - q * (q.transpose() * s);
    }

    /// Parameter coordinates of an ambient tangent vector.
    Vec to_params(double t, const Vec& x) const { return host_->jacobian(params(t)).colPivHouseholderQr().solve(x); }

private:
    std::shared_ptr<SeparablePatch> host_;
    std::vector<Expr> c_;
    Interval iv_;
    std::optional<CurveEval> curve_;
};

/// alpha_t = alpha(T, .) for the unit tangent T, as an n x m matrix in orthonormal tangent and
/// normal bases at the curve point.
inline Mat alpha_along(const HostScene& s, double t)
{
    const Mat q = s.tangent_plane(t);
    const Mat full = Eigen::HouseholderQR<Mat>(q).householderQ();
    const Mat nb = full.rightCols(s.n());
    Vec u = s.param_velocity(t);
    u /= (s.host().jacobian(s.params(t)) * u).norm();
    Mat out(s.n(), s.m());
    for (int i = 0; i < s.m(); ++i) out.col(i) = nb.transpose() * s.alpha(t, u, s.to_params(t, q.col(i)));
    return out;
}

/// Developable M' along the curve with T M' = T M there. Rejects curves tangent to an
/// asymptotic direction and points where alpha(T, .) has rank above one.
inline DevelopableSolution approximate_along_curve(const HostScene& s, SolveOptions opt = {})
{
    for (double t : uniform_grid(s.interval(), opt.grid)) {
        Vec u = s.param_velocity(t);
        u /= (s.host().jacobian(s.params(t)) * u).norm();
        if (!(s.alpha(t, u, u).norm() > 1e-8)) throw Error(ErrorKind::AsymptoticDirection, "curve is tangent to an asymptotic direction", t);
        const int r = numerical_rank(alpha_along(s, t), opt.existence.rank);
        if (r > 1) throw Error(ErrorKind::AlphaRankTooHigh, "alpha(T, .) has rank " + std::to_string(r), t);
    }
    return solve(s.curve(), s.tangent_distribution(), opt);
}

/// Largest span mismatch between the solution's tangent planes at u = 0 and the host's.
inline double tangent_plane_mismatch(const DevelopableSolution& sol, const HostScene& s)
{
    double worst = 0.0;
    for (double t : sol.grid) {
        std::vector<Vec> a{sol.curve.velocity(t)};
        for (const auto& x : sol.rulings.values(t)) a.push_back(x);
        const Mat q = s.tangent_plane(t);
        std::vector<Vec> b;
        for (Eigen::Index i = 0; i < q.cols(); ++i) b.push_back(q.col(i));
        worst = std::max(worst, exterior::span_mismatch(a, b));
    }
    return worst;
}

/// max over (E_i, N_k) of |rho_t(N_k) . E_i + N_k . alpha_t(E_i)|, per unit speed, with rho
/// from the adapted frame and alpha from the host's second partials.
inline double adjointness_residual(const HostScene& s, const FrameField& frame, double t)
{
    const FrameJet f = frame.at(t);
    const Mat rho = rho_matrix(f);
    Vec u = s.param_velocity(t);
    u /= (s.host().jacobian(s.params(t)) * u).norm();
    double worst = 0.0;
    for (int i = 0; i < frame.m(); ++i) {
        const Vec a = s.alpha(t, u, s.to_params(t, f.E[static_cast<std::size_t>(i)].d[0]));
        for (int k = 0; k < frame.n(); ++k)
            worst = std::max(worst, std::abs(rho(i, k) + f.N[static_cast<std::size_t>(k)].d[0].dot(a)));
    }
    return worst;
}

inline double adjointness_residual(const HostScene& s, double t, int grid = default_grid_samples)
{
    const auto frame = adapt_frame(s.curve(), s.tangent_distribution(), grid);
    return adjointness_residual(s, *frame, t);
}

/// Maximum residual over the frame grid.
inline double max_adjointness_residual(const HostScene& s, int grid = default_grid_samples)
{
    const auto frame = adapt_frame(s.curve(), s.tangent_distribution(), grid);
    double worst = 0.0;
    for (double t : frame->grid()) worst = std::max(worst, adjointness_residual(s, *frame, t));
    return worst;
}

struct CodimReport {
    double parallel_residual = 0.0; // max_t |normal part of D_t N*| per unit speed
    int affine_hull_dim = 0;
    int m = 0;
    int ambient = 0;

    bool hypothesis() const { return parallel_residual < 1e-6; }
    bool reducible() const { return affine_hull_dim <= m + 1; }
    /// The reduction implication: a parallel distinguished normal forces hull dim <= m+1.
    bool consistent() const { return !hypothesis() || reducible(); }
};

/// Points of the solution on a t-grid of `samples` values times the {-eps, 0, eps} lattice.
inline std::vector<Vec> solution_samples(const DevelopableSolution& sol, int samples)
{
    const int q = sol.m() - 1;
    int lattice = 1;
    for (int j = 0; j < q; ++j) lattice *= 3;
    std::vector<Vec> pts;
    for (double t : uniform_grid(sol.curve.interval(), samples)) {
        for (int code = 0; code < lattice; ++code) {
            Vec u(q);
            int c = code;
            for (int j = 0; j < q; ++j, c /= 3) u[j] = (c % 3 - 1) * sol.epsilon;
            pts.push_back(sol.point(t, u));
        }
    }
    return pts;
}

inline CodimReport codim_reduction_test(const DevelopableSolution& sol, int samples = 33)
{
    CodimReport r;
    r.m = sol.m();
    r.ambient = sol.ambient();
    const NormalSection section = choose_normal_section(sol.frame, sol.report);
    for (double t : sol.grid) {
        const FrameJet f = sol.frame->at(t);
        const Vec dn = section.jet(t).d[1];
        Vec normal_part = dn;
        for (const auto& e : f.E) normal_part -= e.d[0].dot(dn) * e.d[0];
        const Vec nstar = section.at(t);
        normal_part -= nstar.dot(dn) * nstar;
        r.parallel_residual = std::max(r.parallel_residual, normal_part.norm() / f.speed.d[0]);
    }
    r.affine_hull_dim = affine_hull_dimension(solution_samples(sol, samples), 1e-6);
    return r;
}

} // namespace devcauchy
