#pragma once

// Manufactured developable data: frames integrated from the structure ODE driven by m+n-1
// scalar functions, and the canonical extension of a curve to a developable containing it as a
// geodesic.

#include "cauchy.hpp"
#include "curvekit.hpp"
#include "expr.hpp"
#include "field.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace devcauchy {

inline constexpr int default_generate_samples = 1025;

/// Frame whose legs are interpolated from tabulated node data (one field per leg).
class TabulatedFrame final : public FrameField {
public:
    TabulatedFrame(int m, int n, std::vector<double> grid, std::vector<FieldPtr> legs, std::function<ScalarJet(double)> speed)
        : legs_(std::move(legs)), speed_(std::move(speed))
    {
        m_ = m;
        n_ = n;
        grid_ = std::move(grid);
        iv_ = {grid_.front(), grid_.back()};
        if (static_cast<int>(legs_.size()) != m + n) throw Error(ErrorKind::DimensionMismatch, "frame needs m+n legs");
    }

    FrameJet at(double t) const override
    {
        FrameJet f;
        for (int i = 0; i < m_ + n_; ++i) (i < m_ ? f.E : f.N).push_back(legs_[static_cast<std::size_t>(i)]->jet(t));
        f.speed = speed_(t);
        return f;
    }

    const FieldPtr& leg(int i) const { return legs_[static_cast<std::size_t>(i)]; }

private:
    std::vector<FieldPtr> legs_;
    std::function<ScalarJet(double)> speed_;
};

namespace gen_detail {

template <class Rhs>
Mat rk4_step(Rhs&& f, double t, double h, const Mat& y)
{
    const Mat k1 = f(t, y);
    const Mat k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const Mat k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const Mat k4 = f(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline double gram_defect(const Mat& q)
{
    return (q.transpose() * q - Mat::Identity(q.cols(), q.cols())).norm();
}

/// QR orthonormalization with column signs matched to the input.
inline Mat reorthonormalize(const Mat& y)
{
    Eigen::HouseholderQR<Mat> qr(y);
    Mat q = qr.householderQ() * Mat::Identity(y.rows(), y.cols());
    for (Eigen::Index j = 0; j < q.cols(); ++j)
        if (q.col(j).dot(y.col(j)) < 0.0) q.col(j) = -q.col(j);
    return q;
}

inline FieldPtr hermite(const std::vector<double>& nodes, const std::vector<Vec>& v, const std::vector<Vec>& d1, const std::vector<Vec>& d2)
{
    return std::make_shared<HermiteField>(nodes, v, d1, d2);
}

/// Fourth-order differences of nodal derivative data on a uniform grid (one-sided five-point
/// stencils at the two nodes nearest each end).
inline std::vector<Vec> differentiate_nodes(const std::vector<double>& t, const std::vector<Vec>& d1)
{
    const std::size_t n = t.size();
    if (n < 5) throw Error(ErrorKind::DimensionMismatch, "node differentiation needs at least 5 nodes");
    const double h = (t[n - 1] - t[0]) / static_cast<double>(n - 1);
    std::vector<Vec> out(n);
    for (std::size_t i = 2; i + 2 < n; ++i) out[i] = (-d1[i + 2] + 8.0 * d1[i + 1] - 8.0 * d1[i - 1] + d1[i - 2]) / (12.0 * h);
    out[0] = (-25.0 * d1[0] + 48.0 * d1[1] - 36.0 * d1[2] + 16.0 * d1[3] - 3.0 * d1[4]) / (12.0 * h);
    out[1] = (-3.0 * d1[0] - 10.0 * d1[1] + 18.0 * d1[2] - 6.0 * d1[3] + d1[4]) / (12.0 * h);
    out[n - 1] = (25.0 * d1[n - 1] - 48.0 * d1[n - 2] + 36.0 * d1[n - 3] - 16.0 * d1[n - 4] + 3.0 * d1[n - 5]) / (12.0 * h);
    out[n - 2] = (3.0 * d1[n - 1] + 10.0 * d1[n - 2] - 18.0 * d1[n - 3] + 6.0 * d1[n - 4] - d1[n - 5]) / (12.0 * h);
    return out;
}

} // namespace gen_detail

/// Orthonormality bookkeeping of an integration run: the Gram defect of the propagated frame
/// after each RK4 step, before the QR correction.
struct DriftStats {
    double max_step_defect = 0.0;
    double step = 0.0;

    double per_unit() const { return step > 0.0 ? max_step_defect / step : 0.0; }
};

struct FrameODESpec {
    int m = 2;
    int n = 1;
    std::vector<Expr> f; // m-1 tangential rotation rates
    std::vector<Expr> g; // n normal rates, nowhere vanishing
    double alpha = 1.0;
};

struct GeneratedFrame {
    CurveEval curve;
    std::shared_ptr<const TabulatedFrame> frame;
    DriftStats drift;

    int m() const { return frame->m(); }
    int n() const { return frame->n(); }

    /// The distribution span{E_2, ..., E_m} along the curve, as m-1 fields.
    DistributionSpec distribution() const
    {
        DistributionSpec d;
        d.rank = m();
        for (int i = 1; i < m(); ++i) d.fields.push_back(frame->leg(i));
        return d;
    }

    Mat frame_at_end() const
    {
        const FrameJet f = frame->at(frame->interval().t1);
        std::vector<Vec> legs;
        for (const auto& e : f.E) legs.push_back(e.d[0]);
        for (const auto& x : f.N) legs.push_back(x.d[0]);
        return columns(legs);
    }
};

namespace gen_detail {

// Skew generator A(t) with F' = F A for the frame F = [E_1..E_m N_1..N_n], and A'(t).
inline std::pair<Mat, Mat> structure_matrix(const FrameODESpec& spec, double t)
{
    const int d = spec.m + spec.n;
    Mat a = Mat::Zero(d, d), da = Mat::Zero(d, d);
    auto put = [&](int r, double v, double dv) {
        a(r, 0) = -v;
        a(0, r) = v;
        da(r, 0) = -dv;
        da(0, r) = dv;
    };
    for (int j = 0; j < spec.m - 1; ++j) {
        const Jet3 fj = spec.f[static_cast<std::size_t>(j)].eval_jet(t);
        put(j + 1, fj.value, fj.d1);
    }
    for (int k = 0; k < spec.n; ++k) {
        const Jet3 gk = spec.g[static_cast<std::size_t>(k)].eval_jet(t);
        put(spec.m + k, gk.value, gk.d1);
    }
    return {a, da};
}

} // namespace gen_detail

/// Integrates F' = F A(t), F(0) = I with classical RK4 on a uniform grid, re-orthonormalizing
/// after each step; gamma = integral of E_1 uses the same stages.
inline GeneratedFrame generate_frame(const FrameODESpec& spec, int samples = default_generate_samples)
{
    using namespace gen_detail;
    if (spec.m < 2 || spec.n < 1) throw Error(ErrorKind::DimensionMismatch, "generator needs m >= 2 and n >= 1");
    if (static_cast<int>(spec.f.size()) != spec.m - 1 || static_cast<int>(spec.g.size()) != spec.n)
        throw Error(ErrorKind::DimensionMismatch, "generator needs m-1 functions f and n functions g");
    if (!(spec.alpha > 0.0)) throw Error(ErrorKind::DimensionMismatch, "generator interval length must be positive");
    const int d = spec.m + spec.n;
    const Interval iv{0.0, spec.alpha};
    const std::vector<double> grid = uniform_grid(iv, samples);
    for (double t : grid)
        for (const auto& g : spec.g)
            if (!(std::abs(g.eval(t)) > 1e-9)) throw Error(ErrorKind::GVanishes, "a normal rate g_k vanishes", t);

    // state [F | gamma]
    auto rhs = [&](double t, const Mat& y) {
        const Mat a = structure_matrix(spec, t).first;
        Mat out(d, d + 1);
        out.leftCols(d) = y.leftCols(d) * a;
        out.col(d) = y.col(0);
        return out;
    };
    Mat y(d, d + 1);
    y.leftCols(d) = Mat::Identity(d, d);
    y.col(d) = Vec::Zero(d);

    DriftStats drift;
    drift.step = grid[1] - grid[0];
    std::vector<Mat> frames{y.leftCols(d)};
    std::vector<Vec> pts{y.col(d)};
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        y = rk4_step(rhs, grid[i], grid[i + 1] - grid[i], y);
        drift.max_step_defect = std::max(drift.max_step_defect, gram_defect(y.leftCols(d)));
        y.leftCols(d) = reorthonormalize(y.leftCols(d));
        frames.push_back(y.leftCols(d));
        pts.push_back(y.col(d));
    }

    std::vector<std::vector<Vec>> v(static_cast<std::size_t>(d)), v1(v), v2(v);
    std::vector<Vec> g1, g2;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto [a, da] = structure_matrix(spec, grid[i]);
        const Mat f1 = frames[i] * a;
        const Mat f2 = frames[i] * (a * a + da);
        for (int c = 0; c < d; ++c) {
            const auto uc = static_cast<std::size_t>(c);
            v[uc].push_back(frames[i].col(c));
            v1[uc].push_back(f1.col(c));
            v2[uc].push_back(f2.col(c));
        }
        g1.push_back(frames[i].col(0));
        g2.push_back(f1.col(0));
    }
    std::vector<FieldPtr> legs;
    for (int c = 0; c < d; ++c) {
        const auto uc = static_cast<std::size_t>(c);
        legs.push_back(hermite(grid, v[uc], v1[uc], v2[uc]));
    }
    CurveEval curve(hermite(grid, pts, g1, g2));
    auto frame = std::make_shared<const TabulatedFrame>(spec.m, spec.n, grid, std::move(legs),
                                                        [](double) { return constant_jet(1.0); });
    return {std::move(curve), std::move(frame), drift};
}

/// Richardson-style self-convergence: |F_h - F_{h/2}| / |F_{h/2} - F_{h/4}| for the frame and
/// curve at the end of the interval. Close to 16 for a fourth-order method.
inline double step_halving_ratio(const FrameODESpec& spec, int samples = 65)
{
    auto end_state = [&](int s) {
        const GeneratedFrame g = generate_frame(spec, s);
        Mat out(g.frame->ambient(), g.frame->ambient() + 1);
        out.leftCols(g.frame->ambient()) = g.frame_at_end();
        out.col(g.frame->ambient()) = g.curve.point(spec.alpha);
        return out;
    };
    const Mat a = end_state(samples), b = end_state(2 * samples - 1), c = end_state(4 * samples - 3);
    return (a - b).norm() / (b - c).norm();
}

struct ExtendedFrame {
    CurveEval curve;
    std::shared_ptr<const TabulatedFrame> frame;
    DriftStats drift;

    int m() const { return frame->m(); }

    DistributionSpec distribution() const
    {
        DistributionSpec d;
        d.rank = m();
        for (int i = 1; i < m(); ++i) d.fields.push_back(frame->leg(i));
        return d;
    }

    /// max over grid t and i >= 2 of |D_t E_1 . E_i| (per unit speed): the curve is a geodesic
    /// of every developable tangent to span(E_i).
    double geodesic_residual() const
    {
        double worst = 0.0;
        for (double t : frame->grid()) {
            const FrameJet f = frame->at(t);
            const double s = f.speed.d[0];
            for (int i = 1; i < m(); ++i) worst = std::max(worst, std::abs(f.E[0].d[1].dot(f.E[static_cast<std::size_t>(i)].d[0])) / s);
        }
        return worst;
    }

    /// max |X . E_1|, |X . N_1| over the integrated legs X.
    double orthogonality_residual() const
    {
        double worst = 0.0;
        for (double t : frame->grid()) {
            const FrameJet f = frame->at(t);
            std::vector<Vec> legs;
            for (std::size_t i = 1; i < f.E.size(); ++i) legs.push_back(f.E[i].d[0]);
            for (std::size_t k = 1; k < f.N.size(); ++k) legs.push_back(f.N[k].d[0]);
            for (const auto& x : legs)
                worst = std::max({worst, std::abs(x.dot(f.E[0].d[0])), std::abs(x.dot(f.N[0].d[0]))});
        }
        return worst;
    }

    /// max over grid t, i >= 2, k >= 2 of |D_t E_i . N_k| (per unit speed).
    double parallel_residual() const
    {
        double worst = 0.0;
        for (double t : frame->grid()) {
            const FrameJet f = frame->at(t);
            for (std::size_t i = 1; i < f.E.size(); ++i)
                for (std::size_t k = 1; k < f.N.size(); ++k)
                    worst = std::max(worst, std::abs(f.E[i].d[1].dot(f.N[k].d[0])) / f.speed.d[0]);
        }
        return worst;
    }
};

namespace gen_detail {

inline VecJet velocity_jet(const CurveEval& c, double t)
{
    const VecJet j = c.jet(t);
    VecJet v;
    v.order = std::min(j.order - 1, 2);
    for (int k = 0; k < 3; ++k) v.d[static_cast<std::size_t>(k)] = j.d[static_cast<std::size_t>(k + 1)];
    v.d[3] = Vec::Zero(j.d[0].size());
    return v;
}

// Unit tangent T and principal normal N_1 = T'/|T'| with first derivatives.
struct CurveFrenet {
    VecJet T;
    Vec n1, dn1;
    double kappa_speed = 0.0; // |T'|
};

inline CurveFrenet frenet(const CurveEval& c, double t)
{
    const VecJet T = normalized(velocity_jet(c, t));
    VecJet dT;
    dT.order = T.order - 1;
    for (int k = 0; k < 3; ++k) dT.d[static_cast<std::size_t>(k)] = T.d[static_cast<std::size_t>(k + 1)];
    dT.d[3] = Vec::Zero(T.d[0].size());
    CurveFrenet out{T, Vec(), Vec(), dT.d[0].norm()};
    if (!(out.kappa_speed > 0.0)) return out;
    const VecJet n = normalized(dT);
    out.n1 = n.d[0];
    out.dn1 = n.d[1];
    return out;
}

} // namespace gen_detail

/// Extends a curve with nowhere-vanishing curvature to a developable frame with tangent plane
/// D0 at the start: E_1 = unit tangent, N_1 = principal normal, the remaining legs integrated
/// from X' = -(N_1' . X) N_1 with RK4 and per-step QR correction. D0 is given by spanning
/// columns and must contain the initial velocity and be orthogonal to the initial principal
/// normal (the curve is to be a geodesic).
inline ExtendedFrame extend_curve(const CurveEval& curve, const Mat& d0, int samples = default_generate_samples)
{
    using namespace gen_detail;
    const int dim = curve.dim();
    const int m = static_cast<int>(d0.cols());
    const int n = dim - m;
    if (d0.rows() != dim || m < 2 || n < 1) throw Error(ErrorKind::DimensionMismatch, "D0 needs 2 <= m < ambient spanning columns");
    const Interval iv = curve.interval();
    const std::vector<double> grid = uniform_grid(iv, samples);

    std::vector<CurveFrenet> fr;
    for (double t : grid) {
        fr.push_back(frenet(curve, t));
        const double kappa = fr.back().kappa_speed / curve.velocity(t).norm();
        if (!(kappa > 1e-9)) throw Error(ErrorKind::CurvatureVanishes, "curve curvature vanishes", t);
    }

    Mat basis;
    try {
        basis = gram_schmidt(d0, 1e-10);
    } catch (const Error&) {
        throw Error(ErrorKind::DegenerateDistribution, "D0 spanning columns are dependent");
    }
    const Vec T0 = fr.front().T.d[0], N0 = fr.front().n1;
    auto off_d0 = [&](const Vec& v) { return (v - basis * (basis.transpose() * v)).norm(); };
    if (off_d0(T0) > 1e-8) throw Error(ErrorKind::NotTangent, "D0 does not contain the initial velocity", iv.t0);
    if (off_d0(N0) < 1e-8) throw Error(ErrorKind::BadInitialPlane, "the initial acceleration lies in D0", iv.t0);
    if ((basis.transpose() * N0).norm() > 1e-8)
        throw Error(ErrorKind::BadInitialPlane, "D0 is not orthogonal to the initial principal normal; the curve cannot be a geodesic", iv.t0);

    // e_2..e_m: D0 minus T0; n_2..n_n: the rest of D0-perp minus N0
    Mat head(dim, 1);
    head.col(0) = T0;
    const Mat es = orthonormal_complement(head, dim);
    Mat e_init(dim, m - 1);
    {
        Mat proj = es.transpose() * basis; // coordinates of D0 in T0-perp
        Eigen::JacobiSVD<Mat> svd(proj, Eigen::ComputeFullU);
        e_init = es * svd.matrixU().leftCols(m - 1);
    }
    Mat known(dim, m + 1);
    known.col(0) = T0;
    known.middleCols(1, m - 1) = e_init;
    known.col(m) = N0;
    const Mat n_init = orthonormal_complement(known, dim);

    const int q = dim - 2;
    Mat y(dim, q);
    y.leftCols(m - 1) = e_init;
    y.rightCols(n - 1) = n_init;

    auto rhs = [&](double t, const Mat& x) {
        const CurveFrenet f = frenet(curve, t);
        return Mat(-f.n1 * (f.dn1.transpose() * x));
    };
    DriftStats drift;
    drift.step = grid[1] - grid[0];
    std::vector<Mat> ys{y};
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        y = rk4_step(rhs, grid[i], grid[i + 1] - grid[i], y);
        const CurveFrenet& f = fr[i + 1];
        Mat all(dim, dim);
        all.col(0) = f.T.d[0];
        all.col(1) = f.n1;
        all.rightCols(q) = y;
        drift.max_step_defect = std::max(drift.max_step_defect, gram_defect(all));
        y = reorthonormalize(all).rightCols(q);
        ys.push_back(y);
    }

    std::vector<FieldPtr> legs(static_cast<std::size_t>(dim));
    {
        std::vector<Vec> tv, t1, t2, nv, nd1;
        for (const auto& f : fr) {
            tv.push_back(f.T.d[0]);
            t1.push_back(f.T.d[1]);
            t2.push_back(f.T.d[2]);
            nv.push_back(f.n1);
            nd1.push_back(f.dn1);
        }
        legs[0] = hermite(grid, tv, t1, t2);
        legs[static_cast<std::size_t>(m)] = hermite(grid, nv, nd1, differentiate_nodes(grid, nd1));
    }
    for (int c = 0; c < q; ++c) {
        std::vector<Vec> v, v1;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Vec x = ys[i].col(c);
            v.push_back(x);
            v1.push_back(-fr[i].n1 * fr[i].dn1.dot(x));
        }
        const std::size_t slot = c < m - 1 ? static_cast<std::size_t>(c + 1) : static_cast<std::size_t>(m + 1 + (c - (m - 1)));
        legs[slot] = hermite(grid, v, v1, differentiate_nodes(grid, v1));
    }
    const CurveEval c = curve;
    auto frame = std::make_shared<const TabulatedFrame>(m, n, grid, std::move(legs),
                                                        [c](double t) { return norm(velocity_jet(c, t)); });
    return {curve, std::move(frame), drift};
}

} // namespace devcauchy
