#pragma once

// Verification of ruled patches: numerical second fundamental form and relative nullity,
// wedge and tau developability criteria, tangent constancy along rulings and intrinsic
// flatness of the induced metric. Everything here treats the patch as a black-box point
// evaluator and differentiates by finite differences.

#include "cauchy.hpp"
#include "curvekit.hpp"
#include "errors.hpp"
#include "exterior.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "patch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace devcauchy {

/// Per-parameter steps for the three nested difference levels: h1 for first partials, h2 for
/// derivatives of first-partial data (metric, second partials), h3 for derivatives of
/// Christoffel symbols.
struct FdSteps {
    Vec h1, h2, h3;

    /// Widest excursion of the flatness stencil along parameter a.
    double reach(int a, int levels = 3) const
    {
        double r = 2 * h1[a];
        if (levels >= 2) r += 2 * h2[a];
        if (levels >= 3) r += 2 * h3[a];
        return r;
    }
};

/// Steps 1e-4, 1e-3, 3e-3, shrunk only for parameters whose box extent is below 0.1.
inline FdSteps fd_steps(const PatchEval& patch)
{
    const Vec scale = (10.0 * patch.extent()).cwiseMin(1.0);
    return {1e-4 * scale, 1e-3 * scale, 3e-3 * scale};
}

namespace fd {

// Fourth-order central difference of a vector-valued function along parameter a.
template <class F>
Vec d1(F&& f, const Vec& p, int a, double h)
{
    Vec q = p;
    auto at = [&](double s) {
        q = p;
        q[a] += s;
        return Vec(f(q));
    };
    const Vec fp1 = at(h), fm1 = at(-h), fp2 = at(2 * h), fm2 = at(-2 * h);
    return (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
}

} // namespace fd

inline void check_margin(const PatchEval& patch, const Vec& p, const FdSteps& steps, int levels)
{
    for (int a = 0; a < patch.params; ++a) {
        const double r = steps.reach(a, levels);
        if (p[a] - r < patch.lo[a] - 1e-12 || p[a] + r > patch.hi[a] + 1e-12) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "stencil of width %.3g leaves the box along parameter %d", r, a);
            throw Error(ErrorKind::BoundaryTooClose, buf, p[0]);
        }
    }
}

/// First partials (columns) at p.
inline Mat first_partials(const PatchEval& patch, const Vec& p, const FdSteps& steps)
{
    Mat j(patch.ambient, patch.params);
    for (int a = 0; a < patch.params; ++a) j.col(a) = fd::d1(patch.eval, p, a, steps.h1[a]);
    return j;
}

inline void check_immersed(const Mat& j, const Vec& p, double floor = 1e-9)
{
    std::vector<Vec> cols;
    for (Eigen::Index a = 0; a < j.cols(); ++a) cols.push_back(j.col(a));
    if (!(exterior::wedge(cols).norm() > floor)) throw Error(ErrorKind::ImmersionFailure, "partials are dependent", p[0]);
}

struct NullityReport {
    Vec params;
    Mat tangent;                    // orthonormal, from QR of the first partials
    Mat normal;                     // orthonormal completion
    std::vector<Mat> alpha;         // per normal: m x m in the orthonormal tangent basis
    std::vector<Mat> alpha_natural; // per normal: second partials dotted with the normal
    Vec singular_values;            // of the stacked (n m) x m matrix
    double asymmetry = 0.0;         // max |d_b d_a - d_a d_b| before averaging
    int nullity = 0;
    int first_normal_dim = 0;
};

/// Stacked matrix whose rows are alpha(e_a, .) . N_k.
inline Mat stacked_alpha(const std::vector<Mat>& alpha)
{
    if (alpha.empty()) return Mat();
    const Eigen::Index m = alpha.front().rows();
    Mat s(static_cast<Eigen::Index>(alpha.size()) * m, m);
    for (std::size_t k = 0; k < alpha.size(); ++k) s.middleRows(static_cast<Eigen::Index>(k) * m, m) = alpha[k];
    return s;
}

inline int nullity_index(const NullityReport& r, RankPolicy policy = {})
{
    const auto m = static_cast<int>(r.tangent.cols());
    if (r.alpha.empty()) return m;
    return m - numerical_rank(r.singular_values, policy);
}

/// Dimension of the span of alpha(e_a, e_b) in the normal space.
inline int first_normal_dimension(const NullityReport& r, RankPolicy policy = {})
{
    const auto m = r.tangent.cols();
    const auto n = static_cast<Eigen::Index>(r.alpha.size());
    if (n == 0) return 0;
    Mat img(n, m * (m + 1) / 2);
    Eigen::Index c = 0;
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = a; b < m; ++b, ++c)
            for (Eigen::Index k = 0; k < n; ++k) img(k, c) = r.alpha[static_cast<std::size_t>(k)](a, b);
    return numerical_rank(img, policy);
}

inline NullityReport second_fundamental_form(const PatchEval& patch, const Vec& p, RankPolicy policy = {})
{
    const FdSteps steps = fd_steps(patch);
    check_margin(patch, p, steps, 2);
    const int m = patch.params;
    const int d = patch.ambient;

    NullityReport r;
    r.params = p;
    const Mat j = first_partials(patch, p, steps);
    check_immersed(j, p);
    Eigen::HouseholderQR<Mat> qr(j);
    r.tangent = qr.householderQ() * Mat::Identity(d, m);
    Mat rr = r.tangent.transpose() * j; // upper triangular up to rounding
    r.normal = orthonormal_complement(r.tangent, d);
    const Mat rinv = rr.inverse();

    // h[a][b] = d_b (d_a sigma)
    std::vector<std::vector<Vec>> h(static_cast<std::size_t>(m), std::vector<Vec>(static_cast<std::size_t>(m)));
    for (int a = 0; a < m; ++a) {
        auto da = [&](const Vec& q) { return fd::d1(patch.eval, q, a, steps.h1[a]); };
        for (int b = 0; b < m; ++b) h[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = fd::d1(da, p, b, steps.h2[b]);
    }
    const auto n = static_cast<std::size_t>(d - m);
    r.alpha.assign(n, Mat::Zero(m, m));
    r.alpha_natural.assign(n, Mat::Zero(m, m));
    for (std::size_t k = 0; k < n; ++k) {
        const Vec nk = r.normal.col(static_cast<Eigen::Index>(k));
        Mat& an = r.alpha_natural[k];
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                const double ab = h[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)].dot(nk);
                const double ba = h[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)].dot(nk);
                r.asymmetry = std::max(r.asymmetry, std::abs(ab - ba));
                an(a, b) = 0.5 * (ab + ba);
            }
        r.alpha[k] = rinv.transpose() * an * rinv;
    }
    r.singular_values = singular_values(stacked_alpha(r.alpha));
    r.nullity = nullity_index(r, policy);
    r.first_normal_dim = first_normal_dimension(r, policy);
    return r;
}

/// Samples where every singular value of alpha is below tol.
inline std::vector<Vec> planar_points(const PatchEval& patch, const std::vector<Vec>& samples, double tol = 1e-6)
{
    std::vector<Vec> out;
    for (const auto& p : samples) {
        const NullityReport r = second_fundamental_form(patch, p);
        if (r.singular_values.size() == 0 || r.singular_values.maxCoeff() < tol) out.push_back(p);
    }
    return out;
}

/// |D_t X_j ^ velocity ^ X_1 ^ ... ^ X_{m-1}|, normalized by |D_t X_j| |velocity ^ X| with a
/// floor of 1e-6 |velocity| on |D_t X_j| so that constant rulings give exactly zero.
inline std::vector<double> wedge_residuals(const Vec& velocity, const std::vector<Vec>& X, const std::vector<Vec>& dX)
{
    std::vector<Vec> args{velocity};
    args.insert(args.end(), X.begin(), X.end());
    const double base = exterior::wedge(args).norm();
    if (!(base > 1e-12 * std::max(1.0, velocity.norm())))
        throw Error(ErrorKind::DegenerateInput, "rulings are not transverse to the curve");
    std::vector<double> out;
    for (const auto& dx : dX) {
        std::vector<Vec> w{dx};
        w.insert(w.end(), args.begin(), args.end());
        out.push_back(exterior::wedge(w).norm() / (base * (dx.norm() + 1e-6 * velocity.norm())));
    }
    return out;
}

inline std::vector<double> wedge_criterion(const CurveEval& curve, const RulingSet& rulings, double t)
{
    return wedge_residuals(curve.velocity(t), rulings.values(t), ruling_derivatives(rulings, t, curve.interval()));
}

/// Residuals X_j^i tau_i^k, one row per ruling, one column per normal.
inline Mat tau_residuals(const FrameJet& f, const std::vector<Vec>& X)
{
    const Mat tau = tau_matrix(f);
    const auto m = static_cast<Eigen::Index>(f.E.size());
    Mat out(static_cast<Eigen::Index>(X.size()), tau.cols());
    for (std::size_t j = 0; j < X.size(); ++j) {
        Vec coords(m);
        Vec rest = X[j];
        for (Eigen::Index i = 0; i < m; ++i) {
            coords[i] = X[j].dot(f.E[static_cast<std::size_t>(i)].d[0]);
            rest -= coords[i] * f.E[static_cast<std::size_t>(i)].d[0];
        }
        if (rest.norm() > 1e-8 * std::max(1.0, X[j].norm())) throw Error(ErrorKind::NotTangentToD, "ruling leaves the distribution");
        out.row(static_cast<Eigen::Index>(j)) = coords.transpose() * tau;
    }
    return out;
}

inline Mat tau_criterion(const FrameField& frame, const RulingSet& rulings, double t)
{
    try {
        return tau_residuals(frame.at(t), rulings.values(t));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotTangentToD) throw Error(ErrorKind::NotTangentToD, "ruling leaves the distribution", t);
        throw;
    }
}

inline exterior::KVector tangent_kvector(const Mat& j)
{
    std::vector<Vec> cols;
    for (Eigen::Index a = 0; a < j.cols(); ++a) cols.push_back(j.col(a));
    return exterior::wedge(cols);
}

/// Largest relative deviation of Z(t,u) from the best multiple of Z(t,0) over the samples,
/// where Z is the wedge of all first partials and u excludes the leading t parameter.
inline double tangent_constancy(const PatchEval& patch, double t, const std::vector<Vec>& u_samples)
{
    const FdSteps steps = fd_steps(patch);
    Vec p0 = Vec::Zero(patch.params);
    p0[0] = t;
    const Mat j0 = first_partials(patch, p0, steps);
    check_immersed(j0, p0);
    const exterior::KVector z0 = tangent_kvector(j0);
    double worst = 0.0;
    for (const auto& u : u_samples) {
        Vec p(patch.params);
        p << t, u;
        const Mat j = first_partials(patch, p, steps);
        check_immersed(j, p);
        const exterior::KVector z = tangent_kvector(j);
        const double lambda = z.dot(z0) / z0.dot(z0);
        worst = std::max(worst, (z - z0 * lambda).norm() / z.norm());
    }
    return worst;
}

struct FlatnessReport {
    double riemann_norm = 0.0;        // Frobenius norm of R^a_{bcd}
    std::optional<double> gaussian;   // m = 2: R_{1212} / det g
    std::optional<double> brioschi;   // m = 2: Brioschi formula from E, F, G
};

namespace flat_detail {

inline Vec metric(const PatchEval& patch, const Vec& q, const FdSteps& steps)
{
    const Mat j = first_partials(patch, q, steps);
    const Mat g = j.transpose() * j;
    return Eigen::Map<const Vec>(g.data(), g.size());
}

// d_c g_ab, flattened with c slowest.
inline Vec metric_derivative(const PatchEval& patch, const Vec& q, const FdSteps& steps)
{
    const int m = patch.params;
    Vec out(m * m * m);
    for (int c = 0; c < m; ++c)
        out.segment(c * m * m, m * m) = fd::d1([&](const Vec& x) { return metric(patch, x, steps); }, q, c, steps.h2[c]);
    return out;
}

// Gamma^a_bc at index (a m + b) m + c.
inline Vec christoffel(const PatchEval& patch, const Vec& q, const FdSteps& steps)
{
    const int m = patch.params;
    const Vec gv = metric(patch, q, steps);
    const Mat g = Eigen::Map<const Mat>(gv.data(), m, m);
    const Mat gi = g.inverse();
    const Vec dg = metric_derivative(patch, q, steps);
    auto dgm = [&](int c, int a, int b) { return dg[c * m * m + b * m + a]; }; // d_c g_ab
    Vec out = Vec::Zero(m * m * m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) {
                double s = 0.0;
                for (int e = 0; e < m; ++e) s += gi(a, e) * (dgm(b, e, c) + dgm(c, e, b) - dgm(e, b, c));
                out[(a * m + b) * m + c] = 0.5 * s;
            }
    return out;
}

} // namespace flat_detail

/// Riemann tensor of the induced metric at p by three nested difference levels.
inline FlatnessReport flatness(const PatchEval& patch, const Vec& p)
{
    using namespace flat_detail;
    const FdSteps steps = fd_steps(patch);
    check_margin(patch, p, steps, 3);
    const int m = patch.params;
    check_immersed(first_partials(patch, p, steps), p);

    const Vec G = christoffel(patch, p, steps);
    std::vector<Vec> dG(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c)
        dG[static_cast<std::size_t>(c)] = fd::d1([&](const Vec& x) { return christoffel(patch, x, steps); }, p, c, steps.h3[c]);
    auto gam = [&](int a, int b, int c) { return G[(a * m + b) * m + c]; };
    auto dgam = [&](int e, int a, int b, int c) { return dG[static_cast<std::size_t>(e)][(a * m + b) * m + c]; };

    FlatnessReport out;
    double sq = 0.0;
    std::vector<double> R(static_cast<std::size_t>(m * m * m * m));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d) {
                    double v = dgam(c, a, d, b) - dgam(d, a, c, b);
                    for (int e = 0; e < m; ++e) v += gam(a, c, e) * gam(e, d, b) - gam(a, d, e) * gam(e, c, b);
                    R[static_cast<std::size_t>(((a * m + b) * m + c) * m + d)] = v;
                    sq += v * v;
                }
    out.riemann_norm = std::sqrt(sq);

    if (m == 2) {
        const Vec gv = metric(patch, p, steps);
        const double E = gv[0], F = gv[1], Gm = gv[3];
        const double det = E * Gm - F * F;
        double r1212 = 0.0;
        for (int a = 0; a < 2; ++a) r1212 += gv[a] * R[static_cast<std::size_t>(((a * 2 + 1) * 2 + 0) * 2 + 1)];
        out.gaussian = r1212 / det;

        // first and second derivatives of E, F, G
        const Vec dg = metric_derivative(patch, p, steps);
        auto d = [&](int c, int idx) { return dg[c * 4 + idx]; }; // idx: 0 E, 1 F, 3 G
        Vec ddg0 = fd::d1([&](const Vec& x) { return metric_derivative(patch, x, steps); }, p, 0, steps.h3[0]);
        Vec ddg1 = fd::d1([&](const Vec& x) { return metric_derivative(patch, x, steps); }, p, 1, steps.h3[1]);
        const double Eu = d(0, 0), Ev = d(1, 0), Fu = d(0, 1), Fv = d(1, 1), Gu = d(0, 3), Gv = d(1, 3);
        const double Evv = ddg1[1 * 4 + 0], Guu = ddg0[0 * 4 + 3];
        const double Fuv = 0.5 * (ddg1[0 * 4 + 1] + ddg0[1 * 4 + 1]);
        Eigen::Matrix3d m1, m2;
        m1 << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev, Fv - 0.5 * Gu, E, F, 0.5 * Gv, F, Gm;
        m2 << 0.0, 0.5 * Ev, 0.5 * Gu, 0.5 * Ev, E, F, 0.5 * Gu, F, Gm;
        out.brioschi = (m1.determinant() - m2.determinant()) / (det * det);
    }
    return out;
}

struct VerifyOptions {
    int t_samples = 9;
    RankPolicy nullity{};
    double constancy_tol = 1e-6;
    double flatness_tol = 1e-4;
    double criterion_tol = 1e-7;
    double pass_fraction = 0.95;
    double boundary_band = 0.1; // fraction of the box extent treated as "near the boundary"
    int threads = 1;
};

struct Metric {
    std::string name;
    double t = 0.0;
    Vec u;
    double value = 0.0;
};

struct SampleVerdict {
    Vec params;
    int nullity = 0;
    int first_normal_dim = 0;
    double constancy = 0.0;
    double riemann = 0.0;
    bool pass = false;
    bool near_boundary = false;
};

struct VerificationReport {
    int expected_nullity = 0;
    std::vector<SampleVerdict> samples;
    std::vector<Metric> metrics;
    double wedge_max = 0.0; // along the curve, solutions only
    double tau_max = 0.0;
    bool criteria_checked = false;
    double criterion_tol = 1e-7;
    double constancy_tol = 1e-6;
    double flatness_tol = 1e-4;
    double pass_fraction = 0.95;

    int passed() const
    {
        int c = 0;
        for (const auto& s : samples) c += s.pass ? 1 : 0;
        return c;
    }
    double fraction() const { return samples.empty() ? 0.0 : static_cast<double>(passed()) / static_cast<double>(samples.size()); }
    bool failures_localized() const
    {
        for (const auto& s : samples)
            if (!s.pass && !s.near_boundary) return false;
        return true;
    }
    bool criteria_ok() const { return !criteria_checked || (wedge_max < criterion_tol && tau_max < criterion_tol); }
    bool ok() const { return !samples.empty() && fraction() >= pass_fraction && failures_localized() && criteria_ok(); }

    double max_of(double SampleVerdict::*field) const
    {
        double w = 0.0;
        for (const auto& s : samples) w = std::max(w, s.*field);
        return w;
    }

    /// Flat key-value document: one "name t u... value" line per metric.
    std::string text() const
    {
        std::string out;
        char buf[64];
        for (const auto& m : metrics) {
            out += m.name;
            std::snprintf(buf, sizeof buf, " %.9g", m.t);
            out += buf;
            for (Eigen::Index i = 0; i < m.u.size(); ++i) {
                std::snprintf(buf, sizeof buf, " %.9g", m.u[i]);
                out += buf;
            }
            std::snprintf(buf, sizeof buf, " %.9g\n", m.value);
            out += buf;
        }
        return out;
    }

    std::string summary() const
    {
        char buf[320];
        std::snprintf(buf, sizeof buf,
                      "nullity=%d on %d/%zu samples, constancy max %.3g (tol %.0e), flatness max %.3g (tol %.0e)%s",
                      expected_nullity, passed(), samples.size(), max_of(&SampleVerdict::constancy), constancy_tol,
                      max_of(&SampleVerdict::riemann), flatness_tol, ok() ? ": pass" : ": FAIL");
        std::string s = buf;
        if (criteria_checked) {
            std::snprintf(buf, sizeof buf, "; wedge max %.3g, tau max %.3g", wedge_max, tau_max);
            s += buf;
        }
        return s;
    }
};

/// Interior sample parameters: t strictly inside the interval and u inside the box, both clear
/// of the flatness stencil; u on a 5-level lattice for one ruling direction and along the
/// coordinate axes otherwise.
inline std::vector<Vec> interior_samples(const PatchEval& patch, int t_samples)
{
    const FdSteps steps = fd_steps(patch);
    const double margin = steps.reach(0) * 1.01;
    const double t0 = patch.lo[0] + margin, t1 = patch.hi[0] - margin;
    const int q = patch.params - 1;
    const double levels[] = {-1.0, -0.5, 0.5, 1.0};
    std::vector<Vec> us{Vec::Zero(q)};
    if (q == 1) {
        for (double l : levels) us.push_back(Vec::Constant(1, l));
    } else {
        for (int j = 0; j < q; ++j)
            for (double l : levels) us.push_back(l * Vec::Unit(q, j));
    }
    std::vector<Vec> out;
    for (int k = 0; k < t_samples; ++k) {
        const double t = t_samples == 1 ? 0.5 * (t0 + t1) : t0 + (t1 - t0) * k / (t_samples - 1);
        for (const auto& u : us) {
            Vec p(patch.params);
            p[0] = t;
            for (int j = 0; j < q; ++j) {
                const double usable = std::max(0.0, 0.5 * patch.extent()[j + 1] - 1.01 * steps.reach(j + 1));
                p[j + 1] = patch.center()[j + 1] + usable * u[j];
            }
            out.push_back(p);
        }
    }
    std::sort(out.begin(), out.end(), [](const Vec& a, const Vec& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline bool near_boundary(const PatchEval& patch, const Vec& p, double band)
{
    for (int a = 0; a < patch.params; ++a) {
        const double w = band * (patch.hi[a] - patch.lo[a]);
        if (p[a] - patch.lo[a] < w || patch.hi[a] - p[a] < w) return true;
    }
    return false;
}

/// Nullity, tangent constancy and flatness at every interior sample.
inline VerificationReport verify_patch(const PatchEval& patch, int expected_nullity, VerifyOptions opt = {})
{
    VerificationReport rep;
    rep.expected_nullity = expected_nullity;
    rep.criterion_tol = opt.criterion_tol;
    rep.constancy_tol = opt.constancy_tol;
    rep.flatness_tol = opt.flatness_tol;
    rep.pass_fraction = opt.pass_fraction;
    const auto params = interior_samples(patch, opt.t_samples);
    rep.samples.resize(params.size());
    parallel_for(params.size(), opt.threads, [&](std::size_t i) {
        SampleVerdict s;
        s.params = params[i];
        s.near_boundary = near_boundary(patch, s.params, opt.boundary_band);
        try {
            const NullityReport nr = second_fundamental_form(patch, s.params, opt.nullity);
            s.nullity = nr.nullity;
            s.first_normal_dim = nr.first_normal_dim;
            s.constancy = tangent_constancy(patch, s.params[0], {Vec(s.params.tail(patch.params - 1))});
            s.riemann = flatness(patch, s.params).riemann_norm;
            s.pass = s.nullity == expected_nullity && s.constancy < opt.constancy_tol && s.riemann < opt.flatness_tol;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ImmersionFailure && e.kind() != ErrorKind::BoundaryTooClose) throw;
            s.pass = false;
            s.nullity = -1;
        }
        rep.samples[i] = std::move(s);
    });
    for (const auto& s : rep.samples) {
        const double t = s.params[0];
        const Vec u = s.params.tail(patch.params - 1);
        rep.metrics.push_back({"nullity", t, u, static_cast<double>(s.nullity)});
        rep.metrics.push_back({"first_normal_dim", t, u, static_cast<double>(s.first_normal_dim)});
        rep.metrics.push_back({"constancy", t, u, s.constancy});
        rep.metrics.push_back({"riemann", t, u, s.riemann});
    }
    return rep;
}

/// Full suite for a solver output: patch checks on the embedding box plus the wedge and tau
/// criteria along the curve.
inline VerificationReport verify_solution(const DevelopableSolution& sol, VerifyOptions opt = {})
{
    VerificationReport rep = verify_patch(sol.patch(), sol.m() - 1, opt);
    rep.criteria_checked = true;
    const Vec u0 = Vec::Zero(sol.m() - 1);
    for (double t : sol.grid) {
        double w = 0.0;
        for (double r : wedge_criterion(sol.curve, sol.rulings, t)) w = std::max(w, r);
        const double tr = tau_criterion(*sol.frame, sol.rulings, t).cwiseAbs().maxCoeff();
        rep.wedge_max = std::max(rep.wedge_max, w);
        rep.tau_max = std::max(rep.tau_max, tr);
        rep.metrics.push_back({"wedge", t, u0, w});
        rep.metrics.push_back({"tau", t, u0, tr});
    }
    return rep;
}

} // namespace devcauchy
