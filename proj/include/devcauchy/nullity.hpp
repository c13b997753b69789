#pragma once

// Cauchy problem for submanifolds of constant nullity l: seed S of dimension m-l with a rank-m
// distribution D containing TS. Existence test on the bilinear map rho_p(v, n) = tangential
// part of the derivative of n along v, and the ruled solution S + D cap (Im rho)^perp.

#include "cauchy.hpp"
#include "devcheck.hpp"
#include "parallel.hpp"
#include "patch.hpp"

#include <algorithm>
#include <memory>
#include <optional>
#include <vector>

namespace devcauchy {

inline constexpr int default_seed_samples_2d = 33;

/// Seed parametrization over a box U of dimension k = m - l (k <= 2) with D given either by m
/// spanning fields, or by l fields completed by the coordinate tangents of the seed.
class SeedPatch {
public:
    SeedPatch(SeparablePatch sigma, std::vector<SeparablePatch> fields, int m, int samples = 0)
        : sigma_(std::make_shared<SeparablePatch>(std::move(sigma))), m_(m)
    {
        for (auto& f : fields) fields_.push_back(std::make_shared<SeparablePatch>(std::move(f)));
        const int k = this->k();
        if (k < 1 || k > 2) throw Error(ErrorKind::DimensionMismatch, "seed dimension must be 1 or 2");
        if (m_ <= k || m_ >= ambient()) throw Error(ErrorKind::DimensionMismatch, "need seed dimension < m < ambient dimension");
        for (const auto& f : fields_) {
            if (f->params() != k || f->ambient() != ambient())
                throw Error(ErrorKind::DimensionMismatch, "distribution fields must share the seed's parameters and ambient space");
            if ((f->lo() - sigma_->lo()).norm() != 0.0 || (f->hi() - sigma_->hi()).norm() != 0.0)
                throw Error(ErrorKind::DimensionMismatch, "distribution fields must share the seed's box");
        }
        const int given = static_cast<int>(fields_.size());
        if (given == m_) {
            implicit_tangents_ = false;
        } else if (given == m_ - k) {
            implicit_tangents_ = true;
        } else {
            throw Error(ErrorKind::DimensionMismatch, "distribution needs m fields, or m - dim S fields besides the seed tangents");
        }
        const int s = samples > 0 ? samples : (k == 1 ? default_grid_samples : default_seed_samples_2d);
        build_grid(s);
        validate();
    }

    int k() const { return sigma_->params(); }
    int m() const { return m_; }
    int l() const { return m_ - k(); }
    int ambient() const { return sigma_->ambient(); }
    int n() const { return ambient() - m_; }
    const SeparablePatch& sigma() const { return *sigma_; }
    const std::vector<Vec>& grid() const { return grid_; }
    int grid_side() const { return side_; }
    bool implicit_tangents() const { return implicit_tangents_; }

    Vec point(const Vec& p) const { return sigma_->value(p); }
    Mat jacobian(const Vec& p) const { return sigma_->jacobian(p); }

    /// Spanning fields of D at p as columns (seed tangents first when implicit).
    Mat span(const Vec& p) const
    {
        Mat f(ambient(), m_);
        int c = 0;
        if (implicit_tangents_)
            for (int a = 0; a < k(); ++a) f.col(c++) = sigma_->partial(p, a);
        for (const auto& x : fields_) f.col(c++) = x->value(p);
        return f;
    }

    /// Partial derivative along parameter s of span(p).
    Mat span_derivative(const Vec& p, int s) const
    {
        Mat f(ambient(), m_);
        int c = 0;
        auto order = [&](std::initializer_list<int> idx) {
            DerivOrder o(static_cast<std::size_t>(k()), 0);
            for (int a : idx) ++o[static_cast<std::size_t>(a)];
            return o;
        };
        if (implicit_tangents_)
            for (int a = 0; a < k(); ++a) f.col(c++) = sigma_->derivative(p, order({a, s}));
        for (const auto& x : fields_) f.col(c++) = x->derivative(p, order({s}));
        return f;
    }

private:
    void build_grid(int samples)
    {
        side_ = samples;
        if (k() == 1) {
            for (double t : uniform_grid({sigma_->lo()[0], sigma_->hi()[0]}, samples)) grid_.push_back(Vec::Constant(1, t));
            return;
        }
        const auto a = uniform_grid({sigma_->lo()[0], sigma_->hi()[0]}, samples);
        const auto b = uniform_grid({sigma_->lo()[1], sigma_->hi()[1]}, samples);
        for (double x : a)
            for (double y : b) grid_.push_back(Eigen::Vector2d(x, y));
    }

    void validate() const
    {
        for (const auto& p : grid_) {
            const Mat j = jacobian(p);
            const Vec sv = singular_values(j);
            if (!(sv[sv.size() - 1] > 1e-9)) throw Error(ErrorKind::ImmersionFailure, "seed is not immersed", p[0]);
            const Vec fsv = singular_values(span(p));
            if (!(fsv[fsv.size() - 1] > 1e-8 * std::max(1.0, fsv[0])))
                throw Error(ErrorKind::DegenerateDistribution, "distribution fields are dependent", p[0]);
            if (!implicit_tangents_) {
                const Mat q = Eigen::HouseholderQR<Mat>(span(p)).householderQ() * Mat::Identity(ambient(), m_);
                for (int a = 0; a < k(); ++a) {
                    const Vec v = j.col(a);
                    if ((v - q * (q.transpose() * v)).norm() > 1e-8 * std::max(1.0, v.norm()))
                        throw Error(ErrorKind::NotTangent, "seed tangent leaves the distribution", p[0]);
                }
            }
        }
    }

    std::shared_ptr<SeparablePatch> sigma_;
    std::vector<std::shared_ptr<SeparablePatch>> fields_;
    int m_;
    bool implicit_tangents_ = false;
    std::vector<Vec> grid_;
    int side_ = 0;
};

/// rho_p as a (k n) x m matrix: row (s, j) holds the D-frame coordinates of rho(d_s sigma, N_j).
struct RhoSample {
    Vec params;
    Mat d_basis;      // orthonormal basis of D_p (columns)
    Mat normal_basis; // orthonormal basis of D_p-perp
    Mat rho;
    Vec singular_values;
    int rank = 0;
    double shape_sigma = 0.0; // best smallest singular value of A_N over the searched normals
    Vec best_normal;
};

namespace nullity_detail {

// Derivative of the orthogonal projector onto span(F) along s.
inline Mat projector_derivative(const Mat& f, const Mat& df)
{
    const Mat g = f.transpose() * f;
    const Mat gi = g.inverse();
    const Mat dg = df.transpose() * f + f.transpose() * df;
    return df * gi * f.transpose() + f * gi * df.transpose() - f * gi * dg * gi * f.transpose();
}

} // namespace nullity_detail

inline RhoSample rho_sample(const SeedPatch& seed, const Vec& p, RankPolicy policy = {})
{
    using namespace nullity_detail;
    const int k = seed.k(), m = seed.m(), n = seed.n(), d = seed.ambient();
    RhoSample r;
    r.params = p;
    const Mat f = seed.span(p);
    r.d_basis = Eigen::HouseholderQR<Mat>(f).householderQ() * Mat::Identity(d, m);
    r.normal_basis = orthonormal_complement(r.d_basis, d);
    std::vector<Mat> dp;
    for (int s = 0; s < k; ++s) dp.push_back(projector_derivative(f, seed.span_derivative(p, s)));

    // rho(v_s, N) = P d_s N = -(d_s P) N for N perpendicular to D
    r.rho.resize(k * n, m);
    for (int s = 0; s < k; ++s)
        for (int j = 0; j < n; ++j)
            r.rho.row(s * n + j) = (r.d_basis.transpose() * (-dp[static_cast<std::size_t>(s)] * r.normal_basis.col(j))).transpose();
    r.singular_values = singular_values(r.rho);
    r.rank = numerical_rank(r.singular_values, policy);

    // shape operator A_N = tangential part along S of rho(., N), orthonormal basis of TS
    const Mat jac = seed.jacobian(p);
    Eigen::HouseholderQR<Mat> qr(jac);
    const Mat qs = qr.householderQ() * Mat::Identity(d, k);
    const Mat rs = qs.transpose() * jac;
    const Mat rs_inv = rs.inverse();
    auto shape = [&](const Vec& c) {
        const Vec nv = r.normal_basis * c;
        Mat img(d, k);
        for (int s = 0; s < k; ++s) img.col(s) = -dp[static_cast<std::size_t>(s)] * nv;
        return Mat(qs.transpose() * img * rs_inv);
    };
    std::vector<Vec> candidates;
    Mat stack(k * k, n);
    for (int j = 0; j < n; ++j) {
        const Mat a = shape(Vec::Unit(n, j));
        stack.col(j) = Eigen::Map<const Vec>(a.data(), a.size());
        candidates.push_back(Vec::Unit(n, j));
    }
    Eigen::JacobiSVD<Mat> svd(stack, Eigen::ComputeFullV);
    for (int j = 0; j < n; ++j) candidates.push_back(svd.matrixV().col(j));
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            candidates.push_back((Vec::Unit(n, a) + Vec::Unit(n, b)).normalized());
            candidates.push_back((Vec::Unit(n, a) - Vec::Unit(n, b)).normalized());
        }
    for (const auto& c : candidates) {
        const Vec sv = singular_values(shape(c));
        const double smin = sv[sv.size() - 1];
        if (smin > r.shape_sigma) {
            r.shape_sigma = smin;
            r.best_normal = r.normal_basis * c;
        }
    }
    return r;
}

enum class NullityVerdict { UniquelySolvable, SolvableNotUnique, NotSolvable };

inline std::string_view to_string(NullityVerdict v)
{
    switch (v) {
    case NullityVerdict::UniquelySolvable: return "UniquelySolvable";
    case NullityVerdict::SolvableNotUnique: return "SolvableNotUnique";
    case NullityVerdict::NotSolvable: return "NotSolvable";
    }
    return "?";
}

struct NullityExistence {
    std::vector<RhoSample> samples;
    int m = 0;
    int l = 0;
    NullityVerdict verdict = NullityVerdict::UniquelySolvable;
    std::optional<std::size_t> offending; // first sample breaking uniqueness or existence

    bool solvable() const { return verdict != NullityVerdict::NotSolvable; }
    bool unique() const { return verdict == NullityVerdict::UniquelySolvable; }
    int max_rank() const
    {
        int r = 0;
        for (const auto& s : samples) r = std::max(r, s.rank);
        return r;
    }
};

struct NullityOptions {
    RankPolicy rank{};
    double shape_tol = 1e-8;
    int threads = 1;
};

/// Rank of rho_p on the seed grid against m - l. The nonsingular-shape-operator hypothesis is
/// enforced wherever rank rho_p = m - l would make the solution unique; ShapeOperatorSingular
/// otherwise.
inline NullityExistence nullity_existence(const SeedPatch& seed, NullityOptions opt = {})
{
    NullityExistence rep;
    rep.m = seed.m();
    rep.l = seed.l();
    const auto& grid = seed.grid();
    rep.samples.resize(grid.size());
    parallel_for(grid.size(), opt.threads, [&](std::size_t i) { rep.samples[i] = rho_sample(seed, grid[i], opt.rank); });
    const int top = seed.k();
    bool below = false;
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
        const RhoSample& s = rep.samples[i];
        if (s.rank > top) {
            rep.verdict = NullityVerdict::NotSolvable;
            rep.offending = i;
            return rep;
        }
        if (s.rank < top && !below) {
            below = true;
            rep.offending = i;
        }
    }
    if (below) {
        rep.verdict = NullityVerdict::SolvableNotUnique;
        return rep;
    }
    for (const auto& s : rep.samples) {
        const double scale = std::max(1.0, s.singular_values.size() ? s.singular_values[0] : 0.0);
        if (!(s.shape_sigma > opt.shape_tol * scale))
            throw Error(ErrorKind::ShapeOperatorSingular, "no normal direction with a nonsingular shape operator", s.params[0]);
    }
    return rep;
}

/// Basis (columns) of D_p cap (Im rho_p)^perp with the dimension forced to `dim`.
inline Mat ruling_space(const RhoSample& r, int dim)
{
    Eigen::JacobiSVD<Mat> svd(r.rho, Eigen::ComputeFullV);
    return r.d_basis * svd.matrixV().rightCols(dim);
}

/// D_p cap (Im rho_p)^perp at its full dimension m - rank. In the non-unique case this is the
/// largest admissible ruling space; no solution is selected from the family.
inline Mat maximal_ruling_space(const RhoSample& r) { return ruling_space(r, static_cast<int>(r.d_basis.cols()) - r.rank); }

struct NullitySolution {
    std::shared_ptr<const SeedPatch> seed;
    std::vector<int> chosen; // columns of span(p) projected to give the rulings
    double epsilon = 0.0;
    NullityExistence report;
    RankPolicy policy{};

    int l() const { return seed->l(); }
    int k() const { return seed->k(); }

    /// Orthonormal rulings X_1..X_l at p: the chosen spanning fields projected onto the ruling
    /// space, symmetrically orthonormalized.
    std::vector<Vec> rulings(const Vec& p) const
    {
        const RhoSample r = rho_sample(*seed, p, policy);
        const Mat b = ruling_space(r, l());
        const Mat f = seed->span(p);
        Mat y(seed->ambient(), l());
        for (int j = 0; j < l(); ++j) y.col(j) = b * (b.transpose() * f.col(chosen[static_cast<std::size_t>(j)]));
        Eigen::SelfAdjointEigenSolver<Mat> es(y.transpose() * y);
        const Mat x = y * es.operatorInverseSqrt();
        std::vector<Vec> out;
        for (int j = 0; j < l(); ++j) out.push_back(x.col(j));
        return out;
    }

    /// d X_j / d p_s by central differences, second-order one-sided at the box faces.
    Mat ruling_derivatives(const Vec& p, int s) const
    {
        const double lo = seed->sigma().lo()[s], hi = seed->sigma().hi()[s];
        const double h = 1e-5 * (hi - lo);
        auto at = [&](double off) {
            Vec q = p;
            q[s] += off;
            const auto X = rulings(q);
            Mat out(seed->ambient(), l());
            for (int j = 0; j < l(); ++j) out.col(j) = X[static_cast<std::size_t>(j)];
            return out;
        };
        if (p[s] - h < lo) return Mat((-3.0 * at(0) + 4.0 * at(h) - at(2 * h)) / (2 * h));
        if (p[s] + h > hi) return Mat((3.0 * at(0) - 4.0 * at(-h) + at(-2 * h)) / (2 * h));
        return Mat((at(h) - at(-h)) / (2 * h));
    }

    Vec point(const Vec& p, const Vec& u) const
    {
        Vec x = seed->point(p);
        const auto X = rulings(p);
        for (int j = 0; j < l(); ++j) x += u[j] * X[static_cast<std::size_t>(j)];
        return x;
    }

    /// Evaluator over U x [-eps, eps]^l, seed parameters first.
    PatchEval patch() const
    {
        const NullitySolution self = *this;
        PatchEval pe;
        pe.params = k() + l();
        pe.ambient = seed->ambient();
        pe.lo = Vec::Constant(pe.params, -epsilon);
        pe.hi = Vec::Constant(pe.params, epsilon);
        pe.lo.head(k()) = seed->sigma().lo();
        pe.hi.head(k()) = seed->sigma().hi();
        const int kk = k(), ll = l();
        pe.eval = [self, kk, ll](const Vec& q) { return self.point(q.head(kk), q.tail(ll)); };
        return pe;
    }
};

namespace nullity_detail {

inline std::vector<std::vector<int>> subsets(int m, int l)
{
    std::vector<std::vector<int>> out;
    for (int mask = 0; mask < (1 << m); ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) != l) continue;
        std::vector<int> s;
        for (int i = 0; i < m; ++i)
            if ((mask >> i) & 1) s.push_back(i);
        out.push_back(s);
    }
    return out;
}

struct BoxSample {
    Vec p;
    Vec x;
    Mat j;               // seed partials
    std::vector<Vec> X;  // rulings
    std::vector<Mat> dX; // dX[s] columns j
};

} // namespace nullity_detail

struct NullitySolveOptions {
    NullityOptions existence{};
    std::optional<double> epsilon;
};

/// Solution S + D cap (Im rho)^perp for a uniquely solvable seed. Ruling fields come from the
/// best-conditioned choice of l spanning fields projected onto the ruling space; the box
/// half-width follows the same halving policy as the curve solver.
inline NullitySolution nullity_solve(const SeedPatch& seed_in, NullitySolveOptions opt = {})
{
    using namespace nullity_detail;
    auto seed = std::make_shared<const SeedPatch>(seed_in);
    NullityExistence rep = nullity_existence(*seed, opt.existence);
    if (rep.verdict == NullityVerdict::NotSolvable)
        throw Error(ErrorKind::NotSolvable, "rank of rho exceeds the seed dimension", rep.samples[*rep.offending].params[0]);
    if (rep.verdict == NullityVerdict::SolvableNotUnique)
        throw Error(ErrorKind::NotUnique, "rank of rho drops below the seed dimension; the solution family is not unique",
                    rep.samples[*rep.offending].params[0]);

    const int l = seed->l(), k = seed->k(), d = seed->ambient();
    std::vector<Mat> spaces;
    for (const auto& s : rep.samples) spaces.push_back(ruling_space(s, l));

    // pick the spanning fields whose projections stay best conditioned over the grid
    double best = -1.0;
    std::vector<int> chosen;
    for (const auto& c : subsets(seed->m(), l)) {
        double worst = 1e300;
        for (std::size_t i = 0; i < rep.samples.size(); ++i) {
            const Mat f = seed->span(rep.samples[i].params);
            Mat y(d, l);
            for (int j = 0; j < l; ++j) y.col(j) = f.col(c[static_cast<std::size_t>(j)]).normalized();
            const Vec sv = singular_values(spaces[i].transpose() * y);
            worst = std::min(worst, sv[sv.size() - 1]);
        }
        if (worst > best) {
            best = worst;
            chosen = c;
        }
    }
    if (!(best > 1e-3)) throw Error(ErrorKind::DegenerateDistribution, "no choice of spanning fields projects onto the ruling space everywhere");

    NullitySolution sol{seed, chosen, 0.0, std::move(rep), opt.existence.rank};

    // transversality to TS
    std::vector<BoxSample> samples(sol.report.samples.size());
    parallel_for(samples.size(), opt.existence.threads, [&](std::size_t i) {
        BoxSample b;
        b.p = sol.report.samples[i].params;
        b.x = seed->point(b.p);
        b.j = seed->jacobian(b.p);
        b.X = sol.rulings(b.p);
        for (int s = 0; s < k; ++s) b.dX.push_back(sol.ruling_derivatives(b.p, s));
        samples[i] = std::move(b);
    });
    for (const auto& b : samples) {
        Mat all(d, k + l);
        all.leftCols(k) = Eigen::HouseholderQR<Mat>(b.j).householderQ() * Mat::Identity(d, k);
        for (int j = 0; j < l; ++j) all.col(k + j) = b.X[static_cast<std::size_t>(j)];
        const Vec sv = singular_values(all);
        if (!(sv[sv.size() - 1] > 1e-8)) throw Error(ErrorKind::RulingInTS, "ruling space meets the seed tangent space", b.p[0]);
    }

    if (opt.epsilon) {
        sol.epsilon = *opt.epsilon;
        return sol;
    }

    const auto cs = box_detail::corners(l);
    auto tangent = [&](const BoxSample& b, const Vec& u) {
        std::vector<Vec> cols;
        for (int s = 0; s < k; ++s) cols.push_back(b.j.col(s) + b.dX[static_cast<std::size_t>(s)] * u);
        for (const auto& x : b.X) cols.push_back(x);
        return exterior::wedge(cols);
    };
    auto immersed = [&](const BoxSample& b, double eps) {
        const exterior::KVector z0 = tangent(b, Vec::Zero(l));
        for (const auto& c : cs) {
            const exterior::KVector z = tangent(b, eps * c);
            if (!(z.norm() > 1e-8) || !(z.coeffs().dot(z0.coeffs()) > 0.0)) return false;
        }
        return true;
    };
    // injectivity on a coarse subgrid
    std::vector<const BoxSample*> subs;
    const int side = seed->grid_side();
    const int stride = std::max(1, (side - 1) / (k == 1 ? 32 : 8));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const int a = static_cast<int>(i) / side, b = static_cast<int>(i) % side;
        const bool keep = k == 1 ? static_cast<int>(i) % stride == 0 || i + 1 == samples.size()
                                 : (a % stride == 0 || a == side - 1) && (b % stride == 0 || b == side - 1);
        if (keep) subs.push_back(&samples[i]);
    }
    std::vector<Vec> us = cs;
    us.push_back(Vec::Zero(l));
    auto injective = [&](double eps) {
        std::vector<std::pair<Vec, Vec>> pts;
        for (const auto* b : subs)
            for (const auto& u : us) {
                Vec x = b->x;
                for (int j = 0; j < l; ++j) x += eps * u[j] * b->X[static_cast<std::size_t>(j)];
                Vec param(k + l);
                param << b->p, eps * u;
                pts.emplace_back(param, x);
            }
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = a + 1; b < pts.size(); ++b)
                if ((pts[a].first - pts[b].first).norm() > 1e-3 && !((pts[a].second - pts[b].second).norm() > 1e-9)) return false;
        return true;
    };
    const bool check_injective = injective(0.0);
    double eps = 1.0;
    for (int h = 0; h <= 40; ++h, eps *= 0.5) {
        bool pass = std::all_of(samples.begin(), samples.end(), [&](const BoxSample& b) { return immersed(b, eps); });
        if (pass && check_injective) pass = injective(eps);
        if (pass) {
            sol.epsilon = eps / 2;
            return sol;
        }
    }
    throw Error(ErrorKind::BoxCollapse, "no box width passed after 40 halvings");
}

struct NullityVerification {
    int expected_nullity = 0;
    int samples = 0;
    int passed = 0;
    double constancy_max = 0.0;
    double wedge_max = 0.0;
    std::vector<int> nullities;

    double fraction() const { return samples ? static_cast<double>(passed) / samples : 0.0; }
    bool ok(double pass_fraction = 0.95, double wedge_tol = 1e-6) const { return fraction() >= pass_fraction && wedge_max < wedge_tol; }
};

/// Relative nullity and tangent constancy along the rulings at interior samples, plus the
/// wedge criterion dX_j/dt^s ^ d sigma ^ X = 0 on the seed grid.
inline NullityVerification verify_nullity_solution(const NullitySolution& sol, int per_dim = 5, double constancy_tol = 1e-6)
{
    const PatchEval pe = sol.patch();
    const FdSteps steps = fd_steps(pe);
    const int k = sol.k(), l = sol.l();
    NullityVerification v;
    v.expected_nullity = l;

    std::vector<Vec> bases;
    std::vector<std::vector<double>> axes;
    for (int s = 0; s < k; ++s) {
        const double margin = 1.01 * steps.reach(s);
        axes.push_back(uniform_grid({pe.lo[s] + margin, pe.hi[s] - margin}, per_dim));
    }
    if (k == 1) {
        for (double a : axes[0]) bases.push_back(Vec::Constant(1, a));
    } else {
        for (double a : axes[0])
            for (double b : axes[1]) bases.push_back(Eigen::Vector2d(a, b));
    }
    for (const auto& base : bases) {
        Vec p0(k + l);
        p0 << base, Vec::Zero(l);
        const exterior::KVector z0 = tangent_kvector(first_partials(pe, p0, steps));
        std::vector<Vec> us{Vec::Zero(l)};
        for (int j = 0; j < l; ++j) {
            const double usable = std::max(0.0, sol.epsilon - 1.01 * steps.reach(k + j));
            us.push_back(usable * Vec::Unit(l, j));
            us.push_back(-usable * Vec::Unit(l, j));
        }
        for (const auto& u : us) {
            Vec p(k + l);
            p << base, u;
            ++v.samples;
            try {
                const NullityReport r = second_fundamental_form(pe, p);
                const exterior::KVector z = tangent_kvector(first_partials(pe, p, steps));
                const Vec& a = z.coeffs();
                const Vec& b = z0.coeffs();
                const double dev = (a - b * (a.dot(b) / b.dot(b))).norm() / a.norm();
                v.constancy_max = std::max(v.constancy_max, dev);
                v.nullities.push_back(r.nullity);
                if (r.nullity == l && dev < constancy_tol) ++v.passed;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::ImmersionFailure && e.kind() != ErrorKind::BoundaryTooClose) throw;
                v.nullities.push_back(-1);
            }
        }
    }

    for (const auto& p : sol.seed->grid()) {
        const Mat j = sol.seed->jacobian(p);
        const auto X = sol.rulings(p);
        std::vector<Vec> base;
        for (int s = 0; s < k; ++s) base.push_back(j.col(s));
        base.insert(base.end(), X.begin(), X.end());
        const double bnorm = exterior::wedge(base).norm();
        for (int s = 0; s < k; ++s) {
            const Mat dX = sol.ruling_derivatives(p, s);
            for (int jj = 0; jj < l; ++jj) {
                const Vec dx = dX.col(jj);
                std::vector<Vec> args{dx};
                args.insert(args.end(), base.begin(), base.end());
                v.wedge_max = std::max(v.wedge_max, exterior::wedge(args).norm() / (bnorm * (dx.norm() + 1e-6)));
            }
        }
    }
    return v;
}

/// Correspondence between the curve solver's verdicts and the nullity verdicts on curve seeds:
/// Solvable <-> unique, RankTooHigh <-> not solvable, and a non-curving curve or a vanishing
/// rho <-> not unique or a singular shape operator.
inline bool verdicts_agree(Verdict curve_verdict, std::optional<NullityVerdict> seed_verdict)
{
    switch (curve_verdict) {
    case Verdict::Solvable: return seed_verdict == NullityVerdict::UniquelySolvable;
    case Verdict::RankTooHigh: return seed_verdict == NullityVerdict::NotSolvable;
    case Verdict::CurveNotCurving:
    case Verdict::RankDropsToZero: return !seed_verdict || seed_verdict == NullityVerdict::SolvableNotUnique;
    }
    return false;
}

} // namespace devcauchy
