#pragma once

// Curves, distributions along curves, adapted orthonormal frames, the tau matrix and the
// rho map.

#include "errors.hpp"
#include "exterior.hpp"
#include "field.hpp"
#include "jet.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace devcauchy {

inline constexpr int default_grid_samples = 257;

class CurveEval {
public:
    explicit CurveEval(FieldPtr field, int grid_samples = default_grid_samples) : field_(std::move(field))
    {
        if (!field_) throw Error(ErrorKind::DimensionMismatch, "curve needs a field");
        const Interval iv = field_->interval();
        if (!(iv.t0 < iv.t1)) throw Error(ErrorKind::DimensionMismatch, "curve interval must satisfy t0 < t1");
        for (double t : uniform_grid(iv, grid_samples)) {
            const double speed = field_->jet(t).d[1].norm();
            if (!(speed >= 1e-9)) throw Error(ErrorKind::IrregularCurve, "curve speed below 1e-9", t);
        }
    }

    int dim() const { return field_->dim(); }
    Interval interval() const { return field_->interval(); }
    const FieldPtr& field() const { return field_; }
    bool exact() const { return field_->exact(); }

    VecJet jet(double t) const { return field_->jet(t); }
    Vec point(double t) const { return field_->value(t); }
    Vec velocity(double t) const { return field_->jet(t).d[1]; }

private:
    FieldPtr field_;
};

enum class Tangency { Assert, Check };

/// Rank-m distribution along a curve. With m-1 fields the curve velocity supplies the
/// missing first field; with m fields the velocity must lie in their span.
struct DistributionSpec {
    int rank = 2;
    std::vector<FieldPtr> fields;
    Tangency tangency = Tangency::Check;
};

struct FrameJet {
    std::vector<VecJet> E;
    std::vector<VecJet> N;
    ScalarJet speed;
};

class FrameField {
public:
    virtual ~FrameField() = default;

    virtual FrameJet at(double t) const = 0;

    int m() const { return m_; }
    int n() const { return n_; }
    int ambient() const { return m_ + n_; }
    Interval interval() const { return iv_; }
    const std::vector<double>& grid() const { return grid_; }

    Mat tangent_basis(double t) const { return values(at(t).E); }
    Mat normal_basis(double t) const { return values(at(t).N); }

protected:
    static Mat values(const std::vector<VecJet>& js)
    {
        Mat out(js.front().d[0].size(), static_cast<Eigen::Index>(js.size()));
        for (std::size_t i = 0; i < js.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = js[i].d[0];
        return out;
    }

    int m_ = 0;
    int n_ = 0;
    Interval iv_;
    std::vector<double> grid_;
};

using FramePtr = std::shared_ptr<const FrameField>;

/// Checks the frame invariants at every grid sample: orthonormality to 1e-10 and
/// successive samples closer than 0.5.
inline void check_frame_invariants(const FrameField& frame)
{
    Mat prev;
    for (double t : frame.grid()) {
        const FrameJet f = frame.at(t);
        Mat all(frame.ambient(), frame.ambient());
        for (int i = 0; i < frame.m(); ++i) all.col(i) = f.E[static_cast<std::size_t>(i)].d[0];
        for (int k = 0; k < frame.n(); ++k) all.col(frame.m() + k) = f.N[static_cast<std::size_t>(k)].d[0];
        const double gram = (all.transpose() * all - Mat::Identity(all.cols(), all.cols())).cwiseAbs().maxCoeff();
        if (gram > 1e-10) throw Error(ErrorKind::Internal, "frame lost orthonormality", t);
        if (prev.size() && (all - prev).colwise().norm().maxCoeff() >= 0.5)
            throw Error(ErrorKind::DegenerateDistribution, "frame jumps between grid samples; refine the grid", t);
        prev = all;
    }
}

/// Frame adapted to a curve and a distribution: E_1 is the unit tangent, (E_i) spans D and
/// (N_k) completes an orthonormal basis. Tangent legs come from Gram-Schmidt on the velocity
/// and the spanning fields (leaving one field out when m are given). Normal references, and
/// tangent references when no single field can be left out everywhere, are propagated along the
/// grid; a subset of grid samples serves as anchors and the frame at t is built from references
/// blended smoothly between anchors.
class AdaptedFrame final : public FrameField {
public:
    AdaptedFrame(CurveEval curve, DistributionSpec dist, std::vector<double> grid)
        : curve_(std::move(curve)), dist_(std::move(dist))
    {
        m_ = dist_.rank;
        n_ = curve_.dim() - m_;
        iv_ = curve_.interval();
        grid_ = std::move(grid);
        validate();
        build();
    }

    const CurveEval& curve() const { return curve_; }
    const DistributionSpec& distribution() const { return dist_; }
    const std::vector<double>& anchors() const { return anchor_t_; }

    FrameJet at(double t) const override
    {
        // references blended between the two enclosing anchors with a C-infinity step, so
        // the frame is smooth in t and its jets include the blend
        auto k = static_cast<std::size_t>(std::upper_bound(anchor_t_.begin(), anchor_t_.end(), t) - anchor_t_.begin());
        k = std::clamp<std::size_t>(k, 1, anchor_t_.size() - 1) - 1;
        const ScalarJet w = smooth_step(t, anchor_t_[k], anchor_t_[k + 1]);
        auto blend = [&](const std::vector<std::vector<Vec>>& refs) {
            const std::size_t a = anchors_[k], b = anchors_[k + 1];
            std::vector<VecJet> out;
            for (std::size_t i = 0; i < refs[a].size(); ++i)
                out.push_back(constant_jet(refs[a][i]) + w * constant_jet(Vec(refs[b][i] - refs[a][i])));
            return out;
        };
        const std::vector<VecJet> nref = blend(normal_refs_);
        if (tangent_refs_.empty()) return compute(t, nullptr, &nref);
        const std::vector<VecJet> tref = blend(tangent_refs_);
        return compute(t, &tref, &nref);
    }

private:
    void validate() const
    {
        if (m_ < 2) throw Error(ErrorKind::DimensionMismatch, "distribution rank must be at least 2");
        if (n_ < 1) throw Error(ErrorKind::DimensionMismatch, "ambient dimension must exceed the distribution rank");
        if (curve_.dim() > exterior::max_dimension) throw Error(ErrorKind::DimensionMismatch, "ambient dimension above 12");
        const auto count = static_cast<int>(dist_.fields.size());
        if (count != m_ - 1 && count != m_)
            throw Error(ErrorKind::DimensionMismatch, "distribution needs m-1 or m spanning fields");
        for (const auto& f : dist_.fields)
            if (!f || f->dim() != curve_.dim()) throw Error(ErrorKind::DimensionMismatch, "field dimension differs from the curve");
        if (grid_.size() < 2) throw Error(ErrorKind::DimensionMismatch, "grid needs at least 2 samples");
    }

    std::vector<Vec> field_values(double t) const
    {
        std::vector<Vec> vs;
        for (const auto& f : dist_.fields) vs.push_back(f->value(t));
        return vs;
    }

    void build()
    {
        const bool full = static_cast<int>(dist_.fields.size()) == m_;
        if (full) choose_skipped_field();
        const bool use_refs = full && skip_ < 0;
        for (std::size_t s = 0; s < grid_.size(); ++s) {
            const double t = grid_[s];
            const Vec vel = curve_.velocity(t);
            std::vector<Vec> fs = field_values(t);
            if (full) {
                if (exterior::is_dependent(fs, 1e-8))
                    throw Error(ErrorKind::DegenerateDistribution, "spanning fields are dependent", t);
                if (dist_.tangency == Tangency::Check) {
                    const Mat q = gram_schmidt(columns(fs), 1e-14);
                    const Vec off = vel - q * (q.transpose() * vel);
                    if (off.norm() > 1e-8 * vel.norm())
                        throw Error(ErrorKind::NotTangent, "curve velocity leaves the distribution", t);
                }
            } else {
                fs.insert(fs.begin(), vel);
                if (exterior::is_dependent(fs, 1e-8))
                    throw Error(ErrorKind::DegenerateDistribution, "velocity and spanning fields are dependent", t);
            }

            std::vector<VecJet> tref;
            if (use_refs) {
                if (s == 0) tref = constant_jets(initial_tangent_refs(t));
                else tref = constant_jets(tangent_refs_.back());
            }
            std::vector<VecJet> nref;
            if (s == 0) {
                FrameJet f0 = compute(t, use_refs ? &tref : nullptr, nullptr);
                nref = constant_jets(complement(f0));
            } else {
                nref = constant_jets(normal_refs_.back());
            }
            const FrameJet f = compute(t, use_refs ? &tref : nullptr, &nref);
            if (use_refs) {
                std::vector<Vec> next;
                for (int i = 1; i < m_; ++i) next.push_back(f.E[static_cast<std::size_t>(i)].d[0]);
                tangent_refs_.push_back(std::move(next));
            }
            std::vector<Vec> nnext;
            for (const auto& nj : f.N) nnext.push_back(nj.d[0]);
            normal_refs_.push_back(std::move(nnext));
        }
        choose_anchors();
        check_frame_invariants(*this);
    }

    // exp(-1/x) / (exp(-1/x) + exp(-1/(1-x))) with x = (t-a)/(b-a), as a jet in t
    static ScalarJet smooth_step(double t, double a, double b)
    {
        const double x = (t - a) / (b - a);
        ScalarJet out;
        out.d = {x <= 0.5 ? 0.0 : 1.0, 0.0, 0.0, 0.0};
        if (x <= 1e-3 || x >= 1.0 - 1e-3) return out;
        auto bump = [](const ScalarJet& y) {
            const ScalarJet g = -1.0 * reciprocal(y);
            const double e = std::exp(g.d[0]);
            return compose(g, e, e, e, e);
        };
        ScalarJet xj;
        xj.d = {x, 1.0 / (b - a), 0.0, 0.0};
        ScalarJet yj;
        yj.d = {1.0 - x, -1.0 / (b - a), 0.0, 0.0};
        const ScalarJet f = bump(xj), g = bump(yj);
        return f * reciprocal(f + g);
    }

    // With m fields, the tangent legs come from the velocity and m-1 of the fields when one
    // choice stays well conditioned over the whole grid (smallest singular value of the unit
    // columns at least 0.05); the frame is then analytic in t. Otherwise skip_ stays -1 and
    // propagated references are used.
    void choose_skipped_field()
    {
        double best = 0.05;
        for (int skip = 0; skip < m_; ++skip) {
            double worst = 1.0;
            for (double t : grid_) {
                Mat a(curve_.dim(), m_);
                a.col(0) = curve_.velocity(t).normalized();
                int c = 1;
                for (int j = 0; j < m_; ++j)
                    if (j != skip) a.col(c++) = dist_.fields[static_cast<std::size_t>(j)]->value(t).normalized();
                worst = std::min(worst, singular_values(a).minCoeff());
                if (worst < best) break;
            }
            if (worst >= best) {
                best = worst;
                skip_ = skip;
            }
        }
    }

    static std::vector<VecJet> constant_jets(const std::vector<Vec>& vs)
    {
        std::vector<VecJet> out;
        for (const auto& v : vs) out.push_back(constant_jet(v));
        return out;
    }

    // Anchors are as far apart as possible while the references move by at most 1 (column
    // norm, about 60 degrees) from one anchor to the next; a short last segment is merged.
    void choose_anchors()
    {
        auto moved = [&](std::size_t a, std::size_t b) {
            double d = 0.0;
            for (std::size_t i = 0; i < normal_refs_[a].size(); ++i) d = std::max(d, (normal_refs_[a][i] - normal_refs_[b][i]).norm());
            if (!tangent_refs_.empty())
                for (std::size_t i = 0; i < tangent_refs_[a].size(); ++i)
                    d = std::max(d, (tangent_refs_[a][i] - tangent_refs_[b][i]).norm());
            return d;
        };
        anchors_ = {0};
        const std::size_t last = grid_.size() - 1;
        while (anchors_.back() < last) {
            const std::size_t a = anchors_.back();
            std::size_t b = a + 1;
            while (b < last && moved(a, b + 1) <= 1.0) ++b;
            anchors_.push_back(b);
        }
        if (anchors_.size() > 2) {
            const std::size_t n = anchors_.size();
            if (anchors_[n - 1] - anchors_[n - 2] < (anchors_[n - 2] - anchors_[n - 3]) / 4) anchors_.erase(anchors_.end() - 2);
        }
        anchor_t_.clear();
        for (std::size_t i : anchors_) anchor_t_.push_back(grid_[i]);
    }

    // Greedy choice of m-1 directions of D orthogonal to the tangent at the first sample.
    std::vector<Vec> initial_tangent_refs(double t) const
    {
        const Vec e1 = curve_.velocity(t).normalized();
        std::vector<Vec> basis{e1};
        std::vector<Vec> fs = field_values(t);
        std::vector<bool> used(fs.size(), false);
        for (int k = 1; k < m_; ++k) {
            double best = -1.0;
            std::size_t pick = 0;
            Vec pick_vec;
            for (std::size_t c = 0; c < fs.size(); ++c) {
                if (used[c]) continue;
                Vec v = fs[c];
                for (int pass = 0; pass < 2; ++pass)
                    for (const auto& b : basis) v -= b.dot(v) * b;
                const double r = v.norm() / fs[c].norm();
                if (r > best) {
                    best = r;
                    pick = c;
                    pick_vec = v;
                }
            }
            used[pick] = true;
            basis.push_back(pick_vec.normalized());
        }
        return {basis.begin() + 1, basis.end()};
    }

    std::vector<Vec> complement(const FrameJet& f) const
    {
        Mat e(curve_.dim(), m_);
        for (int i = 0; i < m_; ++i) e.col(i) = f.E[static_cast<std::size_t>(i)].d[0];
        const Mat c = orthonormal_complement(e, curve_.dim());
        std::vector<Vec> out;
        for (Eigen::Index k = 0; k < c.cols(); ++k) out.push_back(c.col(k));
        return out;
    }

    FrameJet compute(double t, const std::vector<VecJet>* tref, const std::vector<VecJet>* nref) const
    {
        FrameJet out;
        const VecJet vel = derivative(curve_.jet(t));
        out.speed = norm(vel);

        if (!tref) {
            std::vector<VecJet> in{vel};
            for (std::size_t j = 0; j < dist_.fields.size(); ++j)
                if (static_cast<int>(j) != skip_) in.push_back(dist_.fields[j]->jet(t));
            out.E = gram_schmidt(in);
        } else {
            std::vector<VecJet> fj;
            for (const auto& f : dist_.fields) fj.push_back(f->jet(t));
            const std::vector<VecJet> q = gram_schmidt(fj);
            std::vector<VecJet> in{vel};
            for (const auto& rc : *tref) {
                VecJet p = dot(rc, q.front()) * q.front();
                for (std::size_t i = 1; i < q.size(); ++i) p = p + dot(rc, q[i]) * q[i];
                in.push_back(p);
            }
            out.E = gram_schmidt(in);
        }

        if (nref) {
            std::vector<VecJet> in;
            for (const auto& r : *nref) {
                VecJet p = r;
                for (const auto& e : out.E) p = p - dot(p, e) * e;
                in.push_back(p);
            }
            out.N = gram_schmidt(in);
        }
        return out;
    }

    CurveEval curve_;
    DistributionSpec dist_;
    std::vector<std::vector<Vec>> tangent_refs_;
    std::vector<std::vector<Vec>> normal_refs_;
    int skip_ = -1;
    std::vector<std::size_t> anchors_;
    std::vector<double> anchor_t_;
};

inline std::shared_ptr<const AdaptedFrame> adapt_frame(const CurveEval& curve, const DistributionSpec& dist,
                                                       std::vector<double> grid)
{
    return std::make_shared<AdaptedFrame>(curve, dist, std::move(grid));
}

inline std::shared_ptr<const AdaptedFrame> adapt_frame(const CurveEval& curve, const DistributionSpec& dist,
                                                       int samples = default_grid_samples)
{
    return adapt_frame(curve, dist, uniform_grid(curve.interval(), samples));
}

/// Tangential and normal parts of v relative to D_t.
inline std::pair<Vec, Vec> project(const FrameField& frame, double t, const Vec& v)
{
    if (v.size() != frame.ambient()) throw Error(ErrorKind::DimensionMismatch, "vector dimension differs from ambient");
    const Mat e = frame.tangent_basis(t);
    Vec tangential = e * (e.transpose() * v);
    Vec normal = v - tangential;
    return {std::move(tangential), std::move(normal)};
}

/// tau[i][k] = D_t E_i . N_k with derivatives taken with respect to arclength.
inline Mat tau_matrix(const FrameJet& f)
{
    const auto m = static_cast<Eigen::Index>(f.E.size());
    const auto n = static_cast<Eigen::Index>(f.N.size());
    Mat tau(m, n);
    const double speed = f.speed.d[0];
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            tau(i, k) = f.E[static_cast<std::size_t>(i)].d[1].dot(f.N[static_cast<std::size_t>(k)].d[0]) / speed;
    return tau;
}

inline Mat tau_matrix(const FrameField& frame, double t) { return tau_matrix(frame.at(t)); }

/// rho[i][k] = tangential coordinates of D_t N_k (per unit arclength); equals -tau.
inline Mat rho_matrix(const FrameJet& f)
{
    const auto m = static_cast<Eigen::Index>(f.E.size());
    const auto n = static_cast<Eigen::Index>(f.N.size());
    Mat rho(m, n);
    const double speed = f.speed.d[0];
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            rho(i, k) = f.N[static_cast<std::size_t>(k)].d[1].dot(f.E[static_cast<std::size_t>(i)].d[0]) / speed;
    return rho;
}

inline Mat rho_matrix(const FrameField& frame, double t)
{
    const FrameJet f = frame.at(t);
    Mat rho = rho_matrix(f);
    const Mat tau = tau_matrix(f);
    if ((rho + tau).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + tau.cwiseAbs().maxCoeff()))
        throw Error(ErrorKind::Internal, "rho and -tau disagree", t);
    return rho;
}

} // namespace devcauchy
