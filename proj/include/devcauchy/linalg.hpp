#pragma once

#include "errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace devcauchy {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Interval {
    double t0 = 0.0;
    double t1 = 1.0;

    double length() const { return t1 - t0; }
    bool contains(double t, double slack = 0.0) const { return t >= t0 - slack && t <= t1 + slack; }
};

inline std::vector<double> uniform_grid(Interval iv, int samples)
{
    if (samples < 2) throw Error(ErrorKind::DimensionMismatch, "grid needs at least 2 samples");
    std::vector<double> g(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i)
        g[static_cast<std::size_t>(i)] = iv.t0 + iv.length() * static_cast<double>(i) / (samples - 1);
    g.back() = iv.t1;
    return g;
}

/// Index of the grid sample nearest to t (grid sorted ascending).
inline std::size_t nearest_index(const std::vector<double>& grid, double t)
{
    auto it = std::lower_bound(grid.begin(), grid.end(), t);
    if (it == grid.begin()) return 0;
    if (it == grid.end()) return grid.size() - 1;
    auto i = static_cast<std::size_t>(it - grid.begin());
    return (t - grid[i - 1] <= grid[i] - t) ? i - 1 : i;
}

/// Rank-decision policy shared by the solver and the verifier.
struct RankPolicy {
    double relative = 1e-6;
    double absolute = 1e-10;

    double threshold(double sigma_max) const { return std::max(relative * sigma_max, absolute); }
};

inline Vec singular_values(const Mat& a)
{
    if (a.size() == 0) return Vec();
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues();
}

inline int numerical_rank(const Vec& sv, RankPolicy policy = {})
{
    if (sv.size() == 0) return 0;
    const double thr = policy.threshold(sv.maxCoeff());
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > thr) ++r;
    return r;
}

inline int numerical_rank(const Mat& a, RankPolicy policy = {})
{
    return numerical_rank(singular_values(a), policy);
}

/// Orthonormal basis (as columns) of the orthogonal complement of the column span of `basis`.
/// `basis` columns must be orthonormal. Identity columns are picked greedily by residual norm.
inline Mat orthonormal_complement(const Mat& basis, Eigen::Index ambient)
{
    const Eigen::Index k = basis.cols();
    Mat out(ambient, ambient - k);
    Mat current(ambient, ambient);
    current.leftCols(k) = basis;
    Eigen::Index have = k;
    std::vector<bool> used(static_cast<std::size_t>(ambient), false);
    while (have < ambient) {
        Eigen::Index best = -1;
        double best_norm = -1.0;
        Vec best_vec;
        for (Eigen::Index c = 0; c < ambient; ++c) {
            if (used[static_cast<std::size_t>(c)]) continue;
            Vec v = Vec::Unit(ambient, c);
            for (int pass = 0; pass < 2; ++pass)
                for (Eigen::Index j = 0; j < have; ++j) v -= current.col(j).dot(v) * current.col(j);
            const double nv = v.norm();
            if (nv > best_norm) {
                best_norm = nv;
                best = c;
                best_vec = v;
            }
        }
        used[static_cast<std::size_t>(best)] = true;
        current.col(have) = best_vec / best_norm;
        out.col(have - k) = current.col(have);
        ++have;
    }
    return out;
}

/// Modified Gram-Schmidt on columns; throws DegenerateInput if a column collapses below `tol`
/// relative to its original norm.
inline Mat gram_schmidt(const Mat& cols, double tol = 1e-12)
{
    Mat q = cols;
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const double orig = cols.col(j).norm();
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
        const double nj = q.col(j).norm();
        if (!(nj > tol * std::max(orig, 1e-300)))
            throw Error(ErrorKind::DegenerateInput, "Gram-Schmidt column collapsed");
        q.col(j) /= nj;
    }
    return q;
}

/// Orthonormal basis of the null space of `a` (columns), using the rank policy.
inline Mat null_space(const Mat& a, RankPolicy policy = {})
{
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const int r = numerical_rank(svd.singularValues(), policy);
    return svd.matrixV().rightCols(a.cols() - r);
}

/// Matrix whose columns are the given vectors.
inline Mat columns(const std::vector<Vec>& vs)
{
    if (vs.empty()) return Mat();
    Mat m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
    for (std::size_t j = 0; j < vs.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = vs[j];
    return m;
}

/// Rank of the centered point cloud (affine hull dimension).
inline int affine_hull_dimension(const std::vector<Vec>& points, double relative = 1e-6)
{
    if (points.size() < 2) return 0;
    Vec mean = Vec::Zero(points.front().size());
    for (const auto& p : points) mean += p;
    mean /= static_cast<double>(points.size());
    Mat c(static_cast<Eigen::Index>(points.size()), mean.size());
    for (std::size_t i = 0; i < points.size(); ++i) c.row(static_cast<Eigen::Index>(i)) = (points[i] - mean).transpose();
    return numerical_rank(c, RankPolicy{relative, 1e-12});
}

} // namespace devcauchy
