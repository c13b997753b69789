#pragma once

// Numerical exterior algebra on R^d for small d: k-vectors stored densely over strictly
// increasing multi-indices in lexicographic order.

#include "errors.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace devcauchy::exterior {

inline constexpr int max_dimension = 12;

using MultiIndex = std::vector<int>;

inline std::size_t binomial(int n, int k)
{
    if (k < 0 || k > n) return 0;
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    return r;
}

/// All strictly increasing k-tuples of {0,...,d-1}, lexicographic.
inline std::vector<MultiIndex> multi_indices(int d, int k)
{
    std::vector<MultiIndex> out;
    if (k < 0 || k > d) return out;
    MultiIndex idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        out.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == d - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

/// Position of a strictly increasing multi-index in the lexicographic order.
inline std::size_t index_of(const MultiIndex& J, int d)
{
    const int k = static_cast<int>(J.size());
    std::size_t pos = 0;
    int prev = -1;
    for (int i = 0; i < k; ++i) {
        for (int v = prev + 1; v < J[static_cast<std::size_t>(i)]; ++v) pos += binomial(d - v - 1, k - i - 1);
        prev = J[static_cast<std::size_t>(i)];
    }
    return pos;
}

/// Parity of the permutation that sorts `seq` (entries distinct): +1 even, -1 odd.
inline int permutation_sign(std::vector<int> seq)
{
    int sign = 1;
    for (std::size_t i = 0; i < seq.size(); ++i)
        for (std::size_t j = i + 1; j < seq.size(); ++j)
            if (seq[i] > seq[j]) sign = -sign;
    return sign;
}

class KVector {
public:
    KVector(int d, int k) : d_(d), k_(k), coeffs_(Vec::Zero(static_cast<Eigen::Index>(binomial(d, k))))
    {
        check(d, k);
    }

    KVector(int d, int k, Vec coeffs) : d_(d), k_(k), coeffs_(std::move(coeffs))
    {
        check(d, k);
        if (static_cast<std::size_t>(coeffs_.size()) != binomial(d, k))
            throw Error(ErrorKind::DimensionMismatch, "k-vector coefficient count must be C(d,k)");
    }

    static KVector from_vector(const Vec& v) { return KVector(static_cast<int>(v.size()), 1, v); }

    int dimension() const { return d_; }
    int grade() const { return k_; }
    const Vec& coeffs() const { return coeffs_; }
    double norm() const { return coeffs_.norm(); }

    double operator[](const MultiIndex& J) const { return coeffs_[static_cast<Eigen::Index>(index_of(J, d_))]; }

    /// Grade-1 k-vectors are plain vectors.
    Vec as_vector() const
    {
        if (k_ != 1) throw Error(ErrorKind::GradeOutOfRange, "as_vector needs a grade-1 k-vector");
        return coeffs_;
    }

    KVector operator+(const KVector& o) const { return KVector(d_, k_, coeffs_ + same(o).coeffs_); }
    KVector operator-(const KVector& o) const { return KVector(d_, k_, coeffs_ - same(o).coeffs_); }
    KVector operator*(double s) const { return KVector(d_, k_, s * coeffs_); }
    double dot(const KVector& o) const { return coeffs_.dot(same(o).coeffs_); }

private:
    static void check(int d, int k)
    {
        if (d < 1 || d > max_dimension) throw Error(ErrorKind::DimensionMismatch, "ambient dimension out of range");
        if (k < 0 || k > d) throw Error(ErrorKind::GradeOutOfRange, "grade out of range");
    }

    const KVector& same(const KVector& o) const
    {
        if (o.d_ != d_ || o.k_ != k_) throw Error(ErrorKind::DimensionMismatch, "k-vector shape mismatch");
        return o;
    }

    int d_;
    int k_;
    Vec coeffs_;
};

inline int common_dimension(const std::vector<Vec>& vs)
{
    if (vs.empty()) throw Error(ErrorKind::GradeOutOfRange, "empty vector list");
    const auto d = vs.front().size();
    for (const auto& v : vs)
        if (v.size() != d) throw Error(ErrorKind::DimensionMismatch, "vectors have different dimensions");
    return static_cast<int>(d);
}

/// v_1 ^ ... ^ v_l: the coefficient at J is the determinant of columns J of the stacked l x d
/// matrix. Inputs are first put in a canonical order and the permutation sign is applied
/// afterwards, so exchanging two arguments negates every coefficient bit-for-bit.
inline KVector wedge(const std::vector<Vec>& vectors)
{
    const int d = common_dimension(vectors);
    const int l = static_cast<int>(vectors.size());
    if (l > d) throw Error(ErrorKind::GradeOutOfRange, "more vectors than the ambient dimension");
    if (d > max_dimension) throw Error(ErrorKind::DimensionMismatch, "ambient dimension above 12");

    std::vector<int> order(static_cast<std::size_t>(l));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const Vec& va = vectors[static_cast<std::size_t>(a)];
        const Vec& vb = vectors[static_cast<std::size_t>(b)];
        return std::lexicographical_compare(va.data(), va.data() + d, vb.data(), vb.data() + d);
    });
    const double sign = permutation_sign(order);

    Mat stacked(l, d);
    for (int r = 0; r < l; ++r) stacked.row(r) = vectors[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])].transpose();

    const auto idx = multi_indices(d, l);
    Vec coeffs(static_cast<Eigen::Index>(idx.size()));
    Mat minor(l, l);
    for (std::size_t p = 0; p < idx.size(); ++p) {
        for (int c = 0; c < l; ++c) minor.col(c) = stacked.col(idx[p][static_cast<std::size_t>(c)]);
        coeffs[static_cast<Eigen::Index>(p)] = sign * minor.determinant();
    }
    return KVector(d, l, coeffs);
}

/// Lemma-style dependence test, projective in each argument: |v_1^...^v_l| <= tol * prod |v_i|.
inline bool is_dependent(const std::vector<Vec>& vectors, double tol)
{
    common_dimension(vectors);
    double prod = 1.0;
    for (const auto& v : vectors) {
        const double nv = v.norm();
        if (nv == 0.0) return true;
        prod *= nv;
    }
    return wedge(vectors).norm() <= tol * prod;
}

/// Returns lambda with wedge(a) = lambda * wedge(b) when both tuples span the same subspace
/// (normalized coefficientwise mismatch at most tol), nothing otherwise.
inline std::optional<double> same_span(const std::vector<Vec>& a, const std::vector<Vec>& b, double tol)
{
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "tuples have different lengths");
    if (common_dimension(a) != common_dimension(b)) throw Error(ErrorKind::DimensionMismatch, "tuples live in different spaces");
    if (is_dependent(a, tol) || is_dependent(b, tol))
        throw Error(ErrorKind::DegenerateInput, "same_span needs independent tuples");
    const KVector wa = wedge(a);
    const KVector wb = wedge(b);
    const double na = wa.norm(), nb = wb.norm();
    const double ip = wa.dot(wb);
    const double s = ip < 0.0 ? -1.0 : 1.0;
    const double mismatch = (wa.coeffs() / na - s * wb.coeffs() / nb).cwiseAbs().maxCoeff();
    if (mismatch > tol) return std::nullopt;
    return ip / (nb * nb);
}

/// Normalized mismatch used by same_span; 0 for identical spans, O(1) for transverse ones.
inline double span_mismatch(const std::vector<Vec>& a, const std::vector<Vec>& b)
{
    const KVector wa = wedge(a);
    const KVector wb = wedge(b);
    const double s = wa.dot(wb) < 0.0 ? -1.0 : 1.0;
    return (wa.coeffs() / wa.norm() - s * wb.coeffs() / wb.norm()).cwiseAbs().maxCoeff();
}

/// Hodge star with the convention *(e_J) = sign(J', J) e_{J'}, J' the complement of J, so that
/// <y, *beta> = det-pairing of y placed before beta.
inline KVector hodge_star(const KVector& beta)
{
    const int d = beta.dimension();
    const int k = beta.grade();
    const auto idx = multi_indices(d, k);
    KVector out(d, d - k);
    Vec c = Vec::Zero(out.coeffs().size());
    for (std::size_t p = 0; p < idx.size(); ++p) {
        const auto& J = idx[p];
        MultiIndex comp;
        for (int v = 0; v < d; ++v)
            if (!std::binary_search(J.begin(), J.end(), v)) comp.push_back(v);
        std::vector<int> seq = comp;
        seq.insert(seq.end(), J.begin(), J.end());
        c[static_cast<Eigen::Index>(index_of(comp, d))] += permutation_sign(seq) * beta.coeffs()[static_cast<Eigen::Index>(p)];
    }
    return KVector(d, d - k, c);
}

/// (m-1)-fold cross product in oriented orthonormal coordinates of an m-space: the unique w
/// with w . y = det(y, x_1, ..., x_{m-1}) for every y.
inline Vec cross_product(const std::vector<Vec>& vectors)
{
    const int m = common_dimension(vectors);
    if (static_cast<int>(vectors.size()) != m - 1)
        throw Error(ErrorKind::GradeOutOfRange, "cross product needs exactly m-1 vectors");
    return hodge_star(wedge(vectors)).as_vector();
}

} // namespace devcauchy::exterior
