#pragma once

// Truncated Taylor data (derivatives up to third order in one variable) for scalars and
// vectors, with product-rule arithmetic. `order` records how many derivatives are valid;
// every operation truncates to the smaller input order.

#include "linalg.hpp"

#include <array>
#include <cmath>

namespace devcauchy {

template <class T>
struct Jet {
    std::array<T, 4> d{};
    int order = 3;

    const T& value() const { return d[0]; }
};

using ScalarJet = Jet<double>;
using VecJet = Jet<Vec>;

namespace jet_detail {

constexpr double binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};

inline double zero_like(double) { return 0.0; }
inline Vec zero_like(const Vec& v) { return Vec::Zero(v.size()); }

template <class R, class A, class B, class Op>
Jet<R> leibniz(const Jet<A>& a, const Jet<B>& b, Op op)
{
    Jet<R> r;
    r.order = std::min(a.order, b.order);
    for (int k = 0; k <= r.order; ++k) {
        R acc = op(a.d[0], b.d[static_cast<std::size_t>(k)]);
        for (int j = 1; j <= k; ++j)
            acc = acc + binom[k][j] * op(a.d[static_cast<std::size_t>(j)], b.d[static_cast<std::size_t>(k - j)]);
        r.d[static_cast<std::size_t>(k)] = acc;
    }
    for (int k = r.order + 1; k < 4; ++k) r.d[static_cast<std::size_t>(k)] = zero_like(r.d[0]);
    return r;
}

} // namespace jet_detail

template <class T>
Jet<T> constant_jet(const T& v, int order = 3)
{
    Jet<T> j;
    j.order = order;
    j.d[0] = v;
    for (int k = 1; k < 4; ++k) j.d[static_cast<std::size_t>(k)] = jet_detail::zero_like(v);
    return j;
}

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b)
{
    Jet<T> r;
    r.order = std::min(a.order, b.order);
    for (std::size_t k = 0; k < 4; ++k) r.d[k] = a.d[k] + b.d[k];
    return r;
}

template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b)
{
    Jet<T> r;
    r.order = std::min(a.order, b.order);
    for (std::size_t k = 0; k < 4; ++k) r.d[k] = a.d[k] - b.d[k];
    return r;
}

template <class T>
Jet<T> operator-(const Jet<T>& a)
{
    Jet<T> r = a;
    for (auto& x : r.d) x = -x;
    return r;
}

inline ScalarJet operator*(const ScalarJet& a, const ScalarJet& b)
{
    return jet_detail::leibniz<double>(a, b, [](double x, double y) { return x * y; });
}

inline VecJet operator*(const ScalarJet& a, const VecJet& b)
{
    return jet_detail::leibniz<Vec>(a, b, [](double x, const Vec& y) -> Vec { return x * y; });
}

template <class T>
Jet<T> operator*(double s, const Jet<T>& a)
{
    Jet<T> r = a;
    for (auto& x : r.d) x = s * x;
    return r;
}

inline ScalarJet dot(const VecJet& a, const VecJet& b)
{
    return jet_detail::leibniz<double>(a, b, [](const Vec& x, const Vec& y) { return x.dot(y); });
}

/// Derivative of a jet: shifts coefficients down one order.
template <class T>
Jet<T> derivative(const Jet<T>& a)
{
    Jet<T> r;
    r.order = a.order - 1;
    for (std::size_t k = 0; k < 3; ++k) r.d[k] = a.d[k + 1];
    r.d[3] = jet_detail::zero_like(a.d[0]);
    return r;
}

/// h(a) given h and its first three derivatives evaluated at a.value().
inline ScalarJet compose(const ScalarJet& a, double h0, double h1, double h2, double h3)
{
    ScalarJet r;
    r.order = a.order;
    const double a1 = a.d[1], a2 = a.d[2], a3 = a.d[3];
    r.d[0] = h0;
    r.d[1] = a.order >= 1 ? h1 * a1 : 0.0;
    r.d[2] = a.order >= 2 ? h2 * a1 * a1 + h1 * a2 : 0.0;
    r.d[3] = a.order >= 3 ? h3 * a1 * a1 * a1 + 3.0 * h2 * a1 * a2 + h1 * a3 : 0.0;
    return r;
}

inline ScalarJet reciprocal(const ScalarJet& a)
{
    const double x = a.d[0];
    if (x == 0.0) throw Error(ErrorKind::EvalDomain, "reciprocal of zero jet");
    const double i = 1.0 / x;
    return compose(a, i, -i * i, 2.0 * i * i * i, -6.0 * i * i * i * i);
}

inline ScalarJet sqrt(const ScalarJet& a)
{
    const double x = a.d[0];
    if (!(x > 0.0)) throw Error(ErrorKind::EvalDomain, "sqrt jet needs a positive argument");
    const double s = std::sqrt(x);
    return compose(a, s, 0.5 / s, -0.25 / (x * s), 0.375 / (x * x * s));
}

inline ScalarJet rsqrt(const ScalarJet& a)
{
    const double x = a.d[0];
    if (!(x > 0.0)) throw Error(ErrorKind::EvalDomain, "rsqrt jet needs a positive argument");
    const double r = 1.0 / std::sqrt(x);
    return compose(a, r, -0.5 * r / x, 0.75 * r / (x * x), -1.875 * r / (x * x * x));
}

inline ScalarJet norm(const VecJet& v) { return sqrt(dot(v, v)); }

inline VecJet normalized(const VecJet& v) { return rsqrt(dot(v, v)) * v; }

inline VecJet truncate(VecJet v, int order)
{
    if (order < v.order) {
        v.order = order;
        for (int k = order + 1; k < 4; ++k) v.d[static_cast<std::size_t>(k)].setZero();
    }
    return v;
}

/// Modified Gram-Schmidt on jets. Inputs are processed in order; each output is unit length.
inline std::vector<VecJet> gram_schmidt(const std::vector<VecJet>& in)
{
    std::vector<VecJet> out;
    out.reserve(in.size());
    for (const auto& u : in) {
        VecJet w = u;
        for (const auto& e : out) w = w - dot(w, e) * e;
        if (!(w.d[0].norm() > 1e-14 * std::max(u.d[0].norm(), 1e-300)))
            throw Error(ErrorKind::DegenerateInput, "jet Gram-Schmidt column collapsed");
        out.push_back(normalized(w));
    }
    return out;
}

} // namespace devcauchy
