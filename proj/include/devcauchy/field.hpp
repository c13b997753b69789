#pragma once

// Vector-valued functions of one parameter with derivatives up to third order.

#include "errors.hpp"
#include "expr.hpp"
#include "jet.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace devcauchy {

class Field {
public:
    virtual ~Field() = default;

    virtual int dim() const = 0;
    virtual Interval interval() const = 0;
    /// Value and derivatives at t; `order` of the result says how many are meaningful.
    virtual VecJet jet(double t) const = 0;
    /// True when derivatives are exact rather than finite-difference estimates.
    virtual bool exact() const { return false; }

    Vec value(double t) const { return jet(t).d[0]; }
    Vec derivative(double t) const { return jet(t).d[1]; }

protected:
    void check_inside(double t) const
    {
        const Interval iv = interval();
        if (!iv.contains(t, 1e-9 * std::max(1.0, iv.length())))
            throw Error(ErrorKind::OutOfInterval, "parameter " + std::to_string(t) + " outside the interval", t);
    }
};

using FieldPtr = std::shared_ptr<const Field>;

class ExprField final : public Field {
public:
    ExprField(std::vector<Expr> components, Interval iv) : comps_(std::move(components)), iv_(iv)
    {
        if (comps_.empty()) throw Error(ErrorKind::DimensionMismatch, "field needs at least one component");
    }

    static FieldPtr parse(const std::vector<std::string>& sources, Interval iv)
    {
        std::vector<Expr> comps;
        comps.reserve(sources.size());
        for (const auto& s : sources) comps.push_back(devcauchy::parse(s));
        return std::make_shared<ExprField>(std::move(comps), iv);
    }

    int dim() const override { return static_cast<int>(comps_.size()); }
    Interval interval() const override { return iv_; }
    bool exact() const override { return true; }
    const std::vector<Expr>& components() const { return comps_; }

    VecJet jet(double t) const override
    {
        check_inside(t);
        VecJet out;
        for (auto& v : out.d) v = Vec::Zero(dim());
        for (int c = 0; c < dim(); ++c) {
            const ScalarJet j = comps_[static_cast<std::size_t>(c)].eval_scalar_jet(t);
            for (std::size_t k = 0; k < 4; ++k) out.d[k][c] = j.d[k];
        }
        return out;
    }

private:
    std::vector<Expr> comps_;
    Interval iv_;
};

/// Finite-difference derivatives of a plain callable. Central fourth-order stencils in the
/// interior; near the ends the first derivative uses a fourth-order one-sided stencil, the
/// second a third-order one and the third a second-order one.
class FunctionField final : public Field {
public:
    using Fn = std::function<Vec(double)>;

    FunctionField(int dim, Interval iv, Fn fn, double step = 0.0)
        : dim_(dim), iv_(iv), fn_(std::move(fn)), h_(step > 0.0 ? step : default_step(iv))
    {
    }

    static double default_step(Interval iv) { return std::max(1e-4, 1e-5 * iv.length()); }

    int dim() const override { return dim_; }
    Interval interval() const override { return iv_; }
    double step() const { return h_; }

    VecJet jet(double t) const override
    {
        check_inside(t);
        VecJet out;
        out.d[0] = fn_(t);
        out.d[1] = first(t, h_);
        out.d[2] = second(t, 10.0 * h_);
        out.d[3] = third(t, 100.0 * h_);
        return out;
    }

private:
    // Offset direction: +1 forward stencil, -1 backward stencil, 0 central.
    int side(double t, double h, int reach) const
    {
        if (t - reach * h < iv_.t0) return 1;
        if (t + reach * h > iv_.t1) return -1;
        return 0;
    }

    Vec f(double t) const { return fn_(t); }

    Vec first(double t, double h) const
    {
        const int s = side(t, h, 2);
        if (s == 0) return (-f(t + 2 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2 * h)) / (12.0 * h);
        const double sh = s * h;
        return (-25.0 * f(t) + 48.0 * f(t + sh) - 36.0 * f(t + 2 * sh) + 16.0 * f(t + 3 * sh) - 3.0 * f(t + 4 * sh)) /
               (12.0 * sh);
    }

    Vec second(double t, double h) const
    {
        h = std::min(h, 0.1 * iv_.length());
        const int s = side(t, h, 2);
        if (s == 0)
            return (-f(t + 2 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h) - f(t - 2 * h)) / (12.0 * h * h);
        const double sh = s * h;
        return (35.0 * f(t) - 104.0 * f(t + sh) + 114.0 * f(t + 2 * sh) - 56.0 * f(t + 3 * sh) + 11.0 * f(t + 4 * sh)) /
               (12.0 * h * h);
    }

    Vec third(double t, double h) const
    {
        h = std::min(h, 0.05 * iv_.length());
        const int s = side(t, h, 2);
        if (s == 0) return (f(t + 2 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2 * h)) / (2.0 * h * h * h);
        const double sh = s * h;
        return (-5.0 * f(t) + 18.0 * f(t + sh) - 24.0 * f(t + 2 * sh) + 14.0 * f(t + 3 * sh) - 3.0 * f(t + 4 * sh)) /
               (2.0 * sh * sh * sh);
    }

    int dim_;
    Interval iv_;
    Fn fn_;
    double h_;
};

/// Piecewise quintic Hermite interpolation of samples carrying value, first and second
/// derivative at each node.
class HermiteField final : public Field {
public:
    HermiteField(std::vector<double> nodes, std::vector<Vec> values, std::vector<Vec> d1, std::vector<Vec> d2)
        : t_(std::move(nodes)), v_(std::move(values)), d1_(std::move(d1)), d2_(std::move(d2))
    {
        if (t_.size() < 2 || v_.size() != t_.size() || d1_.size() != t_.size() || d2_.size() != t_.size())
            throw Error(ErrorKind::DimensionMismatch, "Hermite data needs matching node and sample counts");
    }

    int dim() const override { return static_cast<int>(v_.front().size()); }
    Interval interval() const override { return {t_.front(), t_.back()}; }

    const std::vector<double>& nodes() const { return t_; }
    const std::vector<Vec>& values() const { return v_; }

    VecJet jet(double t) const override
    {
        check_inside(t);
        t = std::clamp(t, t_.front(), t_.back());
        std::size_t i = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin());
        i = std::clamp<std::size_t>(i, 1, t_.size() - 1) - 1;
        const double h = t_[i + 1] - t_[i];
        const double s = (t - t_[i]) / h;

        // Basis polynomials in s, coefficients of s^0..s^5.
        static constexpr double basis[6][6] = {
            {1, 0, 0, -10, 15, -6},     // value at left
            {0, 1, 0, -6, 8, -3},       // h * d1 at left
            {0, 0, 0.5, -1.5, 1.5, -0.5}, // h^2 * d2 at left
            {0, 0, 0, 0.5, -1, 0.5},    // h^2 * d2 at right
            {0, 0, 0, -4, 7, -3},       // h * d1 at right
            {0, 0, 0, 10, -15, 6},      // value at right
        };
        const Vec* data[6] = {&v_[i], &d1_[i], &d2_[i], &d2_[i + 1], &d1_[i + 1], &v_[i + 1]};
        const double scale[6] = {1.0, h, h * h, h * h, h, 1.0};

        VecJet out;
        for (auto& x : out.d) x = Vec::Zero(dim());
        for (int b = 0; b < 6; ++b) {
            for (int k = 0; k < 4; ++k) {
                double acc = 0.0;
                for (int p = k; p < 6; ++p) {
                    double fall = 1.0;
                    for (int q = 0; q < k; ++q) fall *= p - q;
                    acc += basis[b][p] * fall * std::pow(s, p - k);
                }
                out.d[static_cast<std::size_t>(k)] += (acc * scale[b] / std::pow(h, k)) * *data[b];
            }
        }
        return out;
    }

private:
    std::vector<double> t_;
    std::vector<Vec> v_, d1_, d2_;
};

/// Field given directly by a jet-producing callable (exact derivatives supplied by the caller).
class JetField final : public Field {
public:
    using Fn = std::function<VecJet(double)>;

    JetField(int dim, Interval iv, Fn fn, bool is_exact = true) : dim_(dim), iv_(iv), fn_(std::move(fn)), exact_(is_exact) {}

    int dim() const override { return dim_; }
    Interval interval() const override { return iv_; }
    bool exact() const override { return exact_; }

    VecJet jet(double t) const override
    {
        check_inside(t);
        return fn_(t);
    }

private:
    int dim_;
    Interval iv_;
    Fn fn_;
    bool exact_;
};

/// Componentwise t-derivative of a field (the Euclidean covariant derivative along the curve).
inline Vec covariant_derivative(const Field& field, double t) { return field.jet(t).d[1]; }

} // namespace devcauchy
