#pragma once

// Parametrized patches. PatchEval is a bare point evaluator over a parameter box (what the
// verifier consumes). SeparablePatch carries coordinates of the form
//     x_i(p) = sum over terms of prod_a f_{term,a}(p_a)
// with each factor a univariate expression, so partial derivatives of any order up to three
// are exact.

#include "errors.hpp"
#include "expr.hpp"
#include "field.hpp"
#include "linalg.hpp"

#include <array>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace devcauchy {

struct PatchEval {
    int params = 0;
    int ambient = 0;
    std::function<Vec(const Vec&)> eval;
    Vec lo;
    Vec hi;

    Vec operator()(const Vec& p) const { return eval(p); }
    Vec extent() const { return hi - lo; }
    Vec center() const { return 0.5 * (lo + hi); }
};

/// Multi-index of derivative orders, one entry per parameter.
using DerivOrder = std::vector<int>;

class SepFunction {
public:
    using Term = std::vector<Expr>;

    SepFunction(int params, std::vector<Term> terms) : params_(params), terms_(std::move(terms))
    {
        for (const auto& term : terms_)
            if (static_cast<int>(term.size()) != params_)
                throw Error(ErrorKind::DimensionMismatch, "each term needs one factor per parameter");
    }

    /// Text form: terms separated by ';', factors by '|', factor a is an expression in t
    /// standing for parameter a.
    static SepFunction parse(const std::string& text, int params)
    {
        std::vector<Term> terms;
        std::size_t offset = 0;
        for (const std::string& term_text : split(text, ';')) {
            Term term;
            std::size_t local = 0;
            for (const std::string& factor : split(term_text, '|')) {
                try {
                    term.push_back(devcauchy::parse(factor));
                } catch (const SyntaxError& e) {
                    throw SyntaxError(offset + local + e.offset(), e.expected(), "malformed factor '" + factor + "'");
                }
                local += factor.size() + 1;
            }
            if (static_cast<int>(term.size()) != params)
                throw Error(ErrorKind::Scene, "term '" + term_text + "' needs " + std::to_string(params) + " factors");
            terms.push_back(std::move(term));
            offset += term_text.size() + 1;
        }
        return SepFunction(params, std::move(terms));
    }

    int params() const { return params_; }

    double derivative(const Vec& p, const DerivOrder& order) const
    {
        double total = 0.0;
        for (const auto& term : terms_) {
            double prod = 1.0;
            for (int a = 0; a < params_; ++a) {
                const Jet3 j = term[static_cast<std::size_t>(a)].eval_jet(p[a]);
                const int k = order[static_cast<std::size_t>(a)];
                prod *= k == 0 ? j.value : k == 1 ? j.d1 : k == 2 ? j.d2 : j.d3;
                if (prod == 0.0) break;
            }
            total += prod;
        }
        return total;
    }

    double value(const Vec& p) const { return derivative(p, DerivOrder(static_cast<std::size_t>(params_), 0)); }

private:
    static std::vector<std::string> split(const std::string& s, char sep)
    {
        std::vector<std::string> out;
        std::string cur;
        std::istringstream in(s);
        while (std::getline(in, cur, sep)) out.push_back(cur);
        if (!s.empty() && s.back() == sep) out.emplace_back();
        if (out.empty()) out.emplace_back();
        return out;
    }

    int params_;
    std::vector<Term> terms_;
};

/// All partial derivatives up to third order at a point, indexed by parameter.
struct PatchJet {
    Vec value;
    std::vector<Vec> d1;                           // d1[a]
    std::vector<std::vector<Vec>> d2;              // d2[a][b]
    std::vector<std::vector<std::vector<Vec>>> d3; // d3[a][b][c]
};

class SeparablePatch {
public:
    SeparablePatch(std::vector<SepFunction> coords, Vec lo, Vec hi)
        : coords_(std::move(coords)), lo_(std::move(lo)), hi_(std::move(hi))
    {
        if (coords_.empty()) throw Error(ErrorKind::DimensionMismatch, "patch needs coordinates");
        const int q = coords_.front().params();
        for (const auto& c : coords_)
            if (c.params() != q) throw Error(ErrorKind::DimensionMismatch, "coordinates disagree on the parameter count");
        if (lo_.size() != q || hi_.size() != q) throw Error(ErrorKind::DimensionMismatch, "box dimension differs from parameter count");
        for (int a = 0; a < q; ++a)
            if (!(lo_[a] < hi_[a])) throw Error(ErrorKind::DimensionMismatch, "box must satisfy lo < hi");
    }

    static SeparablePatch parse(const std::vector<std::string>& coords, Vec lo, Vec hi)
    {
        std::vector<SepFunction> fs;
        for (const auto& c : coords) fs.push_back(SepFunction::parse(c, static_cast<int>(lo.size())));
        return SeparablePatch(std::move(fs), std::move(lo), std::move(hi));
    }

    int params() const { return coords_.front().params(); }
    int ambient() const { return static_cast<int>(coords_.size()); }
    const Vec& lo() const { return lo_; }
    const Vec& hi() const { return hi_; }

    Vec derivative(const Vec& p, const DerivOrder& order) const
    {
        Vec out(ambient());
        for (int i = 0; i < ambient(); ++i) out[i] = coords_[static_cast<std::size_t>(i)].derivative(p, order);
        return out;
    }

    Vec value(const Vec& p) const { return derivative(p, DerivOrder(static_cast<std::size_t>(params()), 0)); }

    Vec partial(const Vec& p, int a) const { return derivative(p, unit(a)); }

    /// First partials as columns.
    Mat jacobian(const Vec& p) const
    {
        Mat j(ambient(), params());
        for (int a = 0; a < params(); ++a) j.col(a) = partial(p, a);
        return j;
    }

    PatchJet jet(const Vec& p, int order = 3) const
    {
        const auto q = static_cast<std::size_t>(params());
        PatchJet out;
        out.value = value(p);
        out.d1.resize(q);
        out.d2.assign(q, std::vector<Vec>(q));
        out.d3.assign(q, std::vector<std::vector<Vec>>(q, std::vector<Vec>(q)));
        for (std::size_t a = 0; a < q; ++a) {
            out.d1[a] = derivative(p, bump({a}));
            if (order < 2) continue;
            for (std::size_t b = a; b < q; ++b) {
                out.d2[a][b] = out.d2[b][a] = derivative(p, bump({a, b}));
                if (order < 3) continue;
                for (std::size_t c = b; c < q; ++c) {
                    const Vec v = derivative(p, bump({a, b, c}));
                    out.d3[a][b][c] = out.d3[a][c][b] = out.d3[b][a][c] = v;
                    out.d3[b][c][a] = out.d3[c][a][b] = out.d3[c][b][a] = v;
                }
            }
        }
        return out;
    }

    PatchEval eval() const
    {
        auto self = std::make_shared<SeparablePatch>(*this);
        return {params(), ambient(), [self](const Vec& p) { return self->value(p); }, lo_, hi_};
    }

private:
    DerivOrder unit(int a) const
    {
        DerivOrder o(static_cast<std::size_t>(params()), 0);
        o[static_cast<std::size_t>(a)] = 1;
        return o;
    }

    DerivOrder bump(std::initializer_list<std::size_t> idx) const
    {
        DerivOrder o(static_cast<std::size_t>(params()), 0);
        for (std::size_t a : idx) ++o[a];
        return o;
    }

    std::vector<SepFunction> coords_;
    Vec lo_, hi_;
};

/// Curve t -> patch(c(t)) for a parameter-space curve c given by expressions, with exact
/// derivatives through third order by the chain rule.
inline VecJet compose_jet(const SeparablePatch& patch, const std::vector<Expr>& c, double t)
{
    const auto q = static_cast<std::size_t>(patch.params());
    if (c.size() != q) throw Error(ErrorKind::DimensionMismatch, "parameter curve needs one expression per parameter");
    Vec p(static_cast<Eigen::Index>(q));
    std::vector<Jet3> cj(q);
    for (std::size_t a = 0; a < q; ++a) {
        cj[a] = c[a].eval_jet(t);
        p[static_cast<Eigen::Index>(a)] = cj[a].value;
    }
    const PatchJet s = patch.jet(p);
    VecJet out;
    for (auto& x : out.d) x = Vec::Zero(patch.ambient());
    out.d[0] = s.value;
    for (std::size_t a = 0; a < q; ++a) {
        out.d[1] += cj[a].d1 * s.d1[a];
        out.d[2] += cj[a].d2 * s.d1[a];
        out.d[3] += cj[a].d3 * s.d1[a];
        for (std::size_t b = 0; b < q; ++b) {
            out.d[2] += cj[a].d1 * cj[b].d1 * s.d2[a][b];
            out.d[3] += 3.0 * cj[a].d2 * cj[b].d1 * s.d2[a][b];
            for (std::size_t e = 0; e < q; ++e) out.d[3] += cj[a].d1 * cj[b].d1 * cj[e].d1 * s.d3[a][b][e];
        }
    }
    return out;
}

/// Partial derivative field t -> d_a patch(c(t)), exact through second order.
inline VecJet compose_partial_jet(const SeparablePatch& patch, const std::vector<Expr>& c, int a, double t)
{
    const auto q = static_cast<std::size_t>(patch.params());
    Vec p(static_cast<Eigen::Index>(q));
    std::vector<Jet3> cj(q);
    for (std::size_t b = 0; b < q; ++b) {
        cj[b] = c[b].eval_jet(t);
        p[static_cast<Eigen::Index>(b)] = cj[b].value;
    }
    const PatchJet s = patch.jet(p);
    const auto ua = static_cast<std::size_t>(a);
    VecJet out;
    for (auto& x : out.d) x = Vec::Zero(patch.ambient());
    out.order = 2;
    out.d[0] = s.d1[ua];
    for (std::size_t b = 0; b < q; ++b) {
        out.d[1] += cj[b].d1 * s.d2[ua][b];
        out.d[2] += cj[b].d2 * s.d2[ua][b];
        for (std::size_t e = 0; e < q; ++e) out.d[2] += cj[b].d1 * cj[e].d1 * s.d3[ua][b][e];
    }
    return out;
}

} // namespace devcauchy
