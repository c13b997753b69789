#pragma once

// Test-side oracles for the generator and seed modules.

#include "corpus.hpp"

#include <devcauchy/generate.hpp>
#include <devcauchy/nullity.hpp>

#include <random>

namespace testsupport {

/// exp(A) by scaling and squaring of a degree-20 Taylor polynomial.
inline Mat expm(const Mat& a)
{
    int squarings = 0;
    double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    while (norm > 0.25) {
        norm /= 2.0;
        ++squarings;
    }
    const Mat b = a / std::pow(2.0, squarings);
    Mat term = Mat::Identity(a.rows(), a.cols()), sum = term;
    for (int k = 1; k <= 20; ++k) {
        term = term * b / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

/// Frame F(t) = exp(tA) and gamma(t) = int_0^t F(s) e_0 ds for a constant skew generator, from
/// one exponential of the augmented matrix B = [[A, e_0], [0, 0]]: [F | gamma] = [I | 0] exp(tB).
inline std::pair<Mat, Vec> constant_generator_solution(const Mat& a, double t)
{
    const Eigen::Index d = a.rows();
    Mat big = Mat::Zero(d + 1, d + 1);
    big.topLeftCorner(d, d) = a;
    big(0, d) = 1.0;
    const Mat e = expm(t * big);
    const Mat frame = e.topLeftCorner(d, d);
    return {frame, e.topRightCorner(d, 1)};
}

/// Generator specs with smooth f and |g_k| >= 0.3 on [0, alpha].
inline std::vector<FrameODESpec> random_frame_specs(int count, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    using corpus_detail::num;
    const Expr t = Expr::var();
    std::vector<FrameODESpec> out;
    for (int i = 0; i < count; ++i) {
        FrameODESpec s;
        s.m = 2 + i % 3;
        s.n = 1 + (i / 3) % 2;
        s.alpha = 1.0 + 0.5 * (i % 4);
        for (int j = 0; j + 1 < s.m; ++j) s.f.push_back(num(u(rng)) + num(u(rng)) * Expr::call(Func::Sin, num(2.0 * u(rng)) * t));
        for (int k = 0; k < s.n; ++k) {
            const double sign = u(rng) < 0.0 ? -1.0 : 1.0;
            s.g.push_back(num(sign * (0.8 + 0.3 * std::abs(u(rng)))) + num(0.4 * u(rng)) * Expr::call(Func::Cos, num(1.5 * u(rng)) * t));
        }
        out.push_back(std::move(s));
    }
    return out;
}

/// The curve scene as a one-parameter seed over its interval.
inline SeedPatch seed_from_scene(const Scene& s, int samples = default_grid_samples)
{
    const Vec lo = Vec::Constant(1, s.iv.t0), hi = Vec::Constant(1, s.iv.t1);
    std::vector<std::string> curve;
    for (const auto& e : s.curve) curve.push_back(print(e));
    std::vector<SeparablePatch> fields;
    for (const auto& f : s.fields) {
        std::vector<std::string> comps;
        for (const auto& e : f) comps.push_back(print(e));
        fields.push_back(SeparablePatch::parse(comps, lo, hi));
    }
    return SeedPatch(SeparablePatch::parse(curve, lo, hi), std::move(fields), s.m, samples);
}

} // namespace testsupport
