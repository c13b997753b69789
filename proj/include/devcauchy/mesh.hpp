#pragma once

// Export of a sampled patch: Wavefront OBJ for surfaces in R^3, CSV point grids otherwise.
// Numbers are written with 9 significant digits; output is a pure function of the inputs.

#include "patch.hpp"

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace devcauchy {

struct MeshOptions {
    int t_samples = 65; // along each seed parameter
    int u_samples = 9;  // along each ruling parameter
};

/// Sample grid of a patch whose first `lead` parameters are seed parameters (t, or p1, p2)
/// and the rest ruling parameters u1..; rows are ordered with the first parameter slowest.
struct MeshGrid {
    int lead = 1;
    int params = 0;
    int ambient = 0;
    std::vector<int> sizes;
    std::vector<Vec> params_at;
    std::vector<Vec> points;
};

inline MeshGrid sample_mesh(const PatchEval& patch, int lead, MeshOptions opt = {})
{
    MeshGrid g;
    g.lead = lead;
    g.params = patch.params;
    g.ambient = patch.ambient;
    std::vector<std::vector<double>> axes;
    for (int a = 0; a < patch.params; ++a) {
        const int s = a < lead ? opt.t_samples : opt.u_samples;
        g.sizes.push_back(s);
        axes.push_back(uniform_grid({patch.lo[a], patch.hi[a]}, s));
    }
    std::vector<int> idx(static_cast<std::size_t>(patch.params), 0);
    while (true) {
        Vec p(patch.params);
        for (int a = 0; a < patch.params; ++a) p[a] = axes[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
        g.params_at.push_back(p);
        g.points.push_back(patch(p));
        int a = patch.params - 1;
        while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == g.sizes[static_cast<std::size_t>(a)]) idx[static_cast<std::size_t>(a--)] = 0;
        if (a < 0) break;
    }
    return g;
}

inline bool obj_format(const MeshGrid& g) { return g.params == 2 && g.ambient == 3; }

inline void write_obj(std::ostream& out, const MeshGrid& g)
{
    char buf[96];
    for (const auto& x : g.points) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", x[0], x[1], x[2]);
        out << buf;
    }
    const int nt = g.sizes[0], nu = g.sizes[1];
    for (int i = 0; i + 1 < nt; ++i)
        for (int j = 0; j + 1 < nu; ++j) {
            const int a = i * nu + j + 1;
            std::snprintf(buf, sizeof buf, "f %d %d %d %d\n", a, a + nu, a + nu + 1, a + 1);
            out << buf;
        }
}

inline void write_csv(std::ostream& out, const MeshGrid& g)
{
    std::string head;
    auto add = [&](const std::string& s) { head += (head.empty() ? "" : ",") + s; };
    if (g.lead == 1) add("t");
    else
        for (int a = 0; a < g.lead; ++a) add("p" + std::to_string(a + 1));
    for (int j = 0; j < g.params - g.lead; ++j) add("u" + std::to_string(j + 1));
    for (int i = 0; i < g.ambient; ++i) add("x" + std::to_string(i + 1));
    out << head << "\n";
    char buf[32];
    for (std::size_t r = 0; r < g.points.size(); ++r) {
        std::string line;
        auto put = [&](double v) {
            std::snprintf(buf, sizeof buf, "%.9g", v);
            line += (line.empty() ? "" : ",") + std::string(buf);
        };
        for (Eigen::Index a = 0; a < g.params_at[r].size(); ++a) put(g.params_at[r][a]);
        for (Eigen::Index i = 0; i < g.points[r].size(); ++i) put(g.points[r][i]);
        out << line << "\n";
    }
}

/// OBJ for a 2-parameter patch in R^3, CSV otherwise.
inline void write_mesh(std::ostream& out, const MeshGrid& g)
{
    if (obj_format(g)) write_obj(out, g);
    else write_csv(out, g);
}

} // namespace devcauchy
