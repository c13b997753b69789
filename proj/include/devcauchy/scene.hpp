#pragma once

// Scene files: INI-style sections, one "key = value" per line, whole-line comments with '#' or
// ';'. Vectors are comma-separated; separable patch coordinates use "f|g;h|k" per entry.

#include "analysis.hpp"
#include "cauchy.hpp"
#include "generate.hpp"
#include "nullity.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace devcauchy {

enum class Driver { Curve, Generate, Host, Seed };

inline std::string_view to_string(Driver d)
{
    switch (d) {
    case Driver::Curve: return "curve";
    case Driver::Generate: return "generate";
    case Driver::Host: return "host";
    case Driver::Seed: return "seed";
    }
    return "?";
}

struct SceneOptions {
    std::optional<int> grid;
    std::optional<double> tol;
    std::optional<double> epsilon;
};

namespace scene_detail {

inline std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) out.push_back(trim(cur));
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
}

// Parses an expression (or a separable entry when params > 0) so malformed input is reported
// with its key; the byte offset stays in the message.
inline void check_expr(const std::string& where, const std::string& text, int params = 0)
{
    try {
        if (params > 0) SepFunction::parse(text, params);
        else parse(text);
    } catch (const SyntaxError& e) {
        throw Error(ErrorKind::Syntax, where + ": " + e.message());
    }
}

inline double number(const std::string& where, const std::string& text)
{
    // numbers may be written as constant expressions such as pi/3
    check_expr(where, text);
    const Expr e = parse(text);
    if (e.depends_on_t()) throw Error(ErrorKind::Scene, where + " must be a constant, got '" + text + "'");
    return e.eval(0.0);
}

inline int integer(const std::string& where, const std::string& text)
{
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw Error(ErrorKind::Scene, where + " must be an integer, got '" + text + "'");
    return v;
}

// Section reader that records which keys were consumed so leftovers can be rejected.
class Section {
public:
    Section(std::string name, const boost::property_tree::ptree* tree) : name_(std::move(name)), tree_(tree) {}

    bool present() const { return tree_ != nullptr; }
    const std::string& name() const { return name_; }

    std::optional<std::string> get(const std::string& key)
    {
        if (!tree_) return std::nullopt;
        const auto it = tree_->find(key);
        if (it == tree_->not_found()) return std::nullopt;
        used_.insert(key);
        return trim(it->second.data());
    }

    std::string require(const std::string& key)
    {
        auto v = get(key);
        if (!v) throw Error(ErrorKind::Scene, "[" + name_ + "] is missing '" + key + "'");
        if (v->empty()) throw Error(ErrorKind::Scene, "[" + name_ + "] '" + key + "' is empty");
        return *v;
    }

    /// Indexed keys prefix1, prefix2, ... in order; returns (first index, values). Gaps are an error.
    std::pair<int, std::vector<std::string>> series(const std::string& prefix)
    {
        std::map<int, std::string> found;
        if (tree_)
            for (const auto& [k, v] : *tree_) {
                if (k.rfind(prefix, 0) != 0 || k.size() == prefix.size()) continue;
                const std::string idx = k.substr(prefix.size());
                if (idx.find_first_not_of("0123456789") != std::string::npos) continue;
                found[integer("[" + name_ + "] " + k, idx)] = trim(v.data());
                used_.insert(k);
            }
        std::vector<std::string> out;
        int first = found.empty() ? 1 : found.begin()->first;
        int expect = first;
        for (const auto& [i, v] : found) {
            if (i != expect) throw Error(ErrorKind::Scene, "[" + name_ + "] " + prefix + std::to_string(expect) + " is missing");
            out.push_back(v);
            ++expect;
        }
        return {first, out};
    }

    void finish() const
    {
        if (!tree_) return;
        for (const auto& [k, v] : *tree_)
            if (!used_.count(k)) throw Error(ErrorKind::Scene, "[" + name_ + "] unknown key '" + k + "'");
    }

private:
    std::string name_;
    const boost::property_tree::ptree* tree_;
    std::set<std::string> used_;
};

inline Interval interval(Section& s)
{
    const auto parts = split_list(s.require("interval"));
    if (parts.size() != 2) throw Error(ErrorKind::Scene, "[" + s.name() + "] interval needs two values");
    const Interval iv{number("interval", parts[0]), number("interval", parts[1])};
    if (!(iv.t0 < iv.t1)) throw Error(ErrorKind::Scene, "[" + s.name() + "] interval must satisfy t0 < t1");
    return iv;
}

inline Vec vector_of(const std::string& where, const std::string& text, int size)
{
    const auto parts = split_list(text);
    if (static_cast<int>(parts.size()) != size)
        throw Error(ErrorKind::Scene, where + " needs " + std::to_string(size) + " values, got " + std::to_string(parts.size()));
    Vec v(size);
    for (int i = 0; i < size; ++i) v[i] = number(where, parts[static_cast<std::size_t>(i)]);
    return v;
}

} // namespace scene_detail

/// A parsed scene. Exactly one driver is set; the accessors for the other drivers throw.
class Scene {
public:
    Driver driver = Driver::Curve;
    int m = 0;
    int n = 0;
    SceneOptions options;

    // curve driver
    std::vector<std::string> curve;
    Interval interval{0.0, 1.0};
    std::vector<std::vector<std::string>> fields;
    Tangency tangency = Tangency::Check;

    // generate driver
    std::vector<std::string> f, g;
    double alpha = 1.0;

    // host driver
    std::vector<std::string> host;
    Vec lo, hi;
    std::vector<std::string> curve_in_params;

    // seed driver
    std::vector<std::string> seed;
    std::vector<std::vector<std::string>> seed_fields;

    int grid(int fallback = default_grid_samples) const { return options.grid.value_or(fallback); }
    int ambient() const { return m + n; }

    CurveEval curve_eval() const
    {
        expect(Driver::Curve);
        return CurveEval(ExprField::parse(curve, interval), grid());
    }

    DistributionSpec distribution() const
    {
        expect(Driver::Curve);
        DistributionSpec d;
        d.rank = m;
        d.tangency = tangency;
        for (const auto& x : fields) d.fields.push_back(ExprField::parse(x, interval));
        return d;
    }

    /// Spanning vectors of D at the start of the interval, velocity first when implied.
    Mat initial_plane() const
    {
        const CurveEval c = curve_eval();
        const DistributionSpec d = distribution();
        std::vector<Vec> cols;
        if (static_cast<int>(d.fields.size()) == m - 1) cols.push_back(c.velocity(interval.t0));
        for (const auto& x : d.fields) cols.push_back(x->jet(interval.t0).d[0]);
        return columns(cols);
    }

    FrameODESpec frame_spec() const
    {
        expect(Driver::Generate);
        FrameODESpec s;
        s.m = m;
        s.n = n;
        for (const auto& x : f) s.f.push_back(parse(x));
        for (const auto& x : g) s.g.push_back(parse(x));
        s.alpha = alpha;
        return s;
    }

    HostScene host_scene() const
    {
        expect(Driver::Host);
        std::vector<Expr> c;
        for (const auto& x : curve_in_params) c.push_back(parse(x));
        return HostScene(SeparablePatch::parse(host, lo, hi), std::move(c), interval, grid());
    }

    SeedPatch seed_patch() const
    {
        expect(Driver::Seed);
        std::vector<SeparablePatch> fs;
        for (const auto& x : seed_fields) fs.push_back(SeparablePatch::parse(x, lo, hi));
        return SeedPatch(SeparablePatch::parse(seed, lo, hi), std::move(fs), m, options.grid.value_or(0));
    }

    SolveOptions solve_options(int threads = 1) const
    {
        SolveOptions o;
        o.grid = grid();
        if (options.tol) o.existence.rank.relative = *options.tol;
        o.existence.threads = threads;
        o.epsilon = options.epsilon;
        return o;
    }

private:
    void expect(Driver d) const
    {
        if (driver != d)
            throw Error(ErrorKind::Scene, "scene is driven by [" + std::string(to_string(driver)) + "], not [" + std::string(to_string(d)) + "]");
    }
};

/// Strict parse: unknown sections or keys, duplicates, missing keys, size mismatches and more
/// than one driver are errors (ErrorKind::Scene); malformed expressions raise SyntaxError.
inline Scene parse_scene(const std::string& text)
{
    using namespace scene_detail;
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorKind::Scene, e.message() + " at line " + std::to_string(e.line()));
    }
    static const std::set<std::string> known{"ambient", "curve", "distribution", "generate", "host", "seed", "options"};
    for (const auto& [k, v] : tree) {
        if (v.empty() && !v.data().empty()) throw Error(ErrorKind::Scene, "key '" + k + "' outside any section");
        if (!known.count(k)) throw Error(ErrorKind::Scene, "unknown section [" + k + "]");
    }
    auto section = [&](const std::string& name) {
        const auto it = tree.find(name);
        return Section(name, it == tree.not_found() ? nullptr : &it->second);
    };

    Scene s;
    Section amb = section("ambient");
    if (!amb.present()) throw Error(ErrorKind::Scene, "missing [ambient]");
    s.m = integer("[ambient] m", amb.require("m"));
    s.n = integer("[ambient] n", amb.require("n"));
    amb.finish();
    if (s.m < 2 || s.n < 1) throw Error(ErrorKind::Scene, "[ambient] needs m >= 2 and n >= 1");
    const int d = s.m + s.n;

    Section cur = section("curve"), dist = section("distribution"), gen = section("generate"), host = section("host"),
            seed = section("seed"), opt = section("options");
    const int drivers = (cur.present() || dist.present() ? 1 : 0) + (gen.present() ? 1 : 0) + (host.present() ? 1 : 0) + (seed.present() ? 1 : 0);
    if (drivers != 1) throw Error(ErrorKind::Scene, "exactly one of [curve]+[distribution], [generate], [host], [seed] must drive the scene");

    auto coords = [&](Section& sec, const char* what) {
        auto [first, xs] = sec.series("x");
        if (first != 1 || static_cast<int>(xs.size()) != d)
            throw Error(ErrorKind::Scene, "[" + sec.name() + "] needs " + what + " x1..x" + std::to_string(d));
        return xs;
    };

    if (cur.present() || dist.present()) {
        s.driver = Driver::Curve;
        if (!cur.present() || !dist.present()) throw Error(ErrorKind::Scene, "[curve] and [distribution] go together");
        s.curve = coords(cur, "coordinates");
        s.interval = interval(cur);
        cur.finish();
        auto [first, fs] = dist.series("field");
        const int count = static_cast<int>(fs.size());
        if (!((first == 1 && count == s.m) || (first == 2 && count == s.m - 1)))
            throw Error(ErrorKind::Scene, "[distribution] needs field1..field" + std::to_string(s.m) + ", or field2..field" + std::to_string(s.m) +
                                              " with the velocity as the first field");
        for (std::size_t j = 0; j < fs.size(); ++j) {
            auto comps = split_list(fs[j]);
            if (static_cast<int>(comps.size()) != d)
                throw Error(ErrorKind::Scene, "[distribution] field" + std::to_string(first + static_cast<int>(j)) + " needs " + std::to_string(d) + " components");
            s.fields.push_back(std::move(comps));
        }
        if (auto t = dist.get("tangency")) {
            if (*t == "check") s.tangency = Tangency::Check;
            else if (*t == "assert") s.tangency = Tangency::Assert;
            else throw Error(ErrorKind::Scene, "[distribution] tangency must be 'check' or 'assert'");
        }
        dist.finish();
    } else if (gen.present()) {
        s.driver = Driver::Generate;
        auto [ff, fs] = gen.series("f");
        auto [gf, gs] = gen.series("g");
        if (ff != 1 || static_cast<int>(fs.size()) != s.m - 1) throw Error(ErrorKind::Scene, "[generate] needs f1..f" + std::to_string(s.m - 1));
        if (gf != 1 || static_cast<int>(gs.size()) != s.n) throw Error(ErrorKind::Scene, "[generate] needs g1..g" + std::to_string(s.n));
        s.f = fs;
        s.g = gs;
        if (auto a = gen.get("alpha")) s.alpha = number("[generate] alpha", *a);
        if (!(s.alpha > 0.0)) throw Error(ErrorKind::Scene, "[generate] alpha must be positive");
        gen.finish();
    } else if (host.present()) {
        s.driver = Driver::Host;
        s.host = coords(host, "patch coordinates");
        s.lo = vector_of("[host] lo", host.require("lo"), s.m);
        s.hi = vector_of("[host] hi", host.require("hi"), s.m);
        auto [cf, cs] = host.series("c");
        if (cf != 1 || static_cast<int>(cs.size()) != s.m) throw Error(ErrorKind::Scene, "[host] needs the curve in parameters c1..c" + std::to_string(s.m));
        s.curve_in_params = cs;
        s.interval = interval(host);
        host.finish();
    } else {
        s.driver = Driver::Seed;
        s.seed = coords(seed, "seed coordinates");
        const auto lo = split_list(seed.require("lo"));
        const int k = static_cast<int>(lo.size());
        if (k < 1 || k > 2 || k >= s.m) throw Error(ErrorKind::Scene, "[seed] box must have 1 or 2 parameters, fewer than m");
        s.lo = vector_of("[seed] lo", seed.require("lo"), k);
        s.hi = vector_of("[seed] hi", seed.require("hi"), k);
        auto [first, fs] = seed.series("field");
        const int count = static_cast<int>(fs.size());
        if (!((first == 1 && count == s.m) || (first == k + 1 && count == s.m - k)))
            throw Error(ErrorKind::Scene, "[seed] needs field1..field" + std::to_string(s.m) + ", or field" + std::to_string(k + 1) + "..field" +
                                              std::to_string(s.m) + " with the seed tangents first");
        for (std::size_t j = 0; j < fs.size(); ++j) {
            auto comps = split_list(fs[j]);
            if (static_cast<int>(comps.size()) != d)
                throw Error(ErrorKind::Scene, "[seed] field" + std::to_string(first + static_cast<int>(j)) + " needs " + std::to_string(d) + " components");
            s.seed_fields.push_back(std::move(comps));
        }
        seed.finish();
    }

    if (auto v = opt.get("grid")) {
        s.options.grid = integer("[options] grid", *v);
        if (*s.options.grid < 3) throw Error(ErrorKind::Scene, "[options] grid must be at least 3");
    }
    if (auto v = opt.get("tol")) {
        s.options.tol = number("[options] tol", *v);
        if (!(*s.options.tol > 0.0)) throw Error(ErrorKind::Scene, "[options] tol must be positive");
    }
    if (auto v = opt.get("epsilon")) {
        s.options.epsilon = number("[options] epsilon", *v);
        if (!(*s.options.epsilon > 0.0)) throw Error(ErrorKind::Scene, "[options] epsilon must be positive");
    }
    opt.finish();

    const int k = s.driver == Driver::Seed || s.driver == Driver::Host ? static_cast<int>(s.lo.size()) : 0;
    auto each = [&](const char* sec, const std::string& key, const std::vector<std::string>& xs, int params) {
        for (std::size_t i = 0; i < xs.size(); ++i)
            check_expr("[" + std::string(sec) + "] " + key + (xs.size() > 1 ? "[" + std::to_string(i + 1) + "]" : ""), xs[i], params);
    };
    for (std::size_t i = 0; i < s.curve.size(); ++i) each("curve", "x" + std::to_string(i + 1), {s.curve[i]}, 0);
    for (std::size_t j = 0; j < s.fields.size(); ++j) each("distribution", "field#" + std::to_string(j + 1), s.fields[j], 0);
    for (std::size_t i = 0; i < s.f.size(); ++i) each("generate", "f" + std::to_string(i + 1), {s.f[i]}, 0);
    for (std::size_t i = 0; i < s.g.size(); ++i) each("generate", "g" + std::to_string(i + 1), {s.g[i]}, 0);
    for (std::size_t i = 0; i < s.host.size(); ++i) each("host", "x" + std::to_string(i + 1), {s.host[i]}, k);
    for (std::size_t i = 0; i < s.curve_in_params.size(); ++i) each("host", "c" + std::to_string(i + 1), {s.curve_in_params[i]}, 0);
    for (std::size_t i = 0; i < s.seed.size(); ++i) each("seed", "x" + std::to_string(i + 1), {s.seed[i]}, k);
    for (std::size_t j = 0; j < s.seed_fields.size(); ++j) each("seed", "field#" + std::to_string(j + 1), s.seed_fields[j], k);
    return s;
}

inline Scene load_scene(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Scene, "cannot open scene file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scene(buf.str());
}

} // namespace devcauchy
