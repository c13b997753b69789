#include <devcauchy/app.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"devcauchy: developable submanifolds from curve and distribution data"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> described{
        {"check", "existence test: per-sample rank table and verdict"},
        {"solve", "construct the ruled solution from [curve] + [distribution]"},
        {"generate", "integrate the frame generator in [generate] and solve"},
        {"extend", "extend a curve with an initial plane to a solution containing it as a geodesic"},
        {"approx", "developable approximation of the [host] patch along its curve"},
        {"reduce", "solve and test the affine hull for codimension reduction"},
        {"nullity", "constant-nullity solution from a [seed] patch"},
    };

    std::string scene;
    devcauchy::AppOptions opt;
    std::string chosen;
    for (const auto& [name, help] : described) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("scene", scene, "scene file")->required();
        sub->add_option("--grid", opt.grid, "sample count along the curve (overrides the scene)");
        sub->add_option("--tol", opt.tol, "relative rank tolerance (overrides the scene)");
        sub->add_option("--mesh", opt.mesh, "write an OBJ mesh (surfaces in R^3) or CSV point grid");
        sub->add_flag("--verify", opt.verify, "run the independent developability checks");
        sub->add_option("--threads", opt.threads, "worker threads (default DEVCAUCHY_THREADS or 1)");
        sub->final_callback([&chosen, n = name] { chosen = n; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return devcauchy::run_command(chosen, scene, opt, std::cout, std::cerr);
}
