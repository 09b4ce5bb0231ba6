#include <CLI11.hpp>
#include <iostream>

#include "toalab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"toalab: time-of-arrival computations in a uniform gravitational field"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config, out = "toalab-out";
    int threads = 0;
    double tolerance = 0.0;
    app.add_option("--config", config, "JSON run configuration");
    app.add_option("--out", out, "output directory")->capture_default_str();
    auto* th = app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 1024));
    auto* tol = app.add_option("--tolerance", tolerance, "relative quadrature tolerance")->check(CLI::PositiveNumber);

    std::string target;
    for (const auto& name : toalab::subcommands()) {
        auto* sub = app.add_subcommand(name);
        if (name == "reproduce") {
            std::string list;
            for (const auto& t : toalab::reproduce_targets()) list += (list.empty() ? "" : ", ") + t;
            sub->add_option("target", target, "one of: " + list)->required();
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << R"({"status":"error","kind":"config","exit_code":2,"message":"invalid command line"})" << '\n';
        return toalab::exit_config;
    }

    toalab::RunOptions opt;
    opt.subcommand = app.get_subcommands().front()->get_name();
    opt.target = target;
    if (!config.empty()) opt.config_path = config;
    opt.out_dir = out;
    if (*th) opt.threads = threads;
    if (*tol) opt.tolerance = tolerance;
    return toalab::run(opt, std::cout, std::cerr);
}
