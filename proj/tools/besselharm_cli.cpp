#include "besselharm/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Options {
    std::string config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out = ".";
    std::vector<std::string> recipes;
    bool no_timing = false;
    bool quiet = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& group, const Options& o) {
    std::map<std::string, std::string> kv;
    if (!o.config.empty()) kv = bh::parse_config(read_file(o.config));

    std::vector<std::string> ids = o.recipes;
    if (ids.empty())
        for (const auto& info : bh::list_recipes())
            if (group == "suite" ? info.acceptance : info.subcommand == group) ids.push_back(info.id);

    std::vector<bh::ExperimentRecipe> recipes;
    for (const auto& id : ids) {
        bh::ExperimentRecipe r;
        try {
            r = bh::builtin_recipe(id);
        } catch (const std::exception&) {
            r.id = id;  // surfaces as a failed validation row
        }
        bh::apply_config(r, kv);
        if (o.seed_set) r.seed = o.seed;
        recipes.push_back(r);
    }

    std::vector<bh::ReportRow> rows;
    for (const auto& r : recipes) {
        auto part = bh::run_recipe(r);
        for (const auto& row : part) {
            if (!o.quiet)
                std::printf("%-4s %-24s residual=%-11.4g tol=%-8.3g %s%s\n", row.pass ? "ok" : "FAIL",
                            row.experiment_id.c_str(), row.residual, row.tolerance, row.param_json.c_str(),
                            row.reason.empty() ? "" : ("  [" + row.reason + "]").c_str());
            rows.push_back(row);
        }
        std::fflush(stdout);
    }

    std::filesystem::create_directories(o.out);
    const std::filesystem::path base = std::filesystem::path(o.out) / group;
    std::ofstream(base.string() + ".csv") << bh::report_csv(rows, !o.no_timing);
    std::ofstream(base.string() + ".json") << bh::report_metadata_json(recipes, rows) << "\n";

    int failed = 0;
    for (const auto& r : rows) failed += !r.pass;
    std::printf("%zu rows, %d failed; wrote %s.csv\n", rows.size(), failed, base.string().c_str());
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments for harmonic analysis in the Bessel setting"};
    app.require_subcommand(1);
    Options o;

    const std::vector<std::pair<std::string, std::string>> groups = {
        {"transform", "Hankel transform and convolution recipes"},
        {"semigroup", "Poisson semigroup, conjugate kernels and Riesz transforms"},
        {"gfunction", "fractional g-functions, wavelet transforms and gamma norms"},
        {"multiplier", "imaginary powers, Mellin representation and the transfer operator"},
        {"probe", "kernel probes and logged diagnostics"},
        {"suite", "all acceptance recipes"},
        {"list", "print the recipe catalogue"},
    };
    for (const auto& [name, help] : groups) {
        CLI::App* sub = app.add_subcommand(name, help);
        if (name == "list") continue;
        sub->add_option("--config", o.config, "Flat key = value config file")->check(CLI::ExistingFile);
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](const std::uint64_t& s) { o.seed = s, o.seed_set = true; }, "Seed for every recipe");
        sub->add_option("--out", o.out, "Output directory for <subcommand>.csv and .json");
        sub->add_option("--recipe", o.recipes, "Run only these recipe ids");
        sub->add_flag("--no-timing", o.no_timing, "Write 0 in the runtime column");
        sub->add_flag("-q,--quiet", o.quiet, "Only print the summary line");
    }

    CLI11_PARSE(app, argc, argv);

    for (CLI::App* sub : app.get_subcommands()) {
        const std::string name = sub->get_name();
        if (name == "list") {
            for (const auto& r : bh::list_recipes())
                std::printf("%-24s %-11s %s %s\n", r.id.c_str(), r.subcommand.c_str(),
                            r.acceptance ? ("criterion " + std::to_string(r.criterion)).c_str() : "logged     ",
                            r.summary.c_str());
            return 0;
        }
        try {
            return run(name, o);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 2;
        }
    }
    return 0;
}
