// Command line driver: run, validate and list experiments described by JSON configs.

#include "caloric/experiments.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>

namespace {

constexpr int kInvalidConfig = 2;

int report_config_error(const std::string& path, const caloric::experiments::ConfigError& e) {
    std::cerr << path;
    if (e.line() > 0) std::cerr << ":" << e.line();
    std::cerr << ": " << e.what() << '\n';
    return kInvalidConfig;
}

}  // namespace

int main(int argc, char** argv) {
    namespace ex = caloric::experiments;
    CLI::App app{"caloric: subordinated heat semigroups, smoothing estimates and mild solutions"};
    app.require_subcommand(1);

    std::string run_path;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "run every experiment in a config and write CSV/SVG/JSON artifacts");
    run->add_option("config", run_path, "config JSON file")->required();
    run->add_option("-o,--output-dir", out_dir, "output directory (overrides CALORIC_OUTPUT_DIR and the config)");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("config", validate_path, "config JSON file")->required();

    auto* list = app.add_subcommand("list-experiments", "list the experiment kinds");

    CLI11_PARSE(app, argc, argv);

    if (*list) {
        for (const auto& k : ex::kinds()) std::cout << k.name << "\t" << k.description << '\n';
        return 0;
    }

    const std::string& path = *run ? run_path : validate_path;
    std::string text;
    try {
        text = ex::read_file(path);
    } catch (const caloric::Error& e) {
        std::cerr << e.what() << '\n';
        return kInvalidConfig;
    }

    if (*validate) {
        try {
            ex::validate(text);
        } catch (const ex::ConfigError& e) {
            return report_config_error(path, e);
        }
        std::cout << path << ": ok\n";
        return 0;
    }

    ex::RunOptions options;
    options.log = &std::cout;
    if (!out_dir.empty()) {
        options.output_dir = out_dir;
    } else if (const char* env = std::getenv("CALORIC_OUTPUT_DIR"); env && *env) {
        options.output_dir = env;
    }
    try {
        const auto report = ex::run(text, options);
        if (!report.results.empty()) std::cout << "artifacts in " << report.output_dir.string() << '\n';
        return report.exit_code();
    } catch (const ex::ConfigError& e) {
        return report_config_error(path, e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
