#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "fsw/discrete.hpp"
#include "fsw/jobs.hpp"

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = "./out";
    std::uint64_t seed = 0;
    int threads = 0;
};

void add_common(CLI::App* sub, Options& opt) {
    sub->add_option("--config", opt.config_path, "Path to a JSON job config")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "Output directory for report.json and CSV files");
    sub->add_option("--seed", opt.seed, "Seed for randomized checks");
    sub->add_option("--threads", opt.threads, "Eigen thread count (0 = library default)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral workbench for multiplication-plus-integral operators on the torus"};
    app.require_subcommand(1);

    Options opt;
    const char* commands[] = {"validate", "bands", "eigs", "certify", "split-test", "example"};
    const char* descriptions[] = {
        "Check symbol symmetry and report the deviations",
        "Compute the band structure of the multiplication symbol",
        "Discretize and track eigenvalues outside the bands across resolutions",
        "Estimate multiplicity and smoothness, then emit a finiteness certificate",
        "Split the kernel at a frequency cutoff and run perturbation diagnostics",
        "Run the closed-form accumulation model end to end"};
    for (int i = 0; i < 6; ++i) add_common(app.add_subcommand(commands[i], descriptions[i]), opt);

    CLI11_PARSE(app, argc, argv);

    std::string command = app.get_subcommands().front()->get_name();
    try {
        fsw::Json config = fsw::load_config_file(opt.config_path);
        return fsw::run_command(command, config, opt.out_dir, opt.seed, opt.threads);
    } catch (const fsw::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const fsw::ResourceCapError& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
