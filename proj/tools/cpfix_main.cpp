#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cpfix/commands.hpp"
#include "cpfix/error.hpp"

namespace {

struct Output {
    bool json = false;
    std::string report_path;
};

int emit(const cpfix::CommandOutput& out, const Output& opt) {
    if (opt.json) std::cout << out.report.dump(2) << '\n';
    else std::cout << cpfix::render_table(out.report);
    if (!opt.report_path.empty()) {
        std::ofstream f(opt.report_path);
        if (!f) {
            std::cerr << "cannot write " << opt.report_path << '\n';
            return 2;
        }
        f << out.report.dump(2) << '\n';
    }
    return out.exit_code;
}

template <class Run>
int run_file(const std::string& command, const std::string& path, const Output& opt, Run&& run) {
    cpfix::ProblemFile problem;
    try {
        problem = cpfix::load_problem(path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return emit(cpfix::error_output(command, e), opt);
    }
    return emit(run(problem), opt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fixed points of commuting CP semigroups and their endomorphic dilations"};
    app.require_subcommand(1);
    Output opt;
    auto output_flags = [&](CLI::App* sub) {
        sub->add_flag("--json", opt.json, "print the JSON report instead of the table");
        sub->add_option("--report", opt.report_path, "also write the JSON report to this file");
    };

    std::string file;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples, levels;

    auto* validate = app.add_subcommand("validate", "parse a problem file and check its maps");
    validate->add_option("file", file)->required()->check(CLI::ExistingFile);
    output_flags(validate);

    auto* analyze = app.add_subcommand("analyze", "fixed points, ergodic projection and property suite");
    analyze->add_option("file", file)->required()->check(CLI::ExistingFile);
    analyze->add_option("--seed", seed);
    analyze->add_option("--samples", samples);
    output_flags(analyze);

    auto* dilation = app.add_subcommand("dilation", "co-invariance, minimality and complete isometry");
    dilation->add_option("file", file)->required()->check(CLI::ExistingFile);
    dilation->add_option("--levels", levels);
    dilation->add_option("--seed", seed);
    dilation->add_option("--samples", samples);
    output_flags(dilation);

    std::string family, out_path;
    cpfix::DemoParams params;
    std::optional<double> theta;
    auto* demo = app.add_subcommand("demo", "write an example problem file");
    demo->add_option("family", family)->required()->description("tail-shift | rotation | damping | random-mixture | random-dilation");
    demo->add_option("-o,--output", out_path)->required();
    demo->add_option("--n", params.n, "block size (tail-shift)");
    demo->add_option("--m", params.m, "tail length (tail-shift)");
    demo->add_option("--d", params.d, "number of generators (random families)");
    demo->add_option("--terms", params.terms, "conjugations per mixture");
    demo->add_option("--blocks", params.blocks, "block sizes, e.g. --blocks 2 3")->expected(1, -1);
    demo->add_option("--theta", theta, "rotation angle");
    demo->add_option("--gamma", params.gamma, "damping rate");
    demo->add_option("--seed", params.seed);

    CLI11_PARSE(app, argc, argv);

    auto overrides = [&](cpfix::ProblemFile& p) {
        if (seed) p.config.seed = *seed;
        if (samples) p.config.samples = *samples;
        if (levels) p.config.levels = *levels;
    };

    try {
        if (*validate)
            return run_file("validate", file, opt, [&](cpfix::ProblemFile& p) { return cpfix::cmd_validate(p); });
        if (*analyze)
            return run_file("analyze", file, opt, [&](cpfix::ProblemFile& p) {
                overrides(p);
                return cpfix::cmd_analyze(p);
            });
        if (*dilation)
            return run_file("dilation", file, opt, [&](cpfix::ProblemFile& p) {
                overrides(p);
                return cpfix::cmd_dilation(p);
            });
        if (*demo) {
            params.theta = theta;
            cpfix::save_problem(cpfix::cmd_demo(family, params), out_path);
            std::cout << "wrote " << out_path << '\n';
            return 0;
        }
    } catch (const cpfix::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
