// irs-sim: command-line front end for the IRS uplink simulator.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irs/channel_io.hpp"
#include "irs/config.hpp"
#include "irs/experiments.hpp"
#include "irs/kernels.hpp"

namespace {

using namespace irs;

void select_kernels(const std::string& name)
{
    if (name.empty())
        return;
    if (name == "scalar")
        kernels::set_isa(kernels::Isa::scalar);
    else if (name == "avx2")
        kernels::set_isa(kernels::Isa::avx2);
    else
        throw std::invalid_argument("unknown kernel variant '" + name + "' (expected scalar or avx2)");
}

int cmd_optimize(const std::string& config_path, const std::optional<std::string>& channels_path,
                 const std::vector<std::string>& overrides)
{
    const Config cfg = load_config(config_path, overrides);
    const ChannelSet channels = channels_path ? load_channels(*channels_path) : draw_channels(cfg.scenario, cfg.seed);
    channels.validate();

    const auto& opt = cfg.optimizer;
    const LinkBudget budget = LinkBudget::of(cfg.scenario);
    RefinementReport report;
    double achieved = 0.0;
    if (opt.scheme.kind == Scheme::Kind::full_csi && opt.random_init) {
        const PhaseConfig init = random_phases(channels.irs_elements(), opt.refinement.levels, opt.init_seed);
        report = successive_refinement(channels, budget, opt.refinement, init);
        achieved = rate(channels, report.final_phases, budget);
    } else {
        if (opt.scheme.kind == Scheme::Kind::grouped &&
            channels.irs_elements() != static_cast<std::size_t>(cfg.scenario.irs.size()))
            throw DimensionError("grouped scheme needs the channel file's N to match irs_rows*irs_cols");
        const SchemeOutcome out = evaluate_scheme(cfg.scenario, channels, opt.scheme, opt.refinement);
        report = out.report;
        achieved = out.rate;
    }

    std::printf("scheme %s\n", opt.scheme.name().c_str());
    std::printf("M %zu N %zu levels %d\n", channels.bs_antennas(), channels.irs_elements(), opt.refinement.levels);
    std::printf("rate_bps_hz %.17g\n", achieved);
    std::printf("iterations %d\n", report.iterations);
    std::printf("converged %s\n", report.converged ? "true" : "false");
    std::printf("phases");
    for (int idx : report.final_phases.indices)
        std::printf(" %d", idx);
    std::printf("\n");
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path, const std::optional<std::string>& dump_path,
              std::optional<unsigned> threads, const std::vector<std::string>& overrides)
{
    const Config cfg = load_config(config_path, overrides);
    if (!cfg.sweep)
        throw std::invalid_argument("config has no [sweep] section");
    SweepSpec spec = *cfg.sweep;
    if (threads)
        spec.threads = *threads;
    const ExperimentResult result = run_sweep(spec, cfg.optimizer.refinement);
    write_file_atomically(out_path, format_result_table(result));
    if (dump_path)
        write_file_atomically(*dump_path, format_result_json(result, spec));
    std::fprintf(stderr, "wrote %zu rows to %s\n", result.rows.size(), out_path.c_str());
    return 0;
}

int cmd_convergence(const std::string& config_path, std::uint64_t seed, const std::vector<std::string>& overrides)
{
    const Config cfg = load_config(config_path, overrides);
    const auto trace = convergence_trace(cfg.scenario, cfg.optimizer.refinement, seed);
    std::printf("iteration,rate_bps_hz\n");
    for (std::size_t k = 0; k < trace.size(); ++k)
        std::printf("%zu,%.17g\n", k, trace[k]);
    return 0;
}

int cmd_import(const std::string& in_path, const std::optional<std::string>& out_path)
{
    const ChannelSet channels = load_channels(in_path);
    channels.validate();
    double hr = 0.0, hv = 0.0, hd = 0.0;
    for (const auto& z : channels.h_r.data())
        hr += std::norm(z);
    for (const auto& z : channels.h_v)
        hv += std::norm(z);
    for (const auto& z : channels.h_d)
        hd += std::norm(z);
    std::printf("M %zu N %zu\n", channels.bs_antennas(), channels.irs_elements());
    std::printf("frobenius2 H_r %.17g h_v %.17g h_d %.17g\n", hr, hv, hd);
    std::printf("digest %016llx\n", static_cast<unsigned long long>(digest(channels)));
    if (out_path)
        save_channels(*out_path, channels);
    return 0;
}

int cmd_export(const std::string& config_path, std::uint64_t seed, const std::string& out_path,
               const std::vector<std::string>& overrides)
{
    const Config cfg = load_config(config_path, overrides);
    save_channels(out_path, draw_channels(cfg.scenario, seed));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"IRS-aided uplink simulator: channel synthesis, discrete phase optimization, Monte Carlo sweeps"};
    app.require_subcommand(1);

    std::string kernel_variant;
    app.add_option("--kernels", kernel_variant, "Force the kernel variant (scalar, avx2)");

    std::string config_path, channels_path, out_path, dump_path, in_path;
    std::vector<std::string> overrides;
    std::uint64_t seed = 1;
    unsigned threads = 0;

    auto* optimize = app.add_subcommand("optimize", "Optimize IRS phases for one channel realization");
    optimize->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    optimize->add_option("--channels", channels_path, "Channel matrix file (bypasses synthesis)")
        ->check(CLI::ExistingFile);
    optimize->add_option("--set", overrides, "Override, section.key=value")->take_all();

    auto* sweep = app.add_subcommand("sweep", "Run a Monte Carlo sweep and write the result table");
    sweep->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out_path, "Result table (CSV)")->required();
    sweep->add_option("--dump", dump_path, "Full JSON dump including per-trial samples and traces");
    auto* threads_opt = sweep->add_option("--threads", threads, "Worker threads (0: all cores)");
    sweep->add_option("--set", overrides, "Override, section.key=value")->take_all();

    auto* convergence = app.add_subcommand("convergence", "Print the successive-refinement rate trace");
    convergence->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    convergence->add_option("--seed", seed, "Channel draw seed")->required();
    convergence->add_option("--set", overrides, "Override, section.key=value")->take_all();

    auto* import = app.add_subcommand("import-channels", "Validate a channel matrix file and print a summary");
    import->add_option("--in", in_path, "Channel matrix file")->required()->check(CLI::ExistingFile);
    import->add_option("--out", out_path, "Re-export in canonical form");

    auto* exporter = app.add_subcommand("export-channels", "Draw one channel realization and write it to a file");
    exporter->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    exporter->add_option("--seed", seed, "Channel draw seed")->required();
    exporter->add_option("--out", out_path, "Channel matrix file")->required();
    exporter->add_option("--set", overrides, "Override, section.key=value")->take_all();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        select_kernels(kernel_variant);
        if (*optimize)
            return cmd_optimize(config_path, channels_path.empty() ? std::nullopt : std::optional{channels_path},
                                overrides);
        if (*sweep)
            return cmd_sweep(config_path, out_path, dump_path.empty() ? std::nullopt : std::optional{dump_path},
                             *threads_opt ? std::optional{threads} : std::nullopt, overrides);
        if (*convergence)
            return cmd_convergence(config_path, seed, overrides);
        if (*import)
            return cmd_import(in_path, out_path.empty() ? std::nullopt : std::optional{out_path});
        if (*exporter)
            return cmd_export(config_path, seed, out_path, overrides);
    } catch (const std::exception& e) {
        std::cerr << "irs-sim: error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
