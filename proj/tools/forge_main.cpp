#include "forge/commands.hpp"
#include "forge/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
};

forge::PipelineConfig resolve_config(const GlobalOptions& options) {
    forge::PipelineConfig config;
    if (!options.config_path.empty()) {
        config = forge::load_pipeline_config(options.config_path);
    }
    // Flags win over the file, the file over defaults.
    if (options.seed) {
        config.seed = *options.seed;
        config.synthesis.seed = *options.seed;
    }
    if (options.workers) config.workers = *options.workers;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"forge - dataset construction and evaluation toolkit for text-based web agents"};
    app.require_subcommand(1);

    GlobalOptions options;
    app.add_option("--config", options.config_path, "pipeline config file (JSON)");
    std::uint64_t seed_value = 0;
    int workers_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "seed for all random choices");
    auto* workers_opt = app.add_option("--workers", workers_value, "worker pool size");

    forge::CommandIO io;
    std::string schema;
    std::vector<std::filesystem::path> stats_files;

    auto add_io = [&](CLI::App* cmd, bool needs_output) {
        cmd->add_option("input", io.input, "input JSONL file")->required();
        auto* output = cmd->add_option("--output,-o", io.output, "output file");
        if (needs_output) output->required();
        cmd->add_option("--stats", io.stats, "stats JSON path (default <output>.stats.json)");
    };

    CLI::App* clean = app.add_subcommand("clean", "clean raw trajectories");
    CLI::App* mine = app.add_subcommand("mine", "mine hard-negative discrimination instances");
    CLI::App* perturb = app.add_subcommand("perturb", "generate counterfactual rejections");
    CLI::App* synthesize =
        app.add_subcommand("synthesize", "dual-agent consensus task synthesis");
    CLI::App* pair = app.add_subcommand("pair", "build preference pairs and reward reports");
    CLI::App* score = app.add_subcommand("score", "score predictions against gold actions");
    CLI::App* report = app.add_subcommand("report", "dataset composition from stats files");
    CLI::App* validate = app.add_subcommand("validate", "check a JSONL file against a schema");

    for (CLI::App* cmd : {clean, mine, perturb, synthesize, pair}) add_io(cmd, true);
    pair->add_option("--rewards", io.aux, "reward report path (default <output stem>.rewards.jsonl)");
    score->add_option("input", io.input, "predictions JSONL")->required();
    score->add_option("--output,-o", io.output, "report JSON path");
    report->add_option("stats", stats_files, "stats JSON files")->required();
    validate->add_option("--schema", schema, "record schema")
        ->required()
        ->check(CLI::IsMember(forge::known_schemas()));
    validate->add_option("input", io.input, "JSONL file to check")->required();

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) options.seed = seed_value;
    if (*workers_opt) options.workers = workers_value;

    try {
        forge::PipelineConfig config = resolve_config(options);
        if (clean->parsed()) return forge::run_clean(config, io);
        if (mine->parsed()) return forge::run_mine(config, io);
        if (perturb->parsed()) return forge::run_perturb(config, io);
        if (synthesize->parsed()) return forge::run_synthesize(config, io);
        if (pair->parsed()) return forge::run_pair(config, io);
        if (score->parsed()) return forge::run_score(config, io, std::cout);
        if (report->parsed()) return forge::run_report(stats_files, std::cout);
        if (validate->parsed()) return forge::run_validate(schema, io.input, std::cout);
    } catch (const forge::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return forge::kExitUnreadable;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return forge::kExitError;
    }
    return forge::kExitError;
}
