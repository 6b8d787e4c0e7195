// Command line front end: run an evaluation from a config file, replay a
// finished one, or re-render its report.
#include <CLI11.hpp>
#include <iostream>

#include "arena/runner.hpp"

namespace {

int cmd_run(const std::string& config_path, std::uint64_t* seed_override, int* repeats_override,
            std::string out_override, int* parallelism_override, double* tolerance_override,
            bool resume) {
    arena::EvaluationConfig cfg = arena::load_config(config_path);
    if (seed_override) cfg.seed = *seed_override;
    if (repeats_override) cfg.repeats = *repeats_override;
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (parallelism_override) cfg.parallelism = *parallelism_override;
    if (tolerance_override) cfg.invalid_tolerance = *tolerance_override;

    auto art = arena::run_evaluation(cfg, resume);
    std::cout << art.report_text;
    std::cout << "artifacts: " << cfg.out_dir << "\n";
    if (!art.ok) {
        std::cerr << "invalid runs " << art.invalid_runs << "/" << art.plan.matches.size()
                  << " exceed tolerance " << cfg.invalid_tolerance << "\n";
        return 1;
    }
    return 0;
}

int cmd_replay(const std::string& dir) {
    auto mismatches = arena::replay_evaluation(dir);
    if (mismatches.empty()) {
        std::cout << "replay ok: scores and transcripts reproduce\n";
        return 0;
    }
    for (const auto& m : mismatches) std::cerr << "replay mismatch: " << m << "\n";
    return 1;
}

int cmd_report(const std::string& dir) {
    auto art = arena::rerender_report(dir);
    std::cout << art.report_text;
    return 0;
}

int cmd_validate(const std::string& config_path) {
    auto cfg = arena::load_config(config_path);
    auto plan = arena::plan_matches(cfg);
    std::cout << "config ok: task " << arena::to_string(cfg.task) << ", "
              << cfg.backends.size() << " backends, " << plan.matches.size()
              << " planned matches\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-agent interaction evaluation harness"};
    app.require_subcommand(1);

    std::string config_path, dir, out_dir;
    std::uint64_t seed = 0;
    int repeats = 0, parallelism = 0;
    double tolerance = 0;
    bool resume = false;

    auto* run = app.add_subcommand("run", "execute an evaluation from a config file");
    run->add_option("--config", config_path, "config file (json)")->required();
    auto* seed_opt = run->add_option("--seed", seed, "root seed override");
    auto* repeats_opt = run->add_option("--repeats", repeats, "repeats override");
    run->add_option("--out", out_dir, "output directory override");
    auto* par_opt = run->add_option("--parallelism", parallelism, "worker thread count");
    auto* tol_opt = run->add_option("--tolerance", tolerance, "invalid-run tolerance override");
    run->add_flag("--resume", resume, "skip matches with a completed transcript");

    auto* replay = app.add_subcommand("replay", "verify a finished evaluation reproduces");
    replay->add_option("--dir", dir, "evaluation output directory")->required();

    auto* report = app.add_subcommand("report", "re-render report files from transcripts");
    report->add_option("--dir", dir, "evaluation output directory")->required();

    auto* validate = app.add_subcommand("validate", "parse and check a config file");
    validate->add_option("--config", config_path, "config file (json)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run))
            return cmd_run(config_path, seed_opt->count() ? &seed : nullptr,
                           repeats_opt->count() ? &repeats : nullptr, out_dir,
                           par_opt->count() ? &parallelism : nullptr,
                           tol_opt->count() ? &tolerance : nullptr, resume);
        if (app.got_subcommand(replay)) return cmd_replay(dir);
        if (app.got_subcommand(report)) return cmd_report(dir);
        if (app.got_subcommand(validate)) return cmd_validate(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
