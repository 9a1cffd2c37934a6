#include "augforge/harness/cli.hpp"

#include "augforge/augment/chain.hpp"
#include "augforge/error.hpp"
#include "augforge/harness/dataset.hpp"
#include "augforge/harness/objective.hpp"
#include "augforge/harness/report.hpp"
#include "augforge/imaging/png_io.hpp"
#include "augforge/importance/analyze.hpp"
#include "augforge/search/runner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace augforge::harness {

namespace {

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed) {
    if (flag_seed) return *flag_seed;
    if (const char* env = std::getenv("AUGFORGE_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError("AUGFORGE_SEED is not a valid integer: " +
                              std::string(env));
        }
    }
    return 0;
}

void emit_json(const nlohmann::ordered_json& doc, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << doc.dump(2) << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw IoError("cannot write output file: " + out_path);
    out << doc.dump(2) << '\n';
}

struct SearchArgs {
    std::string space_path;
    std::string objective_cmd;
    bool use_surrogate = false;
    int trials = 400;
    int startup = 64;
    std::string db_path;
    std::optional<std::uint64_t> seed;
    int parallel = 1;
    double timeout = 600.0;
};

int run_search(const SearchArgs& args) {
    search::SearchSpace space = args.space_path.empty()
                                    ? search::SearchSpace::all_kinds()
                                    : search::SearchSpace::load(args.space_path);
    if (args.use_surrogate == !args.objective_cmd.empty()) {
        throw ConfigError(
            "exactly one of --surrogate and --objective-cmd is required");
    }

    search::SearchSettings settings;
    settings.n_trials = args.trials;
    settings.n_startup_trials = args.startup;
    settings.study_seed = resolve_seed(args.seed);
    settings.parallelism = args.parallel;
    settings.validate();

    const ObjectiveRunner runner =
        args.use_surrogate
            ? ObjectiveRunner::surrogate(settings.study_seed, 0.0)
            : ObjectiveRunner::external(args.objective_cmd, args.timeout);

    const auto study = search::run_study(
        settings, space, runner.bind(space, settings.study_seed), args.db_path);

    const auto best = study->best_trial();
    nlohmann::ordered_json summary{{"n_trials", study->n_trials_issued()},
                                   {"n_complete", study->n_complete()},
                                   {"n_failed", study->n_failed()},
                                   {"db", args.db_path}};
    if (best) {
        summary["best_trial_id"] = best->trial_id;
        summary["best_value"] = best->value.value();
    }
    std::cout << summary.dump(2) << '\n';
    return 0;
}

} // namespace

int cli(int argc, const char* const* argv) {
    CLI::App app{"augforge: deterministic image-augmentation engine with "
                 "TPE search, fANOVA importance and detection metrics"};
    app.require_subcommand(1);

    // augment
    std::string aug_config, aug_dataset, aug_out, aug_backgrounds;
    std::optional<std::uint64_t> aug_seed;
    auto* aug = app.add_subcommand(
        "augment", "Apply a chain config to a dataset and write the result");
    aug->add_option("--config", aug_config, "chain config JSON")->required();
    aug->add_option("--dataset", aug_dataset, "dataset root directory")
        ->required();
    aug->add_option("--out", aug_out, "output directory")->required();
    aug->add_option("--seed", aug_seed, "stream seed (default AUGFORGE_SEED or 0)");
    aug->add_option("--backgrounds", aug_backgrounds,
                    "directory of background PNGs (needed when the background "
                    "augmentation is active)");

    // preview
    std::string prev_input, prev_mask, prev_out;
    auto* prev = app.add_subcommand(
        "preview", "Render the catalog against one image as a tiled PNG");
    prev->add_option("--input", prev_input, "input PNG")->required();
    prev->add_option("--mask", prev_mask, "foreground mask PNG");
    prev->add_option("--out", prev_out, "output PNG")->required();

    // search
    SearchArgs search_args;
    auto* search_cmd = app.add_subcommand(
        "search", "Optimize augmentation activations against an objective");
    search_cmd->add_option("--space", search_args.space_path,
                           "search space JSON (default: every catalog kind)");
    search_cmd->add_option("--objective-cmd", search_args.objective_cmd,
                           "external objective command (JSON on stdin/stdout)");
    search_cmd->add_flag("--surrogate", search_args.use_surrogate,
                         "use the built-in surrogate objective");
    search_cmd->add_option("--trials", search_args.trials, "total trials")
        ->capture_default_str();
    search_cmd->add_option("--startup", search_args.startup,
                           "uniform startup trials")
        ->capture_default_str();
    search_cmd->add_option("--db", search_args.db_path, "study database path")
        ->required();
    search_cmd->add_option("--seed", search_args.seed, "study seed");
    search_cmd->add_option("--parallel", search_args.parallel,
                           "concurrent objective executions")
        ->capture_default_str();
    search_cmd->add_option("--timeout", search_args.timeout,
                           "objective timeout in seconds")
        ->capture_default_str();

    // importance
    std::string imp_db, imp_out;
    importance::ForestSettings forest;
    std::optional<std::uint64_t> imp_seed;
    auto* imp = app.add_subcommand(
        "importance", "fANOVA importance analysis of a finished study");
    imp->add_option("--db", imp_db, "study database path")->required();
    imp->add_option("--trees", forest.n_trees, "trees per forest")
        ->capture_default_str();
    imp->add_option("--max-depth", forest.max_depth, "maximum tree depth")
        ->capture_default_str();
    imp->add_option("--repeats", forest.n_repeats, "independent repeats")
        ->capture_default_str();
    imp->add_option("--seed", imp_seed, "analysis seed");
    imp->add_option("--out", imp_out, "output JSON path (default stdout)");

    // evaluate
    std::string eval_gt, eval_det, eval_out;
    auto* eval_cmd = app.add_subcommand(
        "evaluate", "Score detections against ground truth (mAP, IoU)");
    eval_cmd->add_option("--gt", eval_gt, "ground-truth JSON")->required();
    eval_cmd->add_option("--det", eval_det, "detections JSON")->required();
    eval_cmd->add_option("--out", eval_out, "output JSON path (default stdout)");

    // report
    std::string rep_db, rep_out;
    auto* rep = app.add_subcommand(
        "report", "Summarize a study database (count vs. objective)");
    rep->add_option("--db", rep_db, "study database path")->required();
    rep->add_option("--out", rep_out, "output JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (aug->parsed()) {
            const augment::ChainConfig cfg = augment::ChainConfig::load(aug_config);
            const DatasetManifest manifest = DatasetManifest::discover(aug_dataset);
            augment::ChainOptions options;
            std::optional<augment::BackgroundPool> pool;
            if (!aug_backgrounds.empty()) {
                pool = augment::BackgroundPool::from_directory(aug_backgrounds);
                options.background_pool = &*pool;
            }
            augment_dataset(manifest, cfg, aug_out, resolve_seed(aug_seed),
                            options);
            return 0;
        }
        if (prev->parsed()) {
            imaging::Sample sample;
            sample.image = imaging::load_image(prev_input);
            sample.id = std::filesystem::path(prev_input).stem().string();
            if (!prev_mask.empty()) {
                sample.mask = imaging::load_mask(prev_mask);
                if (sample.mask->width() != sample.image.width() ||
                    sample.mask->height() != sample.image.height()) {
                    throw ConfigError("mask dimensions do not match the input");
                }
            }
            const int tiles = augment::preview_grid(sample, prev_out);
            std::cout << "wrote " << tiles << " tiles to " << prev_out << '\n';
            return 0;
        }
        if (search_cmd->parsed()) {
            return run_search(search_args);
        }
        if (imp->parsed()) {
            forest.seed = resolve_seed(imp_seed);
            const auto trials = search::read_trial_log(imp_db);
            // The space is recovered from the recorded parameters, ordered
            // by catalog position.
            std::vector<std::string> names;
            for (const auto& r : trials) {
                if (r.state != search::TrialState::complete) continue;
                for (const auto& [name, value] : r.params) names.push_back(name);
                break;
            }
            if (names.empty()) {
                throw AnalysisError("study has no complete trials");
            }
            std::sort(names.begin(), names.end(),
                      [](const std::string& a, const std::string& b) {
                          return static_cast<int>(augment::kind_from_name(a)) <
                                 static_cast<int>(augment::kind_from_name(b));
                      });
            const auto report = importance::analyze_study(
                trials, search::SearchSpace::from_names(names), forest);
            emit_json(report.to_json(), imp_out);
            return 0;
        }
        if (eval_cmd->parsed()) {
            const auto gt = eval::GroundTruthSet::load(eval_gt);
            const auto det = eval::DetectionSet::load(eval_det);
            emit_json(eval::evaluate(gt, det).to_json(), eval_out);
            return 0;
        }
        if (rep->parsed()) {
            emit_json(report_study(rep_db), rep_out);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "augforge: error: " << e.what() << '\n';
        return 1;
    } catch (const AnalysisError& e) {
        std::cerr << "augforge: error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "augforge: error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "augforge: error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

} // namespace augforge::harness
