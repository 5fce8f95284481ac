// ecoref command-line driver: ingest, train, eval-pairwise, cluster, score,
// run-all. A JSON config file declares the experiment; flags override it.
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ecoref/pipeline.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::string> scope;
    std::optional<double> threshold;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "pipeline config file (JSON)")->required();
    cmd->add_option("--scope", flags.scope, "restrict to one scope: wd or cd")
        ->check(CLI::IsMember({"wd", "cd"}));
    cmd->add_option("--threshold", flags.threshold, "override clustering threshold for the scope");
    cmd->add_option("--seed", flags.seed, "override the root seed");
    cmd->add_option("--out", flags.out, "override the output directory");
    cmd->add_option("--jobs", flags.jobs, "worker threads for featurize/predict fan-out");
}

ecoref::PipelineConfig resolve_config(const CommonFlags& flags, const std::string& command) {
    ecoref::PipelineConfig cfg = ecoref::load_config(flags.config_path);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.out) cfg.out_dir = *flags.out;
    if (flags.jobs) cfg.jobs = *flags.jobs;
    if (flags.threshold) {
        if (!flags.scope) throw ecoref::UsageError("--threshold requires --scope");
        if (command == "eval-pairwise")
            (*flags.scope == "wd" ? cfg.eval_thresholds_wd : cfg.eval_thresholds_cd) = {*flags.threshold};
        else
            (*flags.scope == "wd" ? cfg.thresholds.tau_wd : cfg.thresholds.tau_cd) = *flags.threshold;
    }
    cfg.validate();
    return cfg;
}

std::vector<ecoref::Scope> selected_scopes(const CommonFlags& flags) {
    if (!flags.scope) return {ecoref::Scope::WD, ecoref::Scope::CD};
    return {*flags.scope == "wd" ? ecoref::Scope::WD : ecoref::Scope::CD};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"event coreference pipeline"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string run_command;
    for (const auto& name : {"ingest", "train", "eval-pairwise", "cluster", "score", "run-all"}) {
        CLI::App* cmd = app.add_subcommand(name, "");
        add_common(cmd, flags);
        cmd->callback([&run_command, name] { run_command = name; });
    }
    app.get_subcommand("ingest")->description("parse the corpus into canonical JSONL plus statistics");
    app.get_subcommand("train")->description("train the pairwise classifier(s) on the train split");
    app.get_subcommand("eval-pairwise")->description("intrinsic pairwise evaluation tables + histogram");
    app.get_subcommand("cluster")->description("resolve WD/CD clusterings and lemma baselines");
    app.get_subcommand("score")->description("score clusterings against gold chains");
    app.get_subcommand("run-all")->description("run every stage and write a manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        ecoref::PipelineConfig cfg = resolve_config(flags, run_command);
        if (run_command == "ingest") {
            ecoref::stage_ingest(cfg);
            std::cout << "wrote " << ecoref::artifact(cfg, "corpus.jsonl").string() << " and stats.csv\n";
        } else if (run_command == "run-all") {
            auto manifest = ecoref::run_all(cfg);
            std::cout << "run complete; manifest config_hash=" << manifest["config_hash"] << "\n";
        } else if (run_command == "score") {
            ecoref::stage_score(cfg, ecoref::load_corpus_artifact(cfg));
            std::cout << "wrote score reports under " << cfg.out_dir.string() << "\n";
        } else {
            ecoref::PipelineContext ctx = ecoref::make_context(cfg, ecoref::load_corpus_artifact(cfg));
            if (run_command == "train") {
                for (ecoref::Scope scope : selected_scopes(flags)) {
                    ecoref::TrainResult r = ecoref::stage_train(ctx, scope);
                    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
                    std::cout << "trained " << ecoref::to_string(scope) << " model ("
                              << r.model.parameter_count() << " parameters, final mean loss "
                              << r.epoch_mean_loss.back() << ")\n";
                }
            } else if (run_command == "eval-pairwise") {
                for (ecoref::Scope scope : selected_scopes(flags)) {
                    ecoref::PairModel model = ecoref::load_model_artifact(cfg, scope);
                    std::cout << ecoref::stage_eval_pairwise(ctx, model, scope);
                }
            } else if (run_command == "cluster") {
                ecoref::stage_cluster(ctx, ecoref::load_model_artifact(cfg, ecoref::Scope::WD),
                                      ecoref::load_model_artifact(cfg, ecoref::Scope::CD));
                std::cout << "wrote clusterings under " << cfg.out_dir.string() << "\n";
            }
        }
    } catch (const ecoref::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const ecoref::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
