#pragma once

// End-to-end pipeline: one declarative config drives ingest, training,
// intrinsic evaluation, clustering, and scoring. Every stage writes its
// artifacts under the output directory and can be re-run from the persisted
// outputs of earlier stages. All randomness derives from the root seed.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecoref/canonical.hpp"
#include "ecoref/cluster.hpp"
#include "ecoref/ecb_xml.hpp"
#include "ecoref/metrics.hpp"
#include "ecoref/report.hpp"

namespace ecoref {

struct ScopeTrainConfig {
    std::vector<int> hidden_sizes;
    TrainConfig train;
};

struct PipelineConfig {
    std::uint64_t seed = 1234;
    std::filesystem::path out_dir = "out";
    int jobs = 1;

    std::optional<std::filesystem::path> xml_dir;
    std::optional<std::filesystem::path> canonical_path;
    std::optional<std::filesystem::path> detected_spans;
    std::filesystem::path embeddings_path;
    std::filesystem::path wordnet_path;

    SplitConfig split;
    std::string eval_split = "test";  // train | dev | test

    FeatureConfig features;
    ScopeTrainConfig wd = {{300}, {0.01, 20, 32, 0, NegativeSampling::balanced}};
    ScopeTrainConfig cd = {{400, 150}, {0.01, 20, 32, 0, NegativeSampling::actual}};
    Thresholds thresholds;
    std::vector<double> eval_thresholds_wd = {0.5, 0.95};
    std::vector<double> eval_thresholds_cd = {0.5, 1.0};
    int histogram_bins = 20;
    bool include_singletons = true;

    void validate() const {
        features.validate();
        thresholds.validate();
        wd.train.validate();
        cd.train.validate();
        if (jobs < 1) throw UsageError("config: jobs must be >= 1");
        if (histogram_bins < 1) throw UsageError("config: histogram_bins must be >= 1");
        if (eval_split != "train" && eval_split != "dev" && eval_split != "test")
            throw UsageError("config: eval_split must be train, dev, or test");
        if (!xml_dir && !canonical_path)
            throw UsageError("config: corpus needs either xml_dir or canonical");
    }

    const ScopeTrainConfig& scope_train(Scope scope) const { return scope == Scope::WD ? wd : cd; }
    const std::vector<double>& eval_thresholds(Scope scope) const {
        return scope == Scope::WD ? eval_thresholds_wd : eval_thresholds_cd;
    }
};

namespace detail {

inline std::pair<int, int> json_range(const nlohmann::ordered_json& j) {
    if (!j.is_array() || j.size() != 2) throw UsageError("config: topic range must be [lo, hi]");
    return {j[0].get<int>(), j[1].get<int>()};
}

inline void parse_scope_train(const nlohmann::ordered_json& j, ScopeTrainConfig& out) {
    if (j.contains("hidden_sizes")) out.hidden_sizes = j["hidden_sizes"].get<std::vector<int>>();
    if (j.contains("learning_rate")) out.train.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("epochs")) out.train.epochs = j["epochs"].get<int>();
    if (j.contains("batch_size")) out.train.batch_size = j["batch_size"].get<int>();
    if (j.contains("negative_sampling"))
        out.train.sampling = negative_sampling_from_string(j["negative_sampling"].get<std::string>());
}

}  // namespace detail

inline PipelineConfig config_from_json(const nlohmann::ordered_json& j) {
    PipelineConfig cfg;
    try {
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
        if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
        if (j.contains("corpus")) {
            const auto& c = j["corpus"];
            if (c.contains("xml_dir")) cfg.xml_dir = c["xml_dir"].get<std::string>();
            if (c.contains("canonical")) cfg.canonical_path = c["canonical"].get<std::string>();
        }
        if (j.contains("detected_spans")) cfg.detected_spans = j["detected_spans"].get<std::string>();
        if (j.contains("embeddings")) cfg.embeddings_path = j["embeddings"].get<std::string>();
        if (j.contains("wordnet")) cfg.wordnet_path = j["wordnet"].get<std::string>();
        if (j.contains("split")) {
            const auto& s = j["split"];
            if (s.contains("train")) cfg.split.train = detail::json_range(s["train"]);
            if (s.contains("dev")) cfg.split.dev = detail::json_range(s["dev"]);
            if (s.contains("test")) cfg.split.test = detail::json_range(s["test"]);
        }
        if (j.contains("eval_split")) cfg.eval_split = j["eval_split"].get<std::string>();
        if (j.contains("features")) {
            const auto& f = j["features"];
            if (f.contains("embedding_dim")) cfg.features.embedding_dim = f["embedding_dim"].get<int>();
            if (f.contains("window")) cfg.features.window = f["window"].get<int>();
            if (f.contains("buckets")) cfg.features.buckets = f["buckets"].get<int>();
            if (f.contains("max_sentence_distance"))
                cfg.features.max_sentence_distance = f["max_sentence_distance"].get<int>();
            if (f.contains("pos_tagset"))
                cfg.features.pos_tagset = f["pos_tagset"].get<std::vector<std::string>>();
        }
        if (j.contains("train")) {
            const auto& t = j["train"];
            if (t.contains("wd")) detail::parse_scope_train(t["wd"], cfg.wd);
            if (t.contains("cd")) detail::parse_scope_train(t["cd"], cfg.cd);
        }
        if (j.contains("thresholds")) {
            const auto& t = j["thresholds"];
            if (t.contains("tau_wd")) cfg.thresholds.tau_wd = t["tau_wd"].get<double>();
            if (t.contains("tau_cd")) cfg.thresholds.tau_cd = t["tau_cd"].get<double>();
            if (t.contains("epsilon")) cfg.thresholds.epsilon = t["epsilon"].get<double>();
        }
        if (j.contains("eval_thresholds")) {
            const auto& t = j["eval_thresholds"];
            if (t.contains("wd")) cfg.eval_thresholds_wd = t["wd"].get<std::vector<double>>();
            if (t.contains("cd")) cfg.eval_thresholds_cd = t["cd"].get<std::vector<double>>();
        }
        if (j.contains("histogram_bins")) cfg.histogram_bins = j["histogram_bins"].get<int>();
        if (j.contains("include_singletons")) cfg.include_singletons = j["include_singletons"].get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    return cfg;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw UsageError("config file not found: " + path.string());
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

/// Normalized full config (all fields, fixed order); hashing this pins the
/// run identity in the manifest.
inline nlohmann::ordered_json config_to_json(const PipelineConfig& cfg) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir.string();
    j["jobs"] = cfg.jobs;
    nlohmann::ordered_json corpus;
    if (cfg.xml_dir) corpus["xml_dir"] = cfg.xml_dir->string();
    if (cfg.canonical_path) corpus["canonical"] = cfg.canonical_path->string();
    j["corpus"] = std::move(corpus);
    if (cfg.detected_spans) j["detected_spans"] = cfg.detected_spans->string();
    j["embeddings"] = cfg.embeddings_path.string();
    j["wordnet"] = cfg.wordnet_path.string();
    j["split"] = {{"train", {cfg.split.train.first, cfg.split.train.second}},
                  {"dev", {cfg.split.dev.first, cfg.split.dev.second}},
                  {"test", {cfg.split.test.first, cfg.split.test.second}}};
    j["eval_split"] = cfg.eval_split;
    j["features"] = {{"embedding_dim", cfg.features.embedding_dim},
                     {"window", cfg.features.window},
                     {"buckets", cfg.features.buckets},
                     {"max_sentence_distance", cfg.features.max_sentence_distance},
                     {"pos_tagset", cfg.features.pos_tagset}};
    auto scope_json = [](const ScopeTrainConfig& s) {
        return nlohmann::ordered_json{{"hidden_sizes", s.hidden_sizes},
                                      {"learning_rate", s.train.learning_rate},
                                      {"epochs", s.train.epochs},
                                      {"batch_size", s.train.batch_size},
                                      {"negative_sampling", to_string(s.train.sampling)}};
    };
    j["train"] = {{"wd", scope_json(cfg.wd)}, {"cd", scope_json(cfg.cd)}};
    j["thresholds"] = {{"tau_wd", cfg.thresholds.tau_wd},
                       {"tau_cd", cfg.thresholds.tau_cd},
                       {"epsilon", cfg.thresholds.epsilon}};
    j["eval_thresholds"] = {{"wd", cfg.eval_thresholds_wd}, {"cd", cfg.eval_thresholds_cd}};
    j["histogram_bins"] = cfg.histogram_bins;
    j["include_singletons"] = cfg.include_singletons;
    return j;
}

// ---------------------------------------------------------------------------
// Stage context

struct PipelineContext {
    PipelineConfig cfg;
    Corpus corpus;
    Corpus train_split, dev_split, test_split;
    EmbeddingStore embeddings;
    WordNetStore wordnet;
    Featurizer featurizer;

    const Corpus& eval_corpus() const {
        if (cfg.eval_split == "train") return train_split;
        if (cfg.eval_split == "dev") return dev_split;
        return test_split;
    }
};

/// Load lexical resources and split the corpus. The corpus argument comes
/// from stage_ingest or from the persisted corpus.jsonl.
inline PipelineContext make_context(const PipelineConfig& cfg, Corpus corpus) {
    cfg.validate();
    PipelineContext ctx{cfg, std::move(corpus), {}, {}, {}, {}, {}, {}};
    std::tie(ctx.train_split, ctx.dev_split, ctx.test_split) = split_corpus(ctx.corpus, cfg.split);
    ctx.embeddings = EmbeddingStore::load_file(cfg.embeddings_path);
    ctx.wordnet = WordNetStore::load_tsv_file(cfg.wordnet_path);
    ctx.featurizer = Featurizer{&ctx.embeddings, &ctx.wordnet, cfg.features};
    if (ctx.embeddings.dim() != cfg.features.embedding_dim)
        throw UsageError("embedding file dimension " + std::to_string(ctx.embeddings.dim()) +
                         " does not match configured embedding_dim " +
                         std::to_string(cfg.features.embedding_dim));
    return ctx;
}

// ---------------------------------------------------------------------------
// Stages. Artifact names are fixed; see README.

inline std::filesystem::path artifact(const PipelineConfig& cfg, const std::string& name) {
    return cfg.out_dir / name;
}

/// Ingest ECB+ XML (or re-validate a canonical file) into corpus.jsonl plus
/// a statistics report.
inline Corpus stage_ingest(const PipelineConfig& cfg) {
    Corpus corpus;
    if (cfg.xml_dir) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::recursive_directory_iterator(*cfg.xml_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".xml") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw DataError("no .xml files under " + cfg.xml_dir->string());
        EcbParseStats stats;
        for (const auto& file : files) {
            try {
                corpus.documents.push_back(
                    parse_ecb_document(read_file(file), file.filename().string(), &stats));
            } catch (const DataError& e) {
                throw DataError(file.string() + ": " + e.what());
            }
        }
        validate_corpus(corpus);
    } else {
        std::ifstream in(*cfg.canonical_path);
        if (!in) throw DataError("cannot open corpus file: " + cfg.canonical_path->string());
        corpus = load_canonical(in);
    }

    write_file(artifact(cfg, "corpus.jsonl"), write_canonical(corpus));
    auto [train, dev, test] = split_corpus(corpus, cfg.split);
    write_file(artifact(cfg, "stats.csv"),
               stats_report_csv(split_stats(train), split_stats(dev), split_stats(test),
                                split_stats(corpus)));
    return corpus;
}

/// The persisted corpus from a previous ingest.
inline Corpus load_corpus_artifact(const PipelineConfig& cfg) {
    auto path = artifact(cfg, "corpus.jsonl");
    std::ifstream in(path);
    if (!in) throw DataError("missing " + path.string() + " (run ingest first)");
    return load_canonical(in);
}

/// Train one scope's classifier on the train split; writes the model file
/// and the per-epoch loss trace.
inline TrainResult stage_train(const PipelineContext& ctx, Scope scope) {
    const PipelineConfig& cfg = ctx.cfg;
    const ScopeTrainConfig& sc = cfg.scope_train(scope);
    MentionTable table(ctx.train_split);
    std::vector<LabeledPair> pairs = generate_pairs(table, scope, PairMode::train);
    if (sc.train.sampling == NegativeSampling::balanced)
        pairs = sample_balanced(pairs, derive_seed(cfg.seed, "balance/train/" + to_string(scope)));

    TrainSet data;
    data.x.resize(pairs.size());
    data.y.resize(pairs.size());
    detail::parallel_for(pairs.size(), cfg.jobs, [&](std::size_t i) {
        data.x[i] = table.featurize(ctx.featurizer, pairs[i], scope);
        data.y[i] = pairs[i].coref ? 1 : 0;
    });

    Architecture arch{ctx.featurizer.input_dim(scope), sc.hidden_sizes};
    TrainConfig tc = sc.train;
    tc.seed = derive_seed(cfg.seed, "train/" + to_string(scope));
    TrainResult result = train(arch, data, tc);

    write_file(artifact(cfg, "model_" + to_string(scope) + ".json"),
               model_to_json(result.model, to_string(scope)).dump(2) + "\n");
    write_file(artifact(cfg, "loss_" + to_string(scope) + ".csv"), loss_trace_csv(result.epoch_mean_loss));
    return result;
}

inline PairModel load_model_artifact(const PipelineConfig& cfg, Scope scope) {
    auto path = artifact(cfg, "model_" + to_string(scope) + ".json");
    if (!std::filesystem::exists(path))
        throw DataError("missing " + path.string() + " (run train first)");
    return model_from_json(nlohmann::ordered_json::parse(read_file(path)));
}

namespace detail {

/// Eval-split variants: the gold mention set, plus the detected-span filter
/// when configured.
inline std::vector<std::pair<std::string, Corpus>> eval_variants(const PipelineConfig& cfg,
                                                                 const Corpus& eval_corpus) {
    std::vector<std::pair<std::string, Corpus>> out;
    out.emplace_back("gold", eval_corpus);
    if (cfg.detected_spans) {
        auto spans = parse_detected_spans(read_file(*cfg.detected_spans));
        out.emplace_back("detect", filter_to_gold(eval_corpus, spans));
    }
    return out;
}

inline std::vector<std::pair<std::string, Corpus>> eval_variants(const PipelineContext& ctx) {
    return eval_variants(ctx.cfg, ctx.eval_corpus());
}

}  // namespace detail

/// Intrinsic pairwise evaluation on the eval split: one CSV row per
/// (variant, sampling mode, threshold), plus the score histogram.
inline std::string stage_eval_pairwise(const PipelineContext& ctx, const PairModel& model, Scope scope) {
    const PipelineConfig& cfg = ctx.cfg;
    std::string csv = pairwise_report_header();
    ScoreHistogram histogram;
    bool first_variant = true;
    for (const auto& [variant, corpus] : detail::eval_variants(ctx)) {
        MentionTable table(corpus);
        std::vector<LabeledPair> all_pairs = generate_pairs(table, scope, PairMode::eval);
        std::vector<LabeledPair> balanced = sample_balanced(
            all_pairs, derive_seed(cfg.seed, "balance/eval/" + to_string(scope) + "/" + variant));
        for (const auto& [mode, pairs] :
             {std::pair<std::string, const std::vector<LabeledPair>*>{"balanced", &balanced},
              std::pair<std::string, const std::vector<LabeledPair>*>{"actual", &all_pairs}}) {
            std::size_t positives = 0;
            for (const auto& p : *pairs) positives += p.coref ? 1 : 0;
            for (double threshold : cfg.eval_thresholds(scope)) {
                PairwiseRow row;
                row.setting = to_string(scope) + "-" + variant + (mode == "balanced" ? "-balanced" : "");
                row.threshold = threshold;
                row.coref_links = positives;
                row.noncoref_links = pairs->size() - positives;
                row.counts = intrinsic_eval(model, table, *pairs, scope, ctx.featurizer, threshold,
                                            cfg.thresholds.epsilon, cfg.jobs);
                csv += pairwise_row_csv(row);
            }
        }
        if (first_variant) {
            histogram = score_histogram(model, table, all_pairs, scope, ctx.featurizer,
                                        cfg.histogram_bins, cfg.jobs);
            first_variant = false;
        }
    }
    write_file(artifact(cfg, "pairwise_" + to_string(scope) + ".csv"), csv);
    write_file(artifact(cfg, "histogram_" + to_string(scope) + ".csv"), histogram_csv(histogram));
    return csv;
}

/// Resolve WD/CD clusterings and the lemma baselines on the eval split.
inline void stage_cluster(const PipelineContext& ctx, const PairModel& wd_model,
                          const PairModel& cd_model) {
    const PipelineConfig& cfg = ctx.cfg;
    for (const auto& [variant, corpus] : detail::eval_variants(ctx)) {
        MentionTable table(corpus);
        std::string suffix = variant == "gold" ? "" : "_detect";
        Clustering wd = wd_resolve(table, wd_model, ctx.featurizer, cfg.thresholds, cfg.jobs);
        Clustering cd = cd_resolve(table, wd_model, cd_model, ctx.featurizer, cfg.thresholds, cfg.jobs);
        write_file(artifact(cfg, "clusters_wd" + suffix + ".json"), clustering_to_json(wd).dump() + "\n");
        write_file(artifact(cfg, "clusters_cd" + suffix + ".json"), clustering_to_json(cd).dump() + "\n");
        write_file(artifact(cfg, "clusters_lemma_wd" + suffix + ".json"),
                   clustering_to_json(lemma_baseline(table, Scope::WD)).dump() + "\n");
        write_file(artifact(cfg, "clusters_lemma_cd" + suffix + ".json"),
                   clustering_to_json(lemma_baseline(table, Scope::CD)).dump() + "\n");
    }
}

/// Gold singleton chains are dropped from both sides when the config says so.
inline std::pair<Clustering, Clustering> apply_singleton_policy(const Clustering& key,
                                                                const Clustering& response,
                                                                bool include_singletons) {
    if (include_singletons) return {key, response};
    Clustering key_out, response_out;
    std::unordered_set<std::string> universe;
    for (const auto& chain : key.clusters)
        if (chain.size() >= 2) {
            key_out.clusters.push_back(chain);
            universe.insert(chain.begin(), chain.end());
        }
    for (const auto& cluster : response.clusters) {
        std::vector<std::string> kept;
        for (const auto& m : cluster)
            if (universe.count(m)) kept.push_back(m);
        if (!kept.empty()) response_out.clusters.push_back(std::move(kept));
    }
    return {key_out, response_out};
}

/// MUC/B3/CEAF_e + CoNLL rows for one clustering against gold chains.
inline std::string score_report(const Clustering& key, const Clustering& response,
                                bool include_singletons) {
    auto [k, r] = apply_singleton_policy(key, response, include_singletons);
    return score_report_csv(muc(k, r), b_cubed(k, r), ceaf_e(k, r));
}

/// Score persisted clusterings against gold chains. Needs only the corpus,
/// not the lexical resources.
inline void stage_score(const PipelineConfig& cfg, const Corpus& full_corpus) {
    auto [train, dev, test] = split_corpus(full_corpus, cfg.split);
    const Corpus& eval_corpus = cfg.eval_split == "train" ? train : cfg.eval_split == "dev" ? dev : test;
    for (const auto& [variant, corpus] : detail::eval_variants(cfg, eval_corpus)) {
        std::string suffix = variant == "gold" ? "" : "_detect";
        for (const std::string base : {"clusters_wd", "clusters_cd", "clusters_lemma_wd", "clusters_lemma_cd"}) {
            auto path = artifact(cfg, base + suffix + ".json");
            if (!std::filesystem::exists(path))
                throw DataError("missing " + path.string() + " (run cluster first)");
            Clustering response = clustering_from_json(nlohmann::ordered_json::parse(read_file(path)));
            Scope scope = base.ends_with("_cd") ? Scope::CD : Scope::WD;
            Clustering key;
            key.clusters = gold_chains(corpus, scope);
            std::string out_name = "score" + base.substr(std::string("clusters").size()) + suffix + ".csv";
            write_file(artifact(cfg, out_name), score_report(key, response, cfg.include_singletons));
        }
    }
}

inline void stage_score(const PipelineContext& ctx) { stage_score(ctx.cfg, ctx.corpus); }

// ---------------------------------------------------------------------------
// run-all

inline nlohmann::ordered_json run_all(const PipelineConfig& cfg) {
    cfg.validate();
    std::string stage = "ingest";
    try {
        Corpus corpus = stage_ingest(cfg);
        stage = "context";
        PipelineContext ctx = make_context(cfg, std::move(corpus));
        stage = "train";
        TrainResult wd = stage_train(ctx, Scope::WD);
        TrainResult cd = stage_train(ctx, Scope::CD);
        stage = "eval-pairwise";
        stage_eval_pairwise(ctx, wd.model, Scope::WD);
        stage_eval_pairwise(ctx, cd.model, Scope::CD);
        stage = "cluster";
        stage_cluster(ctx, wd.model, cd.model);
        stage = "score";
        stage_score(ctx);
        stage = "manifest";
        nlohmann::ordered_json manifest;
        manifest["format"] = "run-manifest-v1";
        std::ostringstream hash;
        hash << std::hex << fnv1a64(config_to_json(cfg).dump());
        manifest["config_hash"] = hash.str();
        manifest["seed"] = cfg.seed;
        manifest["eval_split"] = cfg.eval_split;
        std::vector<std::string> names;
        for (const auto& entry : std::filesystem::directory_iterator(cfg.out_dir))
            if (entry.is_regular_file() && entry.path().filename() != "manifest.json")
                names.push_back(entry.path().filename().string());
        std::sort(names.begin(), names.end());
        manifest["artifacts"] = names;
        write_file(artifact(cfg, "manifest.json"), manifest.dump(2) + "\n");
        return manifest;
    } catch (const UsageError&) {
        throw;
    } catch (const DataError& e) {
        throw DataError("stage " + stage + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError("stage " + stage + ": " + e.what());
    }
}

}  // namespace ecoref
