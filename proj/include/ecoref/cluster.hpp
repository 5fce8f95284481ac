#pragma once

// Graph-based clustering: mention graphs weighted by classifier scores,
// threshold-filtered connected components for WD resolution, the two-phase
// WD-then-CD merge for CD resolution, and the lemma-match baseline.

#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "ecoref/pairnet.hpp"

namespace ecoref {

struct WeightedEdge {
    int a = 0, b = 0;  // indices into MentionGraph::nodes, a < b
    double weight = 0.0;
};

struct MentionGraph {
    Scope scope = Scope::WD;
    std::vector<std::string> nodes;  // mention ids, textual order
    std::vector<WeightedEdge> edges;
};

struct Clustering {
    std::vector<std::vector<std::string>> clusters;  // disjoint, sorted

    void normalize() {
        for (auto& c : clusters) std::sort(c.begin(), c.end());
        std::sort(clusters.begin(), clusters.end());
    }
};

struct Thresholds {
    double tau_wd = 0.95;
    double tau_cd = 1.0;
    double epsilon = 1e-9;

    void validate() const {
        if (tau_wd < 0.0 || tau_wd > 1.0 || tau_cd < 0.0 || tau_cd > 1.0)
            throw UsageError("thresholds must lie in [0,1]");
        if (epsilon < 0.0) throw UsageError("threshold epsilon must be >= 0");
    }
};

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> rank_;
};

namespace detail {

/// Deterministic parallel map over an index range: results land by index, so
/// the output is independent of the worker count.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    if (jobs <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : threads) t.join();
}

}  // namespace detail

/// One edge per eligible unordered mention pair (WD: same document, CD: same
/// topic), weighted by the classifier probability. predict() calls fan out
/// over `jobs` threads; edge order and weights do not depend on the count.
inline MentionGraph build_graph(const MentionTable& table, const PairModel& model, Scope scope,
                                const Featurizer& featurizer, int jobs = 1) {
    if (model.arch.input_dim != featurizer.input_dim(scope))
        throw UsageError("model input_dim " + std::to_string(model.arch.input_dim) +
                         " does not match featurizer scope dimension " +
                         std::to_string(featurizer.input_dim(scope)));
    MentionGraph graph;
    graph.scope = scope;
    graph.nodes.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) graph.nodes.push_back(table.mention(i).id);

    for (std::size_t i = 0; i < table.size(); ++i) {
        for (std::size_t j = i + 1; j < table.size(); ++j) {
            bool eligible = scope == Scope::WD ? table.doc(i).doc_id == table.doc(j).doc_id
                                               : table.doc(i).topic == table.doc(j).topic;
            if (eligible) graph.edges.push_back({static_cast<int>(i), static_cast<int>(j), 0.0});
        }
    }
    detail::parallel_for(graph.edges.size(), jobs, [&](std::size_t e) {
        WeightedEdge& edge = graph.edges[e];
        const Document& da = table.doc(static_cast<std::size_t>(edge.a));
        const Document& db = table.doc(static_cast<std::size_t>(edge.b));
        auto x = featurizer.pair(da, table.mention(static_cast<std::size_t>(edge.a)), db,
                                 table.mention(static_cast<std::size_t>(edge.b)), scope);
        edge.weight = predict(model, x);
    });
    return graph;
}

/// Components of the graph restricted to edges with weight >= tau - epsilon;
/// isolated nodes become singleton clusters.
inline Clustering connected_components(const MentionGraph& graph, double tau, double epsilon) {
    UnionFind uf(graph.nodes.size());
    for (const WeightedEdge& e : graph.edges)
        if (e.weight >= tau - epsilon) uf.unite(static_cast<std::size_t>(e.a), static_cast<std::size_t>(e.b));
    std::map<std::size_t, std::vector<std::string>> groups;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) groups[uf.find(i)].push_back(graph.nodes[i]);
    Clustering out;
    for (auto& [root, members] : groups) out.clusters.push_back(std::move(members));
    out.normalize();
    return out;
}

inline Clustering wd_resolve(const MentionTable& table, const PairModel& wd_model,
                             const Featurizer& featurizer, const Thresholds& thresholds, int jobs = 1) {
    thresholds.validate();
    MentionGraph graph = build_graph(table, wd_model, Scope::WD, featurizer, jobs);
    return connected_components(graph, thresholds.tau_wd, thresholds.epsilon);
}

/// Two-phase merge core: WD components at tau_wd first, then any CD edge at
/// tau_cd between two components joins them. Every phase-1 component lands
/// wholly inside one output cluster; with no qualifying CD edge the result
/// equals the WD clustering.
inline Clustering cd_merge(const MentionGraph& wd_graph, const MentionGraph& cd_graph,
                           const Thresholds& thresholds) {
    thresholds.validate();
    if (wd_graph.nodes != cd_graph.nodes)
        throw UsageError("cd_merge: WD and CD graphs must share one node set");
    UnionFind components(wd_graph.nodes.size());
    for (const WeightedEdge& e : wd_graph.edges)
        if (e.weight >= thresholds.tau_wd - thresholds.epsilon)
            components.unite(static_cast<std::size_t>(e.a), static_cast<std::size_t>(e.b));
    for (const WeightedEdge& e : cd_graph.edges)
        if (e.weight >= thresholds.tau_cd - thresholds.epsilon)
            components.unite(static_cast<std::size_t>(e.a), static_cast<std::size_t>(e.b));
    std::map<std::size_t, std::vector<std::string>> groups;
    for (std::size_t i = 0; i < wd_graph.nodes.size(); ++i)
        groups[components.find(i)].push_back(wd_graph.nodes[i]);
    Clustering out;
    for (auto& [root, members] : groups) out.clusters.push_back(std::move(members));
    out.normalize();
    return out;
}

inline Clustering cd_resolve(const MentionTable& table, const PairModel& wd_model,
                             const PairModel& cd_model, const Featurizer& featurizer,
                             const Thresholds& thresholds, int jobs = 1) {
    MentionGraph wd_graph = build_graph(table, wd_model, Scope::WD, featurizer, jobs);
    MentionGraph cd_graph = build_graph(table, cd_model, Scope::CD, featurizer, jobs);
    return cd_merge(wd_graph, cd_graph, thresholds);
}

/// Baseline: group mentions sharing a lemmatized head word, within a
/// document (WD) or within a topic (CD).
inline Clustering lemma_baseline(const MentionTable& table, Scope scope) {
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> groups;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const Document& doc = table.doc(i);
        const Mention& m = table.mention(i);
        const Token& head = head_word(m, doc.sentence_of(m));
        std::string group_key = scope == Scope::WD ? doc.doc_id : "t" + std::to_string(doc.topic);
        groups[{std::move(group_key), head.lemma}].push_back(m.id);
    }
    Clustering out;
    for (auto& [key, members] : groups) out.clusters.push_back(std::move(members));
    out.normalize();
    return out;
}

// ---------------------------------------------------------------------------
// Score histogram

struct ScoreHistogram {
    int bins = 10;
    std::vector<std::size_t> coref;     // counts per bin
    std::vector<std::size_t> noncoref;  // counts per bin
};

/// Histogram of classifier scores over equal-width bins of [0,1], split by
/// gold label. A score of 1.0 lands in the top bin.
inline ScoreHistogram score_histogram(const std::vector<std::pair<double, bool>>& scored_pairs,
                                      int bin_count) {
    if (bin_count < 1) throw UsageError("score_histogram: bin_count must be >= 1");
    ScoreHistogram h;
    h.bins = bin_count;
    h.coref.assign(static_cast<std::size_t>(bin_count), 0);
    h.noncoref.assign(static_cast<std::size_t>(bin_count), 0);
    for (const auto& [score, is_coref] : scored_pairs) {
        if (!(score >= 0.0 && score <= 1.0))
            throw NumericError("score_histogram: score outside [0,1]");
        int bin = std::min(static_cast<int>(std::floor(score * bin_count)), bin_count - 1);
        (is_coref ? h.coref : h.noncoref)[static_cast<std::size_t>(bin)] += 1;
    }
    return h;
}

inline ScoreHistogram score_histogram(const PairModel& model, const MentionTable& table,
                                      const std::vector<LabeledPair>& pairs, Scope scope,
                                      const Featurizer& featurizer, int bin_count, int jobs = 1) {
    std::vector<std::pair<double, bool>> scored(pairs.size());
    detail::parallel_for(pairs.size(), jobs, [&](std::size_t i) {
        auto x = table.featurize(featurizer, pairs[i], scope);
        scored[i] = {predict(model, x), pairs[i].coref};
    });
    return score_histogram(scored, bin_count);
}

// ---------------------------------------------------------------------------
// Clustering serialization

inline nlohmann::ordered_json clustering_to_json(const Clustering& clustering) {
    nlohmann::ordered_json j;
    j["clusters"] = clustering.clusters;
    return j;
}

inline Clustering clustering_from_json(const nlohmann::ordered_json& j) {
    try {
        Clustering c;
        c.clusters = j.at("clusters").get<std::vector<std::vector<std::string>>>();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("clustering file: ") + e.what());
    }
}

}  // namespace ecoref
