#pragma once

// Coreference evaluation: MUC (link-based), B-cubed (mention-based), CEAF_e
// (entity-based via optimal cluster alignment), their CoNLL average, and the
// intrinsic pairwise metrics. Key and response are first padded onto a
// shared mention universe (missing mentions become singletons).

#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "ecoref/cluster.hpp"

namespace ecoref {

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

inline PRF make_prf(double precision, double recall) {
    PRF out;
    out.precision = precision;
    out.recall = recall;
    out.f1 = (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    return out;
}

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::size_t total() const { return tp + fp + fn + tn; }
};

namespace detail {

struct PartitionPair {
    std::vector<std::vector<int>> key;       // clusters as mention indices
    std::vector<std::vector<int>> response;  // over the same universe
    std::vector<int> key_of;                 // mention index -> key cluster
    std::vector<int> response_of;
};

/// Index both clusterings over the union of their mentions; mentions present
/// on only one side become singletons on the other.
inline PartitionPair align_universe(const Clustering& key, const Clustering& response) {
    std::unordered_map<std::string, int> ids;
    auto intern = [&](const std::string& m) {
        auto [it, inserted] = ids.emplace(m, static_cast<int>(ids.size()));
        return it->second;
    };
    PartitionPair out;
    for (const auto& cluster : key.clusters) {
        std::vector<int> c;
        for (const auto& m : cluster) c.push_back(intern(m));
        if (!c.empty()) out.key.push_back(std::move(c));
    }
    for (const auto& cluster : response.clusters) {
        std::vector<int> c;
        for (const auto& m : cluster) c.push_back(intern(m));
        if (!c.empty()) out.response.push_back(std::move(c));
    }
    int n = static_cast<int>(ids.size());
    out.key_of.assign(static_cast<std::size_t>(n), -1);
    out.response_of.assign(static_cast<std::size_t>(n), -1);
    for (std::size_t ci = 0; ci < out.key.size(); ++ci)
        for (int m : out.key[ci]) {
            if (out.key_of[static_cast<std::size_t>(m)] != -1)
                throw DataError("key clustering is not a partition (duplicate mention)");
            out.key_of[static_cast<std::size_t>(m)] = static_cast<int>(ci);
        }
    for (std::size_t ci = 0; ci < out.response.size(); ++ci)
        for (int m : out.response[ci]) {
            if (out.response_of[static_cast<std::size_t>(m)] != -1)
                throw DataError("response clustering is not a partition (duplicate mention)");
            out.response_of[static_cast<std::size_t>(m)] = static_cast<int>(ci);
        }
    // pad: unassigned mentions become singletons
    for (int m = 0; m < n; ++m) {
        if (out.key_of[static_cast<std::size_t>(m)] == -1) {
            out.key_of[static_cast<std::size_t>(m)] = static_cast<int>(out.key.size());
            out.key.push_back({m});
        }
        if (out.response_of[static_cast<std::size_t>(m)] == -1) {
            out.response_of[static_cast<std::size_t>(m)] = static_cast<int>(out.response.size());
            out.response.push_back({m});
        }
    }
    return out;
}

/// One MUC direction: sum(|K| - partitions(K)) / sum(|K| - 1).
inline double muc_direction(const std::vector<std::vector<int>>& key, const std::vector<int>& response_of) {
    double numerator = 0.0, denominator = 0.0;
    std::vector<char> seen;
    for (const auto& cluster : key) {
        if (cluster.size() < 2) continue;  // singletons contribute nothing
        std::map<int, char> partitions;
        for (int m : cluster) partitions.emplace(response_of[static_cast<std::size_t>(m)], 1);
        numerator += static_cast<double>(cluster.size() - partitions.size());
        denominator += static_cast<double>(cluster.size() - 1);
    }
    return denominator > 0.0 ? numerator / denominator : 0.0;
}

}  // namespace detail

/// MUC (Vilain et al. link-based metric).
inline PRF muc(const Clustering& key, const Clustering& response) {
    auto pp = detail::align_universe(key, response);
    double recall = detail::muc_direction(pp.key, pp.response_of);
    double precision = detail::muc_direction(pp.response, pp.key_of);
    return make_prf(precision, recall);
}

/// B-cubed: per-mention overlap ratios averaged over the universe.
inline PRF b_cubed(const Clustering& key, const Clustering& response) {
    auto pp = detail::align_universe(key, response);
    std::size_t n = pp.key_of.size();
    if (n == 0) return make_prf(0.0, 0.0);
    // overlap count per (key cluster, response cluster) cell
    std::map<std::pair<int, int>, double> cells;
    for (std::size_t m = 0; m < n; ++m) cells[{pp.key_of[m], pp.response_of[m]}] += 1.0;
    double recall = 0.0, precision = 0.0;
    for (const auto& [cell, count] : cells) {
        recall += count * count / static_cast<double>(pp.key[static_cast<std::size_t>(cell.first)].size());
        precision +=
            count * count / static_cast<double>(pp.response[static_cast<std::size_t>(cell.second)].size());
    }
    return make_prf(precision / static_cast<double>(n), recall / static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Maximum-weight bipartite matching (Kuhn-Munkres with potentials, O(n^3)).

struct AlignmentResult {
    // row -> column of the chosen matching; -1 for unmatched rows. Matches
    // carrying zero weight are reported as unmatched (they add nothing).
    std::vector<int> match;
    double total = 0.0;
};

inline AlignmentResult kuhn_munkres(const std::vector<std::vector<double>>& weights) {
    const std::size_t rows = weights.size();
    std::size_t cols = 0;
    for (const auto& row : weights) cols = std::max(cols, row.size());
    for (const auto& row : weights) {
        if (row.size() != cols && !row.empty())
            throw UsageError("kuhn_munkres: ragged weight matrix");
        for (double w : row) {
            if (!std::isfinite(w)) throw NumericError("kuhn_munkres: non-finite weight");
            if (w < 0.0) throw NumericError("kuhn_munkres: negative weight");
        }
    }
    AlignmentResult result;
    result.match.assign(rows, -1);
    if (rows == 0 || cols == 0) return result;

    // Square cost matrix: cost = -weight, zero padding.
    const std::size_t n = std::max(rows, cols);
    auto cost = [&](std::size_t i, std::size_t j) -> double {
        if (i < rows && j < weights[i].size()) return -weights[i][j];
        return 0.0;
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            std::size_t i0 = p[j0], j1 = 0;
            double delta = inf;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    for (std::size_t j = 1; j <= n; ++j) {
        std::size_t i = p[j];
        if (i == 0 || i > rows || j > cols) continue;
        double w = weights[i - 1].size() >= j ? weights[i - 1][j - 1] : 0.0;
        if (w > 0.0) {
            result.match[i - 1] = static_cast<int>(j - 1);
            result.total += w;
        }
    }
    return result;
}

/// CEAF_e: optimal one-to-one cluster alignment under
/// phi4(K,R) = 2|K∩R| / (|K|+|R|); recall = Phi/|key|, precision = Phi/|response|.
inline PRF ceaf_e(const Clustering& key, const Clustering& response) {
    auto pp = detail::align_universe(key, response);
    if (pp.key.empty() || pp.response.empty()) return make_prf(0.0, 0.0);
    std::vector<std::vector<double>> phi(pp.key.size(), std::vector<double>(pp.response.size(), 0.0));
    std::map<std::pair<int, int>, double> cells;
    for (std::size_t m = 0; m < pp.key_of.size(); ++m) cells[{pp.key_of[m], pp.response_of[m]}] += 1.0;
    for (const auto& [cell, count] : cells) {
        auto [ki, ri] = cell;
        phi[static_cast<std::size_t>(ki)][static_cast<std::size_t>(ri)] =
            2.0 * count /
            static_cast<double>(pp.key[static_cast<std::size_t>(ki)].size() +
                                pp.response[static_cast<std::size_t>(ri)].size());
    }
    double total = kuhn_munkres(phi).total;
    return make_prf(total / static_cast<double>(pp.response.size()),
                    total / static_cast<double>(pp.key.size()));
}

/// Arithmetic mean of the three F1 scores (any common scale).
inline double conll_f1(double muc_f1, double b3_f1, double ceafe_f1) {
    return (muc_f1 + b3_f1 + ceafe_f1) / 3.0;
}

// ---------------------------------------------------------------------------
// Pairwise intrinsic metrics

struct PairwiseMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy_all = 0.0;
    double accuracy_noncoref = 0.0;
    std::vector<std::string> degenerate;  // zero-denominator fields reported as 0
};

inline PairwiseMetrics pairwise_metrics(const ConfusionCounts& counts) {
    PairwiseMetrics out;
    auto ratio = [&](std::size_t num, std::size_t den, const char* name) {
        if (den == 0) {
            out.degenerate.push_back(name);
            return 0.0;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    out.precision = ratio(counts.tp, counts.tp + counts.fp, "precision");
    out.recall = ratio(counts.tp, counts.tp + counts.fn, "recall");
    out.f1 = (out.precision + out.recall) > 0.0
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    out.accuracy_all = ratio(counts.tp + counts.tn, counts.total(), "accuracy_all");
    out.accuracy_noncoref = ratio(counts.tn, counts.tn + counts.fp, "accuracy_noncoref");
    return out;
}

/// Classify every pair at the threshold (score >= threshold - epsilon) and
/// tabulate the confusion counts.
inline ConfusionCounts intrinsic_eval(const PairModel& model, const MentionTable& table,
                                      const std::vector<LabeledPair>& pairs, Scope scope,
                                      const Featurizer& featurizer, double threshold,
                                      double epsilon = 1e-9, int jobs = 1) {
    std::vector<char> predicted(pairs.size(), 0);
    detail::parallel_for(pairs.size(), jobs, [&](std::size_t i) {
        auto x = table.featurize(featurizer, pairs[i], scope);
        predicted[i] = predict(model, x) >= threshold - epsilon ? 1 : 0;
    });
    ConfusionCounts counts;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].coref)
            predicted[i] ? ++counts.tp : ++counts.fn;
        else
            predicted[i] ? ++counts.fp : ++counts.tn;
    }
    return counts;
}

}  // namespace ecoref
