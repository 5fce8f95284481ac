#pragma once

// Pairwise coreference classifiers: ReLU feedforward nets with a 2-way
// softmax head, trained with plain mini-batch SGD on softmax cross-entropy.
// Training-pair generation and the balanced negative-sampling policy live
// here too. Everything is 64-bit and deterministic for a fixed seed.

#include <array>
#include <cmath>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "ecoref/featurize.hpp"

namespace ecoref {

// ---------------------------------------------------------------------------
// Pair generation

struct LabeledPair {
    // indices into a MentionTable (document index, mention index)
    int d1 = 0, m1 = 0;
    int d2 = 0, m2 = 0;
    bool coref = false;
};

enum class PairMode { train, eval };
enum class NegativeSampling { balanced, actual };

inline NegativeSampling negative_sampling_from_string(const std::string& s) {
    if (s == "balanced") return NegativeSampling::balanced;
    if (s == "actual") return NegativeSampling::actual;
    throw UsageError("unknown negative_sampling: " + s);
}

inline std::string to_string(NegativeSampling s) {
    return s == NegativeSampling::balanced ? "balanced" : "actual";
}

/// Flat, textually ordered view of a corpus split used by pair generation,
/// featurization, and clustering.
struct MentionTable {
    const Corpus* corpus = nullptr;
    // (doc index, mention index), sorted by (doc_id, sentence, span, id)
    std::vector<std::pair<int, int>> order;

    explicit MentionTable(const Corpus& c) : corpus(&c) {
        for (int di = 0; di < static_cast<int>(c.documents.size()); ++di)
            for (int mi = 0; mi < static_cast<int>(c.documents[static_cast<std::size_t>(di)].mentions.size()); ++mi)
                order.emplace_back(di, mi);
        std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
            const Document& da = c.documents[static_cast<std::size_t>(a.first)];
            const Document& db = c.documents[static_cast<std::size_t>(b.first)];
            const Mention& ma = da.mentions[static_cast<std::size_t>(a.second)];
            const Mention& mb = db.mentions[static_cast<std::size_t>(b.second)];
            return std::tie(da.doc_id, ma.sentence_index, ma.span.start, ma.span.end, ma.id) <
                   std::tie(db.doc_id, mb.sentence_index, mb.span.start, mb.span.end, mb.id);
        });
    }

    std::size_t size() const { return order.size(); }

    const Document& doc(std::size_t i) const {
        return corpus->documents[static_cast<std::size_t>(order[i].first)];
    }
    const Mention& mention(std::size_t i) const {
        return doc(i).mentions[static_cast<std::size_t>(order[i].second)];
    }

    std::vector<double> featurize(const Featurizer& f, const LabeledPair& p, Scope scope) const {
        const Document& da = corpus->documents[static_cast<std::size_t>(p.d1)];
        const Document& db = corpus->documents[static_cast<std::size_t>(p.d2)];
        return f.pair(da, da.mentions[static_cast<std::size_t>(p.m1)], db,
                      db.mentions[static_cast<std::size_t>(p.m2)], scope);
    }
};

/// All labeled mention pairs of a split. Positives are every coreferent pair
/// in scope. Eval negatives are every in-scope non-coreferent pair (WD:
/// within a document, CD: within a sub-topic). Train negatives are the
/// subset whose mentions share a sentence or whose sentences also contain a
/// coreferent pair. Output order is deterministic (textual order).
inline std::vector<LabeledPair> generate_pairs(const MentionTable& table, Scope scope, PairMode mode) {
    std::vector<LabeledPair> out;

    auto chain_of = [&](std::size_t i) -> const std::optional<std::string>& {
        const Mention& m = table.mention(i);
        return scope == Scope::WD ? m.wd_chain : m.cd_chain;
    };
    auto same_chain = [&](std::size_t i, std::size_t j) {
        const auto& a = chain_of(i);
        const auto& b = chain_of(j);
        return a && b && *a == *b;
    };
    // group pairs by WD: document / CD: topic; negatives for CD stay within a
    // sub-topic
    auto in_group = [&](std::size_t i, std::size_t j) {
        if (scope == Scope::WD) return table.doc(i).doc_id == table.doc(j).doc_id;
        return table.doc(i).topic == table.doc(j).topic;
    };
    auto negative_scope = [&](std::size_t i, std::size_t j) {
        if (scope == Scope::WD) return true;  // already same document
        return table.doc(i).sub_topic == table.doc(j).sub_topic;
    };

    // Sentence pairs that contain a coreferent pair, for the train filter.
    std::set<std::pair<std::pair<std::string, int>, std::pair<std::string, int>>> linked_sentences;
    auto sentence_key = [&](std::size_t i) {
        return std::make_pair(table.doc(i).doc_id, table.mention(i).sentence_index);
    };
    if (mode == PairMode::train) {
        for (std::size_t i = 0; i < table.size(); ++i)
            for (std::size_t j = i + 1; j < table.size(); ++j) {
                if (!in_group(i, j) || !same_chain(i, j)) continue;
                auto a = sentence_key(i), b = sentence_key(j);
                if (b < a) std::swap(a, b);
                linked_sentences.emplace(a, b);
            }
    }

    for (std::size_t i = 0; i < table.size(); ++i) {
        for (std::size_t j = i + 1; j < table.size(); ++j) {
            if (!in_group(i, j)) continue;
            LabeledPair pair{table.order[i].first, table.order[i].second,
                             table.order[j].first, table.order[j].second, false};
            if (same_chain(i, j)) {
                pair.coref = true;
                out.push_back(pair);
                continue;
            }
            if (!negative_scope(i, j)) continue;
            if (mode == PairMode::train) {
                auto a = sentence_key(i), b = sentence_key(j);
                bool same_sentence = a == b;
                if (b < a) std::swap(a, b);
                if (!same_sentence && !linked_sentences.count({a, b})) continue;
            }
            out.push_back(pair);
        }
    }
    return out;
}

/// All positives plus an equal-size uniform sample of negatives (without
/// replacement, seeded). When negatives run short, all are kept and *warned
/// is set.
inline std::vector<LabeledPair> sample_balanced(const std::vector<LabeledPair>& pairs,
                                                std::uint64_t seed, bool* warned = nullptr) {
    std::vector<LabeledPair> positives, negatives;
    for (const LabeledPair& p : pairs) (p.coref ? positives : negatives).push_back(p);
    if (warned) *warned = negatives.size() < positives.size();
    std::vector<LabeledPair> out = positives;
    if (negatives.size() <= positives.size()) {
        out.insert(out.end(), negatives.begin(), negatives.end());
        return out;
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> picked = sample_indices(negatives.size(), positives.size(), rng);
    std::sort(picked.begin(), picked.end());  // keep textual order
    for (std::size_t idx : picked) out.push_back(negatives[idx]);
    return out;
}

// ---------------------------------------------------------------------------
// Model

struct Architecture {
    int input_dim = 0;
    std::vector<int> hidden_sizes;  // output layer is fixed at 2

    void validate() const {
        if (input_dim < 1) throw UsageError("architecture: input_dim must be >= 1");
        for (int h : hidden_sizes)
            if (h < 1) throw UsageError("architecture: hidden sizes must be >= 1");
    }

    std::vector<std::pair<int, int>> layer_shapes() const {  // (rows, cols)
        std::vector<std::pair<int, int>> shapes;
        int prev = input_dim;
        for (int h : hidden_sizes) {
            shapes.emplace_back(h, prev);
            prev = h;
        }
        shapes.emplace_back(2, prev);
        return shapes;
    }
};

struct PairModel {
    struct Layer {
        int rows = 0, cols = 0;
        std::vector<double> w;  // row-major rows x cols
        std::vector<double> b;  // rows
    };

    Architecture arch;
    std::uint64_t rng_seed = 0;
    std::vector<Layer> layers;

    /// Glorot-uniform weights, zero biases.
    static PairModel init(const Architecture& arch, std::uint64_t seed) {
        arch.validate();
        PairModel model;
        model.arch = arch;
        model.rng_seed = seed;
        std::mt19937_64 rng(seed);
        for (auto [rows, cols] : arch.layer_shapes()) {
            Layer layer;
            layer.rows = rows;
            layer.cols = cols;
            double limit = std::sqrt(6.0 / (rows + cols));
            layer.w.resize(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
            for (double& w : layer.w) w = next_uniform(rng, -limit, limit);
            layer.b.assign(static_cast<std::size_t>(rows), 0.0);
            model.layers.push_back(std::move(layer));
        }
        return model;
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const Layer& l : layers) n += l.w.size() + l.b.size();
        return n;
    }
};

namespace detail {

inline void affine(const PairModel::Layer& layer, std::span<const double> x, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(layer.rows), 0.0);
    for (int r = 0; r < layer.rows; ++r) {
        const double* wr = layer.w.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(layer.cols);
        double acc = layer.b[static_cast<std::size_t>(r)];
        for (int c = 0; c < layer.cols; ++c) acc += wr[c] * x[static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(r)] = acc;
    }
}

/// Forward pass keeping post-activation values of every layer (needed by
/// backprop). activations[0] is the input copy; the last entry is the logits.
inline std::vector<std::vector<double>> forward_trace(const PairModel& model, std::span<const double> x) {
    if (static_cast<int>(x.size()) != model.arch.input_dim)
        throw UsageError("forward: input has dimension " + std::to_string(x.size()) + ", model expects " +
                         std::to_string(model.arch.input_dim));
    std::vector<std::vector<double>> activations;
    activations.emplace_back(x.begin(), x.end());
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        std::vector<double> z;
        affine(model.layers[li], activations.back(), z);
        if (li + 1 < model.layers.size())
            for (double& v : z) v = v > 0.0 ? v : 0.0;  // ReLU on hidden layers
        activations.push_back(std::move(z));
    }
    return activations;
}

inline std::array<double, 2> softmax2(const std::vector<double>& logits) {
    double m = std::max(logits[0], logits[1]);
    double e0 = std::exp(logits[0] - m);
    double e1 = std::exp(logits[1] - m);
    double sum = e0 + e1;
    return {e0 / sum, e1 / sum};
}

}  // namespace detail

/// Class probabilities (p_noncoref, p_coref).
inline std::array<double, 2> forward(const PairModel& model, std::span<const double> x) {
    auto activations = detail::forward_trace(model, x);
    return detail::softmax2(activations.back());
}

/// Coreference probability of a featurized pair.
inline double predict(const PairModel& model, std::span<const double> x) { return forward(model, x)[1]; }

inline constexpr double kLossClamp = 1e-12;

/// Negative log-likelihood of the gold label; probability clamped below at
/// 1e-12.
inline double loss(const std::array<double, 2>& probs, int label) {
    if (label != 0 && label != 1) throw UsageError("loss: label must be 0 or 1");
    double p = std::max(probs[static_cast<std::size_t>(label)], kLossClamp);
    return -std::log(p);
}

namespace detail {

/// Preallocated buffers for the training loop; one workspace serves any
/// number of accumulate_gradients calls on models of one architecture.
struct Workspace {
    std::vector<std::vector<double>> acts;    // acts[li] = input of layer li; back() = logits
    std::vector<std::vector<double>> deltas;  // deltas[li] = dL/d(output of layer li)
    std::vector<int> touched;                 // first-layer columns with gradient mass

    void resize(const PairModel& model) {
        acts.assign(model.layers.size() + 1, {});
        deltas.assign(model.layers.size(), {});
        acts[0].resize(static_cast<std::size_t>(model.arch.input_dim));
        for (std::size_t li = 0; li < model.layers.size(); ++li) {
            acts[li + 1].resize(static_cast<std::size_t>(model.layers[li].rows));
            deltas[li].resize(static_cast<std::size_t>(model.layers[li].rows));
        }
        touched.clear();
    }
};

/// Column indices of the nonzero entries of a feature vector. Pair vectors
/// are dominated by one-hot blocks, so skipping exact zeros (which add
/// nothing, bit for bit) saves most of the first-layer work.
inline std::vector<int> nonzero_columns(std::span<const double> x) {
    std::vector<int> nz;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != 0.0) nz.push_back(static_cast<int>(i));
    return nz;
}

/// Backprop of the clamped cross-entropy loss; accumulates gradients into
/// grads (same shapes as the model layers). Returns the loss. When the clamp
/// is active the loss is locally constant, so the gradient contribution is
/// zero, keeping analytic and numeric gradients consistent. `nonzero`, when
/// given, lists the nonzero columns of x; ws.touched collects the first-layer
/// columns that received gradient (for the sparse update path).
inline double accumulate_gradients(const PairModel& model, std::span<const double> x, int label,
                                   std::vector<PairModel::Layer>& grads, Workspace& ws,
                                   const std::vector<int>* nonzero = nullptr) {
    if (static_cast<int>(x.size()) != model.arch.input_dim)
        throw UsageError("train: input dimension mismatch");
    const std::size_t layer_count = model.layers.size();
    for (std::size_t li = 0; li < layer_count; ++li) {
        const PairModel::Layer& layer = model.layers[li];
        const double* in = li == 0 ? x.data() : ws.acts[li].data();
        double* out = ws.acts[li + 1].data();
        const bool hidden = li + 1 < layer_count;
        for (int r = 0; r < layer.rows; ++r) {
            const double* wr = layer.w.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(layer.cols);
            double acc = layer.b[static_cast<std::size_t>(r)];
            if (li == 0 && nonzero) {
                for (int col : *nonzero) acc += wr[col] * in[col];
            } else {
                for (int col = 0; col < layer.cols; ++col) acc += wr[col] * in[col];
            }
            out[r] = hidden && acc < 0.0 ? 0.0 : acc;
        }
    }

    const std::vector<double>& logits = ws.acts[layer_count];
    std::array<double, 2> probs = {0.0, 0.0};
    {
        double m = std::max(logits[0], logits[1]);
        double e0 = std::exp(logits[0] - m), e1 = std::exp(logits[1] - m);
        probs = {e0 / (e0 + e1), e1 / (e0 + e1)};
    }
    double ll = loss(probs, label);
    if (probs[static_cast<std::size_t>(label)] <= kLossClamp) return ll;

    std::vector<double>& top = ws.deltas[layer_count - 1];
    top[0] = probs[0];
    top[1] = probs[1];
    top[static_cast<std::size_t>(label)] -= 1.0;

    for (int li = static_cast<int>(layer_count) - 1; li >= 0; --li) {
        const PairModel::Layer& layer = model.layers[static_cast<std::size_t>(li)];
        PairModel::Layer& grad = grads[static_cast<std::size_t>(li)];
        const double* in = li == 0 ? x.data() : ws.acts[static_cast<std::size_t>(li)].data();
        const double* delta = ws.deltas[static_cast<std::size_t>(li)].data();
        for (int r = 0; r < layer.rows; ++r) {
            const double d = delta[r];
            grad.b[static_cast<std::size_t>(r)] += d;
            double* gw = grad.w.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(layer.cols);
            if (li == 0 && nonzero) {
                for (int col : *nonzero) gw[col] += d * in[col];
            } else {
                for (int col = 0; col < layer.cols; ++col) gw[col] += d * in[col];
            }
        }
        if (li == 0) {
            if (nonzero)
                for (int col : *nonzero) ws.touched.push_back(col);
            break;
        }
        double* prev = ws.deltas[static_cast<std::size_t>(li - 1)].data();
        for (int col = 0; col < layer.cols; ++col) {
            // ReLU mask: the stored activation is post-ReLU
            if (in[col] <= 0.0) {
                prev[col] = 0.0;
                continue;
            }
            double acc = 0.0;
            for (int r = 0; r < layer.rows; ++r)
                acc += layer.w[static_cast<std::size_t>(r) * static_cast<std::size_t>(layer.cols) +
                               static_cast<std::size_t>(col)] *
                       delta[r];
            prev[col] = acc;
        }
    }
    return ll;
}

inline double accumulate_gradients(const PairModel& model, std::span<const double> x, int label,
                                   std::vector<PairModel::Layer>& grads) {
    Workspace ws;
    ws.resize(model);
    return accumulate_gradients(model, x, label, grads, ws);
}

inline std::vector<PairModel::Layer> zero_like(const PairModel& model) {
    std::vector<PairModel::Layer> grads;
    for (const auto& layer : model.layers) {
        PairModel::Layer g;
        g.rows = layer.rows;
        g.cols = layer.cols;
        g.w.assign(layer.w.size(), 0.0);
        g.b.assign(layer.b.size(), 0.0);
        grads.push_back(std::move(g));
    }
    return grads;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
    double learning_rate = 0.01;
    int epochs = 20;
    int batch_size = 32;
    std::uint64_t seed = 0;
    NegativeSampling sampling = NegativeSampling::balanced;

    void validate() const {
        if (!(learning_rate > 0.0)) throw UsageError("train config: learning_rate must be > 0");
        if (epochs < 1) throw UsageError("train config: epochs must be >= 1");
        if (batch_size < 1) throw UsageError("train config: batch_size must be >= 1");
    }
};

struct TrainSet {
    std::vector<std::vector<double>> x;
    std::vector<int> y;  // 1 = coref
};

struct TrainResult {
    PairModel model;
    std::vector<double> epoch_mean_loss;
    std::vector<std::string> warnings;
};

/// Mini-batch SGD. Deterministic for a fixed seed: initialization and the
/// per-epoch shuffles both derive from config.seed.
inline TrainResult train(const Architecture& arch, const TrainSet& data, const TrainConfig& config) {
    config.validate();
    arch.validate();
    if (data.x.empty()) throw UsageError("train: empty training set");
    if (data.x.size() != data.y.size()) throw UsageError("train: feature/label size mismatch");
    for (const auto& row : data.x)
        if (static_cast<int>(row.size()) != arch.input_dim)
            throw UsageError("train: feature row does not match architecture input_dim");

    TrainResult result;
    std::size_t pos = 0;
    for (int label : data.y) pos += static_cast<std::size_t>(label == 1);
    if (pos == 0 || pos == data.y.size())
        result.warnings.push_back("training set contains a single class");

    result.model = PairModel::init(arch, derive_seed(config.seed, "init"));
    PairModel& model = result.model;

    std::mt19937_64 shuffle_rng(derive_seed(config.seed, "shuffle"));
    std::vector<std::size_t> order(data.x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<PairModel::Layer> grads = detail::zero_like(model);
    detail::Workspace ws;
    ws.resize(model);

    // Pair vectors are mostly one-hot blocks; the first layer is updated
    // sparsely over the columns a batch actually touches. Skipping exact
    // zeros is arithmetically identical to the dense sweep.
    std::vector<std::vector<int>> nonzero(data.x.size());
    for (std::size_t i = 0; i < data.x.size(); ++i) nonzero[i] = detail::nonzero_columns(data.x[i]);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_deterministic(order, shuffle_rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
            std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            for (std::size_t li = 1; li < grads.size(); ++li) {
                std::fill(grads[li].w.begin(), grads[li].w.end(), 0.0);
                std::fill(grads[li].b.begin(), grads[li].b.end(), 0.0);
            }
            std::fill(grads[0].b.begin(), grads[0].b.end(), 0.0);
            ws.touched.clear();

            double batch_loss = 0.0;
            for (std::size_t k = start; k < stop; ++k) {
                std::size_t i = order[k];
                batch_loss += detail::accumulate_gradients(model, data.x[i], data.y[i], grads, ws,
                                                           &nonzero[i]);
            }
            if (!std::isfinite(batch_loss))
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   ", batch starting at " + std::to_string(start));
            epoch_loss += batch_loss;

            const double scale = config.learning_rate / static_cast<double>(stop - start);
            std::sort(ws.touched.begin(), ws.touched.end());
            ws.touched.erase(std::unique(ws.touched.begin(), ws.touched.end()), ws.touched.end());
            PairModel::Layer& first = model.layers[0];
            for (int col : ws.touched) {
                for (int r = 0; r < first.rows; ++r) {
                    std::size_t idx = static_cast<std::size_t>(r) * static_cast<std::size_t>(first.cols) +
                                      static_cast<std::size_t>(col);
                    first.w[idx] -= scale * grads[0].w[idx];
                    grads[0].w[idx] = 0.0;
                }
            }
            for (std::size_t i = 0; i < first.b.size(); ++i) first.b[i] -= scale * grads[0].b[i];
            for (std::size_t li = 1; li < model.layers.size(); ++li) {
                PairModel::Layer& layer = model.layers[li];
                const PairModel::Layer& g = grads[li];
                for (std::size_t i = 0; i < layer.w.size(); ++i) layer.w[i] -= scale * g.w[i];
                for (std::size_t i = 0; i < layer.b.size(); ++i) layer.b[i] -= scale * g.b[i];
            }
        }
        result.epoch_mean_loss.push_back(epoch_loss / static_cast<double>(order.size()));
    }
    return result;
}

/// Max relative error between analytic gradients and central finite
/// differences over every parameter. The denominator has an absolute floor
/// so that near-zero gradient pairs compare on absolute error.
inline double gradient_check(const PairModel& model, std::span<const double> x, int label,
                             double epsilon = 1e-5) {
    if (!(epsilon > 0.0)) throw UsageError("gradient_check: epsilon must be > 0");
    PairModel probe = model;
    std::vector<PairModel::Layer> grads = detail::zero_like(probe);
    detail::accumulate_gradients(probe, x, label, grads);

    double max_rel = 0.0;
    auto check_param = [&](double& param, double analytic) {
        const double saved = param;
        param = saved + epsilon;
        double up = loss(forward(probe, x), label);
        param = saved - epsilon;
        double down = loss(forward(probe, x), label);
        param = saved;
        double numeric = (up - down) / (2.0 * epsilon);
        double rel = std::abs(analytic - numeric) /
                     std::max(1e-6, std::abs(analytic) + std::abs(numeric));
        max_rel = std::max(max_rel, rel);
    };
    for (std::size_t li = 0; li < probe.layers.size(); ++li) {
        for (std::size_t i = 0; i < probe.layers[li].w.size(); ++i)
            check_param(probe.layers[li].w[i], grads[li].w[i]);
        for (std::size_t i = 0; i < probe.layers[li].b.size(); ++i)
            check_param(probe.layers[li].b[i], grads[li].b[i]);
    }
    return max_rel;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::ordered_json model_to_json(const PairModel& model, const std::string& scope_name) {
    nlohmann::ordered_json j;
    j["format"] = "pairmodel-v1";
    j["scope"] = scope_name;
    j["architecture"] = {{"input_dim", model.arch.input_dim}, {"hidden_sizes", model.arch.hidden_sizes}};
    j["seed"] = model.rng_seed;
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (const auto& layer : model.layers) {
        nlohmann::ordered_json lj;
        lj["rows"] = layer.rows;
        lj["cols"] = layer.cols;
        lj["w"] = layer.w;
        lj["b"] = layer.b;
        layers.push_back(std::move(lj));
    }
    j["layers"] = std::move(layers);
    return j;
}

inline PairModel model_from_json(const nlohmann::ordered_json& j, std::string* scope_name = nullptr) {
    try {
        if (j.at("format").get<std::string>() != "pairmodel-v1")
            throw DataError("model file: unknown format");
        PairModel model;
        model.arch.input_dim = j.at("architecture").at("input_dim").get<int>();
        model.arch.hidden_sizes = j.at("architecture").at("hidden_sizes").get<std::vector<int>>();
        model.arch.validate();
        model.rng_seed = j.at("seed").get<std::uint64_t>();
        if (scope_name) *scope_name = j.at("scope").get<std::string>();
        auto shapes = model.arch.layer_shapes();
        const auto& layers = j.at("layers");
        if (layers.size() != shapes.size()) throw DataError("model file: wrong layer count");
        for (std::size_t li = 0; li < shapes.size(); ++li) {
            PairModel::Layer layer;
            layer.rows = layers[li].at("rows").get<int>();
            layer.cols = layers[li].at("cols").get<int>();
            if (layer.rows != shapes[li].first || layer.cols != shapes[li].second)
                throw DataError("model file: layer " + std::to_string(li) + " shape mismatch");
            layer.w = layers[li].at("w").get<std::vector<double>>();
            layer.b = layers[li].at("b").get<std::vector<double>>();
            if (layer.w.size() != static_cast<std::size_t>(layer.rows) * static_cast<std::size_t>(layer.cols) ||
                layer.b.size() != static_cast<std::size_t>(layer.rows))
                throw DataError("model file: layer " + std::to_string(li) + " parameter count mismatch");
            model.layers.push_back(std::move(layer));
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
}

}  // namespace ecoref
