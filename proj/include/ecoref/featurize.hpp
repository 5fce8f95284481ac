#pragma once

// Mention-pair featurization: two contextual blocks (head embedding, window
// embeddings, POS one-hot) plus quantized relational one-hots (sentence
// distance for WD, cosine, and three WordNet path similarities).

#include <cstdlib>
#include <string>
#include <vector>

#include "ecoref/corpus.hpp"
#include "ecoref/lexicon.hpp"

namespace ecoref {

inline const std::vector<std::string>& penn_tagset_with_unk() {
    static const std::vector<std::string> tags = {
        "CC", "CD",  "DT",  "EX",  "FW", "IN",   "JJ",  "JJR", "JJS", "LS",  "MD",  "NN",
        "NNS", "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM",
        "TO", "UH",  "VB",  "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP",  "WP$", "WRB",
        "$",  "``",  "''",  "(",   ")",   ",",   ".",   ":",   "#",   "UNK"};
    return tags;
}

struct FeatureConfig {
    int embedding_dim = 400;
    int window = 2;  // context words per side
    std::vector<std::string> pos_tagset = penn_tagset_with_unk();
    int buckets = 11;  // includes the unknown bucket
    int max_sentence_distance = 10;

    void validate() const {
        if (window < 0) throw UsageError("feature config: window must be >= 0");
        if (buckets < 2) throw UsageError("feature config: buckets must be >= 2");
        if (embedding_dim < 1) throw UsageError("feature config: embedding_dim must be >= 1");
        if (max_sentence_distance < 0) throw UsageError("feature config: max_sentence_distance must be >= 0");
        int unk = 0;
        for (const auto& t : pos_tagset)
            if (t == "UNK") ++unk;
        if (unk != 1) throw UsageError("feature config: pos_tagset must contain UNK exactly once");
    }

    int tagset_size() const { return static_cast<int>(pos_tagset.size()); }
    int ctx_block_length() const { return (1 + 2 * window) * embedding_dim + tagset_size(); }

    /// WD: 2*ctx + dist(max+1) + 4 quantized blocks; CD drops the distance.
    int vector_length(Scope scope) const {
        int len = 2 * ctx_block_length() + 4 * buckets;
        if (scope == Scope::WD) len += max_sentence_distance + 1;
        return len;
    }
};

/// Head-word heuristic for multi-token mentions: the first token of the span
/// with a verbal POS tag, else the last token. (Single-token spans are their
/// own head.)
inline int head_index_for(const TokenSpan& span, const Sentence& sentence) {
    if (span.start < 0 || span.end >= static_cast<int>(sentence.tokens.size()) || span.start > span.end)
        throw DataError("head_index_for: span outside sentence");
    if (span.start == span.end) return span.start;
    for (int i = span.start; i <= span.end; ++i) {
        const std::string& pos = sentence.tokens[static_cast<std::size_t>(i)].pos;
        if (pos.size() >= 2 && pos[0] == 'V' && pos[1] == 'B') return i;
    }
    return span.end;
}

inline const Token& head_word(const Mention& m, const Sentence& sentence) {
    if (m.head_index < 0 || m.head_index >= static_cast<int>(sentence.tokens.size()))
        throw DataError("mention " + m.id + ": head index outside sentence");
    return sentence.tokens[static_cast<std::size_t>(m.head_index)];
}

/// Bucket index for a similarity: equal-width bins over [0,1] with 1.0 in the
/// top known bin (buckets-2) and Unknown in the last bucket (buckets-1).
inline int quantize_index(SimilarityValue sim, int buckets) {
    if (buckets < 2) throw UsageError("quantize: buckets must be >= 2");
    if (!sim.is_known()) return buckets - 1;
    double v = sim.value();
    if (!(v >= 0.0 && v <= 1.0)) throw NumericError("quantize: value outside [0,1]");
    int idx = static_cast<int>(std::floor(v * (buckets - 1)));
    return std::min(idx, buckets - 2);
}

inline std::vector<double> quantize(SimilarityValue sim, int buckets) {
    std::vector<double> onehot(static_cast<std::size_t>(buckets), 0.0);
    onehot[static_cast<std::size_t>(quantize_index(sim, buckets))] = 1.0;
    return onehot;
}

namespace detail {

inline void append_onehot(std::vector<double>& out, int size, int index) {
    for (int i = 0; i < size; ++i) out.push_back(i == index ? 1.0 : 0.0);
}

inline void append_embedding(std::vector<double>& out, const std::vector<double>* vec, int dim) {
    if (vec) out.insert(out.end(), vec->begin(), vec->end());
    else out.insert(out.end(), static_cast<std::size_t>(dim), 0.0);
}

}  // namespace detail

/// Contextual block of one mention: [head | left_w .. left_1 | right_1 ..
/// right_w | pos one-hot]. Window slots hold the nearest in-vocabulary words
/// scanning outward from the head; slots left unfilled are zero vectors.
inline std::vector<double> contextual_features(const Mention& m, const Sentence& sentence,
                                               const EmbeddingStore& embeddings,
                                               const FeatureConfig& config) {
    if (embeddings.dim() != config.embedding_dim)
        throw UsageError("embedding store dimension " + std::to_string(embeddings.dim()) +
                         " does not match feature config " + std::to_string(config.embedding_dim));
    const Token& head = head_word(m, sentence);
    const int dim = config.embedding_dim;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(config.ctx_block_length()));
    detail::append_embedding(out, embeddings.lookup(head.text), dim);

    std::vector<const std::vector<double>*> left(static_cast<std::size_t>(config.window), nullptr);
    std::vector<const std::vector<double>*> right(static_cast<std::size_t>(config.window), nullptr);
    int found = 0;
    for (int i = m.head_index - 1; i >= 0 && found < config.window; --i)
        if (const auto* vec = embeddings.lookup(sentence.tokens[static_cast<std::size_t>(i)].text))
            left[static_cast<std::size_t>(found++)] = vec;
    found = 0;
    for (int i = m.head_index + 1; i < static_cast<int>(sentence.tokens.size()) && found < config.window; ++i)
        if (const auto* vec = embeddings.lookup(sentence.tokens[static_cast<std::size_t>(i)].text))
            right[static_cast<std::size_t>(found++)] = vec;

    // left_w first, nearest-left last, then rights nearest-first
    for (int k = config.window - 1; k >= 0; --k) detail::append_embedding(out, left[static_cast<std::size_t>(k)], dim);
    for (int k = 0; k < config.window; ++k) detail::append_embedding(out, right[static_cast<std::size_t>(k)], dim);

    int pos_index = -1, unk_index = 0;
    for (int i = 0; i < config.tagset_size(); ++i) {
        const std::string& tag = config.pos_tagset[static_cast<std::size_t>(i)];
        if (tag == head.pos) pos_index = i;
        if (tag == "UNK") unk_index = i;
    }
    detail::append_onehot(out, config.tagset_size(), pos_index >= 0 ? pos_index : unk_index);
    return out;
}

/// Relational block: for WD a one-hot of the clipped sentence distance, then
/// the quantized cosine of the head embeddings and the three quantized
/// WordNet similarities of the head lemmas. CD omits the distance block.
inline std::vector<double> relational_features(const Document& d1, const Mention& m1,
                                               const Document& d2, const Mention& m2,
                                               const EmbeddingStore& embeddings,
                                               const WordNetStore& wordnet, Scope scope,
                                               const FeatureConfig& config) {
    std::vector<double> out;
    if (scope == Scope::WD) {
        if (d1.doc_id != d2.doc_id)
            throw UsageError("WD relational features require mentions of one document");
        int dist = std::min(std::abs(m1.sentence_index - m2.sentence_index), config.max_sentence_distance);
        detail::append_onehot(out, config.max_sentence_distance + 1, dist);
    }
    const Token& h1 = head_word(m1, d1.sentence_of(m1));
    const Token& h2 = head_word(m2, d2.sentence_of(m2));

    const auto* e1 = embeddings.lookup(h1.text);
    const auto* e2 = embeddings.lookup(h2.text);
    SimilarityValue cos = (e1 && e2) ? cosine_similarity(*e1, *e2) : SimilarityValue::unknown();
    for (double x : quantize(cos, config.buckets)) out.push_back(x);
    for (double x : quantize(wordnet.max_sense_path_similarity(h1.lemma, h2.lemma), config.buckets))
        out.push_back(x);
    for (double x : quantize(wordnet.hypernym_path_similarity(h1.lemma, h2.lemma), config.buckets))
        out.push_back(x);
    for (double x : quantize(wordnet.derivational_verb_path_similarity(h1.lemma, h2.lemma), config.buckets))
        out.push_back(x);
    return out;
}

/// Full pair vector: [ctx(m1) | ctx(m2) | relational].
inline std::vector<double> pair_features(const Document& d1, const Mention& m1, const Document& d2,
                                         const Mention& m2, const EmbeddingStore& embeddings,
                                         const WordNetStore& wordnet, Scope scope,
                                         const FeatureConfig& config) {
    std::vector<double> out = contextual_features(m1, d1.sentence_of(m1), embeddings, config);
    std::vector<double> ctx2 = contextual_features(m2, d2.sentence_of(m2), embeddings, config);
    out.insert(out.end(), ctx2.begin(), ctx2.end());
    std::vector<double> rel = relational_features(d1, m1, d2, m2, embeddings, wordnet, scope, config);
    out.insert(out.end(), rel.begin(), rel.end());
    return out;
}

/// Bundles the stores and config behind one call; used by training, graph
/// building, and the CLI.
struct Featurizer {
    const EmbeddingStore* embeddings = nullptr;
    const WordNetStore* wordnet = nullptr;
    FeatureConfig config;

    int input_dim(Scope scope) const { return config.vector_length(scope); }

    std::vector<double> pair(const Document& d1, const Mention& m1, const Document& d2,
                             const Mention& m2, Scope scope) const {
        return pair_features(d1, m1, d2, m2, *embeddings, *wordnet, scope, config);
    }
};

}  // namespace ecoref
