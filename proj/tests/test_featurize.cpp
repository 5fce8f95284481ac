#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <sstream>

#include "ecoref/featurize.hpp"
#include "support/fixtures.hpp"

using namespace ecoref;

namespace {

FeatureConfig small_config() {
    FeatureConfig cfg;
    cfg.embedding_dim = 4;
    cfg.window = 2;
    cfg.pos_tagset = {"VB", "NN", "UNK"};
    cfg.buckets = 11;
    cfg.max_sentence_distance = 10;
    return cfg;
}

EmbeddingStore store_with(const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
    EmbeddingStore s;
    for (const auto& [w, v] : rows) s.insert(w, v);
    return s;
}

Document one_sentence_doc(const std::vector<fixtures::TokenSpec>& tokens) {
    Document d;
    d.doc_id = "1_1ecb";
    d.topic = 1;
    d.sentences.push_back(fixtures::make_sentence(0, tokens));
    return d;
}

}  // namespace

TEST_CASE("head word heuristic") {
    Sentence s = fixtures::make_sentence(
        0, {{"checked", "VBD"}, {"into", "IN"}, {"injured", "JJ"}, {"reserve", "NN"}});
    REQUIRE(head_index_for({0, 1}, s) == 0);  // first verbal token
    REQUIRE(head_index_for({1, 1}, s) == 1);  // single token is its own head
    REQUIRE(head_index_for({2, 3}, s) == 3);  // no verb: last token
}

TEST_CASE("quantize buckets") {
    REQUIRE(quantize_index(SimilarityValue::known(0.0), 11) == 0);
    REQUIRE(quantize_index(SimilarityValue::known(1.0), 11) == 9);
    REQUIRE(quantize_index(SimilarityValue::unknown(), 11) == 10);
    REQUIRE(quantize_index(SimilarityValue::known(0.95), 11) == 9);
    REQUIRE(quantize_index(SimilarityValue::known(0.5), 11) == 5);
    REQUIRE_THROWS_AS(quantize_index(SimilarityValue{1.5}, 11), NumericError);
    REQUIRE_THROWS_AS(quantize_index(SimilarityValue::known(0.5), 1), UsageError);

    SECTION("one-hot shape") {
        auto onehot = quantize(SimilarityValue::known(0.42), 11);
        REQUIRE(onehot.size() == 11);
        REQUIRE(std::accumulate(onehot.begin(), onehot.end(), 0.0) == 1.0);
    }
    SECTION("monotone in the value") {
        for (int buckets : {2, 3, 11}) {
            int prev = 0;
            for (double v = 0.0; v <= 1.0; v += 0.01) {
                int idx = quantize_index(SimilarityValue::known(v), buckets);
                REQUIRE(idx >= prev);
                REQUIRE(idx <= buckets - 2);
                prev = idx;
            }
        }
    }
}

TEST_CASE("contextual features") {
    FeatureConfig cfg = small_config();
    std::vector<double> e1{1, 0, 0, 0}, e2{0, 1, 0, 0}, e3{0, 0, 1, 0}, e4{0, 0, 0, 1},
        e5{0.5, 0.5, 0, 0};

    SECTION("all window words in vocabulary") {
        EmbeddingStore store = store_with({{"a", e1}, {"b", e2}, {"HEAD", e3}, {"c", e4}, {"d", e5}});
        Document d = one_sentence_doc({{"a"}, {"b"}, {"HEAD", "VB"}, {"c"}, {"d"}});
        Mention m = fixtures::make_mention("m", d.doc_id, 0, 2, 2, 2);
        auto ctx = contextual_features(m, d.sentences[0], store, cfg);
        REQUIRE(static_cast<int>(ctx.size()) == cfg.ctx_block_length());
        // layout: head | left2 | left1 | right1 | right2 | pos
        std::vector<double> expected;
        for (const auto& block : {e3, e1, e2, e4, e5}) expected.insert(expected.end(), block.begin(), block.end());
        expected.insert(expected.end(), {1.0, 0.0, 0.0});  // VB
        REQUIRE(ctx == expected);
    }
    SECTION("head at sentence start leaves left slots zero") {
        EmbeddingStore store = store_with({{"HEAD", e3}, {"c", e4}});
        Document d = one_sentence_doc({{"HEAD", "VB"}, {"c"}});
        Mention m = fixtures::make_mention("m", d.doc_id, 0, 0, 0, 0);
        auto ctx = contextual_features(m, d.sentences[0], store, cfg);
        for (int i = 0; i < 8; ++i) REQUIRE(ctx[static_cast<std::size_t>(4 + i)] == 0.0);  // left2,left1
        REQUIRE(std::vector<double>(ctx.begin() + 12, ctx.begin() + 16) == e4);  // right1
    }
    SECTION("outward scan skips out-of-vocabulary neighbors") {
        EmbeddingStore store = store_with({{"far", e1}, {"HEAD", e3}});
        Document d = one_sentence_doc({{"far"}, {"oov"}, {"HEAD", "VB"}, {"alsooov"}, {"gone"}});
        Mention m = fixtures::make_mention("m", d.doc_id, 0, 2, 2, 2);
        auto ctx = contextual_features(m, d.sentences[0], store, cfg);
        // left1 gets "far" (nearest in-vocab scanning outward), left2 stays zero
        std::vector<double> left2(ctx.begin() + 4, ctx.begin() + 8);
        std::vector<double> left1(ctx.begin() + 8, ctx.begin() + 12);
        REQUIRE(left1 == e1);
        REQUIRE(left2 == std::vector<double>(4, 0.0));
    }
    SECTION("head missing from vocabulary becomes a zero block") {
        EmbeddingStore store = store_with({{"a", e1}});
        Document d = one_sentence_doc({{"a"}, {"HEAD", "XX"}});
        Mention m = fixtures::make_mention("m", d.doc_id, 0, 1, 1, 1);
        auto ctx = contextual_features(m, d.sentences[0], store, cfg);
        for (int i = 0; i < 4; ++i) REQUIRE(ctx[static_cast<std::size_t>(i)] == 0.0);
        // unknown POS tag maps to the UNK slot
        REQUIRE(ctx[ctx.size() - 1] == 1.0);
    }
}

TEST_CASE("relational features") {
    FeatureConfig cfg = small_config();
    WordNetStore wn = fixtures::small_wordnet();
    EmbeddingStore store = store_with({{"grab", {1, 0, 0, 0}}, {"nab", {0, 1, 0, 0}}});

    Document d = one_sentence_doc({{"grab", "VB"}, {"x"}});
    d.sentences.push_back(fixtures::make_sentence(1, {{"nab", "VB"}}));
    d.sentences.push_back(fixtures::make_sentence(2, {{"oovword", "VB"}}));
    Mention m0 = fixtures::make_mention("m0", d.doc_id, 0, 0, 0, 0);
    Mention m1 = fixtures::make_mention("m1", d.doc_id, 1, 0, 0, 0);
    Mention m2 = fixtures::make_mention("m2", d.doc_id, 2, 0, 0, 0);

    SECTION("same sentence puts distance in bucket 0") {
        auto rel = relational_features(d, m0, d, m0, store, wn, Scope::WD, cfg);
        REQUIRE(rel.size() == static_cast<std::size_t>(11 + 4 * 11));
        REQUIRE(rel[0] == 1.0);
    }
    SECTION("identical head words hit the top cosine and sense buckets") {
        auto rel = relational_features(d, m0, d, m0, store, wn, Scope::WD, cfg);
        REQUIRE(rel[11 + 9] == 1.0);       // cosine 1.0 -> bucket 9
        REQUIRE(rel[2 * 11 + 9] == 1.0);   // wn max sense 1.0 -> bucket 9
    }
    SECTION("OOV head word lands in the unknown cosine bucket") {
        auto rel = relational_features(d, m0, d, m2, store, wn, Scope::WD, cfg);
        REQUIRE(rel[11 + 10] == 1.0);
    }
    SECTION("distance clipping and the CD layout") {
        auto rel = relational_features(d, m0, d, m1, store, wn, Scope::WD, cfg);
        REQUIRE(rel[1] == 1.0);  // |0-1| = 1
        auto cd = relational_features(d, m0, d, m1, store, wn, Scope::CD, cfg);
        REQUIRE(cd.size() == static_cast<std::size_t>(4 * 11));  // no distance block
    }
    SECTION("WD scope across documents is an error") {
        Document other = one_sentence_doc({{"nab", "VB"}});
        other.doc_id = "1_2ecb";
        Mention mo = fixtures::make_mention("mo", other.doc_id, 0, 0, 0, 0);
        REQUIRE_THROWS_AS(relational_features(d, m0, other, mo, store, wn, Scope::WD, cfg),
                          UsageError);
    }
}

TEST_CASE("pair feature vector layout") {
    FeatureConfig cfg = small_config();  // D=4, tagset 3, buckets 11
    WordNetStore wn = fixtures::small_wordnet();
    EmbeddingStore store = store_with({{"grab", {1, 0, 0, 0}}, {"nab", {0, 1, 0, 0}}});
    Document d = one_sentence_doc({{"grab", "VB"}, {"nab", "VB"}});
    Mention m0 = fixtures::make_mention("m0", d.doc_id, 0, 0, 0, 0);
    Mention m1 = fixtures::make_mention("m1", d.doc_id, 0, 1, 1, 1);

    auto wd = pair_features(d, m0, d, m1, store, wn, Scope::WD, cfg);
    auto cd = pair_features(d, m0, d, m1, store, wn, Scope::CD, cfg);
    // 2*(5*4+3) + 11 + 4*11 = 101 and 2*23 + 44 = 90
    REQUIRE(wd.size() == 101);
    REQUIRE(cd.size() == 90);
    REQUIRE(static_cast<int>(wd.size()) == cfg.vector_length(Scope::WD));
    REQUIRE(static_cast<int>(cd.size()) == cfg.vector_length(Scope::CD));

    SECTION("determinism: identical inputs, identical bits") {
        REQUIRE(pair_features(d, m0, d, m1, store, wn, Scope::WD, cfg) == wd);
    }
    SECTION("relational blocks are symmetric under swap, contextual blocks trade places") {
        auto swapped = pair_features(d, m1, d, m0, store, wn, Scope::WD, cfg);
        std::size_t ctx = static_cast<std::size_t>(cfg.ctx_block_length());
        REQUIRE(std::vector<double>(wd.begin(), wd.begin() + ctx) ==
                std::vector<double>(swapped.begin() + ctx, swapped.begin() + 2 * ctx));
        REQUIRE(std::vector<double>(wd.begin() + 2 * ctx, wd.end()) ==
                std::vector<double>(swapped.begin() + 2 * ctx, swapped.end()));
    }
}

TEST_CASE("length formula and one-hot validity over random configs") {
    std::mt19937_64 rng(23);
    WordNetStore wn = fixtures::small_wordnet();
    for (int iter = 0; iter < 30; ++iter) {
        FeatureConfig cfg;
        cfg.embedding_dim = 1 + static_cast<int>(next_below(rng, 6));
        cfg.window = static_cast<int>(next_below(rng, 4));
        cfg.buckets = 2 + static_cast<int>(next_below(rng, 12));
        cfg.max_sentence_distance = static_cast<int>(next_below(rng, 12));
        cfg.pos_tagset = {"VB", "UNK"};
        if (next_below(rng, 2)) cfg.pos_tagset.push_back("NN");
        cfg.validate();

        std::vector<double> vec(static_cast<std::size_t>(cfg.embedding_dim), 0.5);
        EmbeddingStore store = store_with({{"grab", vec}, {"nab", vec}});
        Document d = one_sentence_doc({{"grab", "VB"}, {"nab", "VB"}});
        Mention m0 = fixtures::make_mention("m0", d.doc_id, 0, 0, 0, 0);
        Mention m1 = fixtures::make_mention("m1", d.doc_id, 0, 1, 1, 1);

        for (Scope scope : {Scope::WD, Scope::CD}) {
            auto v = pair_features(d, m0, d, m1, store, wn, scope, cfg);
            int ctx = (1 + 2 * cfg.window) * cfg.embedding_dim + static_cast<int>(cfg.pos_tagset.size());
            int expected = 2 * ctx + 4 * cfg.buckets +
                           (scope == Scope::WD ? cfg.max_sentence_distance + 1 : 0);
            REQUIRE(static_cast<int>(v.size()) == expected);
            REQUIRE(cfg.vector_length(scope) == expected);

            // every relational one-hot sums to exactly 1
            std::size_t off = static_cast<std::size_t>(2 * ctx);
            if (scope == Scope::WD) {
                double s = std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(off),
                                           v.begin() + static_cast<std::ptrdiff_t>(off) +
                                               cfg.max_sentence_distance + 1,
                                           0.0);
                REQUIRE(s == 1.0);
                off += static_cast<std::size_t>(cfg.max_sentence_distance + 1);
            }
            for (int block = 0; block < 4; ++block) {
                double s = std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(off),
                                           v.begin() + static_cast<std::ptrdiff_t>(off) + cfg.buckets, 0.0);
                REQUIRE(s == 1.0);
                off += static_cast<std::size_t>(cfg.buckets);
            }
            // POS one-hots inside the contextual blocks
            for (std::size_t base : {static_cast<std::size_t>(ctx) - cfg.pos_tagset.size(),
                                     2 * static_cast<std::size_t>(ctx) - cfg.pos_tagset.size()}) {
                double s = std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(base),
                                           v.begin() + static_cast<std::ptrdiff_t>(base + cfg.pos_tagset.size()),
                                           0.0);
                REQUIRE(s == 1.0);
            }
        }
    }
}

TEST_CASE("feature config validation") {
    FeatureConfig cfg = small_config();
    cfg.buckets = 1;
    REQUIRE_THROWS_AS(cfg.validate(), UsageError);
    cfg = small_config();
    cfg.pos_tagset = {"VB", "NN"};
    REQUIRE_THROWS_AS(cfg.validate(), UsageError);  // no UNK
    cfg = small_config();
    cfg.pos_tagset = {"UNK", "UNK"};
    REQUIRE_THROWS_AS(cfg.validate(), UsageError);
    REQUIRE(penn_tagset_with_unk().size() == 46);
}

TEST_CASE("embedding dimension must match the config") {
    FeatureConfig cfg = small_config();
    EmbeddingStore store = store_with({{"grab", {1, 0}}});  // dim 2, config wants 4
    Document d = one_sentence_doc({{"grab", "VB"}});
    Mention m = fixtures::make_mention("m", d.doc_id, 0, 0, 0, 0);
    REQUIRE_THROWS_AS(contextual_features(m, d.sentences[0], store, cfg), UsageError);
}
