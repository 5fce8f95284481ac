#pragma once

// In-memory corpus model: tokenized documents with gold event mentions and
// their within-document / cross-document coreference chain labels.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ecoref/util.hpp"

namespace ecoref {

struct Token {
    int index = 0;      // 0-based position in sentence
    std::string text;   // surface form, non-empty
    std::string lemma;  // lowercase lemma
    std::string pos;    // POS tag, "UNK" when untagged
};

struct Sentence {
    int index = 0;  // 0-based position in document
    std::vector<Token> tokens;
};

struct TokenSpan {
    int start = 0;  // inclusive
    int end = 0;    // inclusive
};

struct Mention {
    std::string id;  // globally unique
    std::string doc_id;
    int sentence_index = 0;
    TokenSpan span;
    int head_index = 0;  // token index of the head word, within span
    std::optional<std::string> wd_chain;
    std::optional<std::string> cd_chain;
};

enum class SubTopic { ecb, ecbplus };

inline std::string to_string(SubTopic s) { return s == SubTopic::ecb ? "ecb" : "ecbplus"; }

inline SubTopic sub_topic_from_string(const std::string& s) {
    if (s == "ecb") return SubTopic::ecb;
    if (s == "ecbplus") return SubTopic::ecbplus;
    throw DataError("unknown sub_topic: " + s);
}

struct Document {
    std::string doc_id;
    int topic = 0;
    SubTopic sub_topic = SubTopic::ecb;
    std::vector<Sentence> sentences;
    std::vector<Mention> mentions;

    const Sentence& sentence_of(const Mention& m) const {
        if (m.sentence_index < 0 || m.sentence_index >= static_cast<int>(sentences.size()))
            throw DataError("mention " + m.id + ": sentence index out of range");
        return sentences[static_cast<std::size_t>(m.sentence_index)];
    }
};

enum class Scope { WD, CD };

inline std::string to_string(Scope s) { return s == Scope::WD ? "wd" : "cd"; }

/// Inclusive topic ranges for the three splits.
struct SplitConfig {
    std::pair<int, int> train{1, 22};
    std::pair<int, int> dev{23, 25};
    std::pair<int, int> test{26, 45};
};

struct Corpus {
    std::vector<Document> documents;

    const Document& document(const std::string& doc_id) const {
        for (const auto& d : documents)
            if (d.doc_id == doc_id) return d;
        throw DataError("unknown document: " + doc_id);
    }

    const Mention& mention(const std::string& mention_id) const {
        for (const auto& d : documents)
            for (const auto& m : d.mentions)
                if (m.id == mention_id) return m;
        throw DataError("unknown mention: " + mention_id);
    }

    std::size_t mention_count() const {
        std::size_t n = 0;
        for (const auto& d : documents) n += d.mentions.size();
        return n;
    }

    std::size_t sentence_count() const {
        std::size_t n = 0;
        for (const auto& d : documents) n += d.sentences.size();
        return n;
    }
};

namespace detail {

inline void validate_document(const Document& doc) {
    std::unordered_set<std::string> seen_tokens;
    for (std::size_t si = 0; si < doc.sentences.size(); ++si) {
        const Sentence& s = doc.sentences[si];
        if (s.index != static_cast<int>(si))
            throw DataError(doc.doc_id + ": sentence index " + std::to_string(s.index) + " out of order");
        for (std::size_t ti = 0; ti < s.tokens.size(); ++ti) {
            const Token& t = s.tokens[ti];
            if (t.index != static_cast<int>(ti))
                throw DataError(doc.doc_id + ": token index not contiguous in sentence " + std::to_string(si));
            if (t.text.empty())
                throw DataError(doc.doc_id + ": empty token text in sentence " + std::to_string(si));
        }
    }
    for (const Mention& m : doc.mentions) {
        if (m.doc_id != doc.doc_id)
            throw DataError("mention " + m.id + ": doc_id mismatch (field doc_id)");
        if (m.sentence_index < 0 || m.sentence_index >= static_cast<int>(doc.sentences.size()))
            throw DataError("mention " + m.id + ": invalid sentence (field sentence)");
        const Sentence& s = doc.sentences[static_cast<std::size_t>(m.sentence_index)];
        if (m.span.start > m.span.end)
            throw DataError("mention " + m.id + ": span start > end (field span)");
        if (m.span.start < 0 || m.span.end >= static_cast<int>(s.tokens.size()))
            throw DataError("mention " + m.id + ": span outside sentence (field span)");
        if (m.head_index < m.span.start || m.head_index > m.span.end)
            throw DataError("mention " + m.id + ": head outside span (field head)");
    }
}

}  // namespace detail

/// Validate all Corpus invariants; throws DataError naming the offender.
inline void validate_corpus(const Corpus& corpus) {
    std::unordered_set<std::string> doc_ids;
    std::unordered_set<std::string> mention_ids;
    std::unordered_map<std::string, std::string> wd_chain_doc;   // wd chain -> doc
    std::unordered_map<std::string, int> cd_chain_topic;         // cd chain -> topic
    for (const Document& doc : corpus.documents) {
        if (!doc_ids.insert(doc.doc_id).second)
            throw DataError("duplicate doc_id: " + doc.doc_id);
        detail::validate_document(doc);
        for (const Mention& m : doc.mentions) {
            if (!mention_ids.insert(m.id).second)
                throw DataError("duplicate mention id: " + m.id);
            if (m.wd_chain) {
                auto [it, inserted] = wd_chain_doc.try_emplace(*m.wd_chain, doc.doc_id);
                if (!inserted && it->second != doc.doc_id)
                    throw DataError("WD chain " + *m.wd_chain + " crosses documents (" + it->second +
                                    ", " + doc.doc_id + ")");
            }
            if (m.cd_chain) {
                auto [it, inserted] = cd_chain_topic.try_emplace(*m.cd_chain, doc.topic);
                if (!inserted && it->second != doc.topic)
                    throw DataError("CD chain " + *m.cd_chain + " crosses topics (" +
                                    std::to_string(it->second) + ", " + std::to_string(doc.topic) + ")");
            }
        }
    }
}

/// Partition a corpus by topic ranges. Documents with topics outside every
/// range are dropped (counted in *dropped when given).
inline std::tuple<Corpus, Corpus, Corpus> split_corpus(const Corpus& corpus, const SplitConfig& cfg,
                                                       std::size_t* dropped = nullptr) {
    auto overlaps = [](std::pair<int, int> a, std::pair<int, int> b) {
        return a.first <= b.second && b.first <= a.second;
    };
    if (overlaps(cfg.train, cfg.dev) || overlaps(cfg.train, cfg.test) || overlaps(cfg.dev, cfg.test))
        throw UsageError("split topic ranges overlap");
    auto in = [](std::pair<int, int> r, int t) { return t >= r.first && t <= r.second; };
    Corpus train, dev, test;
    std::size_t skipped = 0;
    for (const Document& d : corpus.documents) {
        if (in(cfg.train, d.topic))
            train.documents.push_back(d);
        else if (in(cfg.dev, d.topic))
            dev.documents.push_back(d);
        else if (in(cfg.test, d.topic))
            test.documents.push_back(d);
        else
            ++skipped;
    }
    if (dropped) *dropped = skipped;
    return {std::move(train), std::move(dev), std::move(test)};
}

/// Gold chains of the requested scope as a partition of the mention set.
/// Mentions without a chain label form singleton chains. Chains and their
/// members are sorted for deterministic output.
inline std::vector<std::vector<std::string>> gold_chains(const Corpus& corpus, Scope scope) {
    std::map<std::string, std::vector<std::string>> grouped;
    std::vector<std::vector<std::string>> chains;
    for (const Document& d : corpus.documents) {
        for (const Mention& m : d.mentions) {
            const std::optional<std::string>& label = (scope == Scope::WD) ? m.wd_chain : m.cd_chain;
            if (label)
                grouped[*label].push_back(m.id);
            else
                chains.push_back({m.id});
        }
    }
    for (auto& [label, members] : grouped) {
        std::sort(members.begin(), members.end());
        chains.push_back(std::move(members));
    }
    std::sort(chains.begin(), chains.end());
    return chains;
}

struct DetectedSpan {
    std::string doc_id;
    int sentence_index = 0;
    TokenSpan span;
};

/// Keep exactly the gold mentions whose (doc, sentence, span) appears in
/// detected_spans; chain labels are preserved. Spans naming unknown documents
/// are ignored (counted in *unknown_docs when given).
inline Corpus filter_to_gold(const Corpus& corpus, const std::vector<DetectedSpan>& detected_spans,
                             std::size_t* unknown_docs = nullptr) {
    std::unordered_set<std::string> known_docs;
    for (const Document& d : corpus.documents) known_docs.insert(d.doc_id);
    std::set<std::tuple<std::string, int, int, int>> wanted;
    std::size_t unknown = 0;
    for (const DetectedSpan& s : detected_spans) {
        if (!known_docs.count(s.doc_id)) {
            ++unknown;
            continue;
        }
        wanted.emplace(s.doc_id, s.sentence_index, s.span.start, s.span.end);
    }
    if (unknown_docs) *unknown_docs = unknown;
    Corpus out = corpus;
    for (Document& d : out.documents) {
        std::erase_if(d.mentions, [&](const Mention& m) {
            return !wanted.count({m.doc_id, m.sentence_index, m.span.start, m.span.end});
        });
    }
    return out;
}

/// Parse detected spans from TSV lines: doc_id<TAB>sentence<TAB>start<TAB>end.
inline std::vector<DetectedSpan> parse_detected_spans(const std::string& tsv) {
    std::vector<DetectedSpan> out;
    std::size_t lineno = 0;
    for (const std::string& line : split(tsv, '\n')) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split(line, '\t');
        if (fields.size() != 4)
            throw DataError("detected spans line " + std::to_string(lineno) + ": expected 4 fields");
        try {
            out.push_back({fields[0], std::stoi(fields[1]), {std::stoi(fields[2]), std::stoi(fields[3])}});
        } catch (const std::exception&) {
            throw DataError("detected spans line " + std::to_string(lineno) + ": bad integer");
        }
    }
    return out;
}

}  // namespace ecoref
