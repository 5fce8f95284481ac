#pragma once

// Canonical JSON-lines corpus format: one document object per line, UTF-8,
// LF line endings, fixed key order. write_canonical is the exact inverse of
// load_canonical for normalized input.

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ecoref/corpus.hpp"

namespace ecoref {

using ordered_json = nlohmann::ordered_json;

inline ordered_json document_to_json(const Document& doc) {
    ordered_json j;
    j["doc_id"] = doc.doc_id;
    j["topic"] = doc.topic;
    j["sub_topic"] = to_string(doc.sub_topic);
    ordered_json sentences = ordered_json::array();
    for (const Sentence& s : doc.sentences) {
        ordered_json sent = ordered_json::array();
        for (const Token& t : s.tokens) {
            ordered_json tok;
            tok["text"] = t.text;
            tok["lemma"] = t.lemma;
            tok["pos"] = t.pos;
            sent.push_back(std::move(tok));
        }
        sentences.push_back(std::move(sent));
    }
    j["sentences"] = std::move(sentences);
    ordered_json mentions = ordered_json::array();
    for (const Mention& m : doc.mentions) {
        ordered_json mj;
        mj["id"] = m.id;
        mj["sentence"] = m.sentence_index;
        mj["span"] = ordered_json::array({m.span.start, m.span.end});
        mj["head"] = m.head_index;
        mj["wd_chain"] = m.wd_chain ? ordered_json(*m.wd_chain) : ordered_json(nullptr);
        mj["cd_chain"] = m.cd_chain ? ordered_json(*m.cd_chain) : ordered_json(nullptr);
        mentions.push_back(std::move(mj));
    }
    j["mentions"] = std::move(mentions);
    return j;
}

namespace detail {

inline const ordered_json& field(const ordered_json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw DataError(where + ": missing field " + key);
    return *it;
}

inline Document document_from_json(const ordered_json& j, std::size_t lineno) {
    const std::string where = "line " + std::to_string(lineno);
    Document doc;
    try {
        doc.doc_id = field(j, "doc_id", where).get<std::string>();
        doc.topic = field(j, "topic", where).get<int>();
        doc.sub_topic = sub_topic_from_string(field(j, "sub_topic", where).get<std::string>());
        int si = 0;
        for (const auto& sent : field(j, "sentences", where)) {
            Sentence s;
            s.index = si++;
            int ti = 0;
            for (const auto& tok : sent) {
                Token t;
                t.index = ti++;
                t.text = field(tok, "text", where).get<std::string>();
                t.lemma = field(tok, "lemma", where).get<std::string>();
                t.pos = field(tok, "pos", where).get<std::string>();
                s.tokens.push_back(std::move(t));
            }
            doc.sentences.push_back(std::move(s));
        }
        for (const auto& mj : field(j, "mentions", where)) {
            Mention m;
            m.id = field(mj, "id", where).get<std::string>();
            m.doc_id = doc.doc_id;
            m.sentence_index = field(mj, "sentence", where).get<int>();
            const auto& span = field(mj, "span", where);
            if (!span.is_array() || span.size() != 2)
                throw DataError(doc.doc_id + ": span must be [start, end] (field span)");
            m.span.start = span[0].get<int>();
            m.span.end = span[1].get<int>();
            m.head_index = field(mj, "head", where).get<int>();
            const auto& wd = field(mj, "wd_chain", where);
            if (!wd.is_null()) m.wd_chain = wd.get<std::string>();
            const auto& cd = field(mj, "cd_chain", where);
            if (!cd.is_null()) m.cd_chain = cd.get<std::string>();
            doc.mentions.push_back(std::move(m));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(where + ": " + e.what());
    }
    return doc;
}

}  // namespace detail

/// Load a canonical JSONL stream. Validates every Corpus invariant and fails
/// atomically: either the whole stream loads or a DataError is thrown.
inline Corpus load_canonical(std::istream& in) {
    Corpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError("line " + std::to_string(lineno) + ": " + e.what());
        }
        corpus.documents.push_back(detail::document_from_json(j, lineno));
    }
    validate_corpus(corpus);
    return corpus;
}

inline Corpus load_canonical(const std::string& text) {
    std::istringstream in(text);
    return load_canonical(in);
}

inline void write_canonical(const Corpus& corpus, std::ostream& out) {
    for (const Document& doc : corpus.documents) out << document_to_json(doc).dump() << '\n';
}

inline std::string write_canonical(const Corpus& corpus) {
    std::ostringstream out;
    write_canonical(corpus, out);
    return out.str();
}

}  // namespace ecoref
