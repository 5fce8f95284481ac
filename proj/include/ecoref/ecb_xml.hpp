#pragma once

// ECB+ XML ingestion. A small non-validating XML reader feeds a mapper that
// turns token / markable / relation markup into a Document. The reader is
// deliberately lenient where the corpus is known to be sloppy (stray '&',
// odd sentence numbering); every hard failure reports a byte offset.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ecoref/corpus.hpp"
#include "ecoref/featurize.hpp"

namespace ecoref {

struct XmlParseError : DataError {
    std::size_t offset;
    XmlParseError(std::size_t off, const std::string& msg)
        : DataError("XML parse error at byte " + std::to_string(off) + ": " + msg), offset(off) {}
};

struct XmlElement {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<XmlElement> children;
    std::string text;  // concatenated direct character data

    const std::string* attr(std::string_view key) const {
        for (const auto& [k, v] : attrs)
            if (k == key) return &v;
        return nullptr;
    }
};

namespace detail {

class XmlReader {
public:
    explicit XmlReader(std::string_view input) : in_(input) {}

    XmlElement parse() {
        skip_bom();
        skip_misc();
        if (eof()) fail("empty document");
        XmlElement root = parse_element();
        skip_misc();
        if (!eof()) fail("trailing content after root element");
        return root;
    }

private:
    std::string_view in_;
    std::size_t pos_ = 0;

    bool eof() const { return pos_ >= in_.size(); }
    char peek() const { return in_[pos_]; }
    [[noreturn]] void fail(const std::string& msg) const { throw XmlParseError(pos_, msg); }

    bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

    void skip_bom() {
        if (starts_with("\xEF\xBB\xBF")) pos_ += 3;
    }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }

    // Prolog, comments, doctype, processing instructions.
    void skip_misc() {
        while (true) {
            skip_ws();
            if (starts_with("<?")) {
                skip_until("?>");
            } else if (starts_with("<!--")) {
                skip_until("-->");
            } else if (starts_with("<!")) {
                skip_until(">");
            } else {
                return;
            }
        }
    }

    void skip_until(std::string_view terminator) {
        std::size_t found = in_.find(terminator, pos_);
        if (found == std::string_view::npos) fail("unterminated '" + std::string(terminator) + "'");
        pos_ = found + terminator.size();
    }

    static bool is_name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == ':';
    }

    std::string parse_name() {
        std::size_t start = pos_;
        while (!eof() && is_name_char(peek())) ++pos_;
        if (pos_ == start) fail("expected name");
        return std::string(in_.substr(start, pos_ - start));
    }

    std::string decode_entities(std::string_view raw) {
        std::string out;
        out.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out += raw[i];
                continue;
            }
            std::size_t semi = raw.find(';', i);
            if (semi == std::string_view::npos || semi - i > 10) {
                out += '&';  // bare ampersand, kept literal
                continue;
            }
            std::string_view ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "amp") out += '&';
            else if (ent == "lt") out += '<';
            else if (ent == "gt") out += '>';
            else if (ent == "quot") out += '"';
            else if (ent == "apos") out += '\'';
            else if (!ent.empty() && ent[0] == '#') {
                long code = 0;
                try {
                    code = (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X'))
                               ? std::stol(std::string(ent.substr(2)), nullptr, 16)
                               : std::stol(std::string(ent.substr(1)));
                } catch (const std::exception&) {
                    out += '&';
                    continue;
                }
                append_utf8(out, code);
            } else {
                out += '&';  // unknown entity, kept literal
                continue;
            }
            i = semi;
        }
        return out;
    }

    static void append_utf8(std::string& out, long code) {
        if (code < 0) return;
        if (code < 0x80) {
            out += static_cast<char>(code);
        } else if (code < 0x800) {
            out += static_cast<char>(0xC0 | (code >> 6));
            out += static_cast<char>(0x80 | (code & 0x3F));
        } else if (code < 0x10000) {
            out += static_cast<char>(0xE0 | (code >> 12));
            out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (code & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (code >> 18));
            out += static_cast<char>(0x80 | ((code >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (code & 0x3F));
        }
    }

    std::string parse_attr_value() {
        if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
        char quote = peek();
        ++pos_;
        std::size_t start = pos_;
        std::size_t end = in_.find(quote, pos_);
        if (end == std::string_view::npos) fail("unterminated attribute value");
        pos_ = end + 1;
        return decode_entities(in_.substr(start, end - start));
    }

    XmlElement parse_element() {
        if (eof() || peek() != '<') fail("expected '<'");
        ++pos_;
        XmlElement el;
        el.name = parse_name();
        while (true) {
            skip_ws();
            if (eof()) fail("unterminated start tag <" + el.name + ">");
            if (peek() == '>') {
                ++pos_;
                break;
            }
            if (starts_with("/>")) {
                pos_ += 2;
                return el;  // self-closing
            }
            std::string key = parse_name();
            skip_ws();
            if (eof() || peek() != '=') fail("expected '=' after attribute " + key);
            ++pos_;
            skip_ws();
            el.attrs.emplace_back(std::move(key), parse_attr_value());
        }
        // content
        while (true) {
            if (eof()) fail("missing </" + el.name + ">");
            if (peek() == '<') {
                if (starts_with("</")) {
                    pos_ += 2;
                    std::string closing = parse_name();
                    if (closing != el.name)
                        fail("mismatched </" + closing + ">, expected </" + el.name + ">");
                    skip_ws();
                    if (eof() || peek() != '>') fail("malformed end tag");
                    ++pos_;
                    return el;
                }
                if (starts_with("<!--")) {
                    skip_until("-->");
                    continue;
                }
                if (starts_with("<![CDATA[")) {
                    pos_ += 9;
                    std::size_t end = in_.find("]]>", pos_);
                    if (end == std::string_view::npos) fail("unterminated CDATA");
                    el.text += in_.substr(pos_, end - pos_);
                    pos_ = end + 3;
                    continue;
                }
                if (starts_with("<?")) {
                    skip_until("?>");
                    continue;
                }
                el.children.push_back(parse_element());
                continue;
            }
            std::size_t start = pos_;
            while (!eof() && peek() != '<') ++pos_;
            el.text += decode_entities(in_.substr(start, pos_ - start));
        }
    }
};

}  // namespace detail

inline XmlElement parse_xml(std::string_view input) { return detail::XmlReader(input).parse(); }

// ---------------------------------------------------------------------------
// ECB+ mapping

struct EcbParseStats {
    std::size_t dropped_markables = 0;   // action markables without usable token anchors
    std::size_t repaired_tokens = 0;     // empty token text replaced by "_"
    std::size_t chain_conflicts = 0;     // mention assigned to two chains of one scope
};

namespace detail {

inline bool is_action_markable(std::string_view name) {
    return name.starts_with("ACTION") || name.starts_with("NEG_ACTION");
}

inline std::optional<long> parse_long(const std::string* s) {
    if (!s) return std::nullopt;
    try {
        std::size_t used = 0;
        long v = std::stol(*s, &used);
        if (used != s->size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

// "36_4ecbplus.xml" -> (36, ecbplus)
inline std::pair<int, SubTopic> doc_name_parts(const std::string& doc_name) {
    std::size_t us = doc_name.find('_');
    if (us == std::string::npos || us == 0)
        throw DataError("cannot derive topic from document name: " + doc_name);
    int topic = 0;
    try {
        topic = std::stoi(doc_name.substr(0, us));
    } catch (const std::exception&) {
        throw DataError("cannot derive topic from document name: " + doc_name);
    }
    if (doc_name.find("ecbplus") != std::string::npos) return {topic, SubTopic::ecbplus};
    if (doc_name.find("ecb") != std::string::npos) return {topic, SubTopic::ecb};
    throw DataError("cannot derive sub-topic from document name: " + doc_name);
}

}  // namespace detail

/// Parse one ECB+ XML file into a Document. Token elements become sentences
/// (sentence numbers remapped to contiguous 0-based indices), action-type
/// markables become mentions, and coreference relations fill the chain
/// labels: CROSS_DOC_COREF keys become topic-qualified CD chains (plus a
/// document-local WD chain for co-document members); INTRA_DOC_COREF keys
/// become WD chains (plus a document-local CD chain, since a within-document
/// cluster is still a cluster under CD evaluation).
inline Document parse_ecb_document(std::string_view xml_bytes, const std::string& doc_name,
                                   EcbParseStats* stats = nullptr) {
    EcbParseStats local_stats;
    EcbParseStats& st = stats ? *stats : local_stats;

    XmlElement root = parse_xml(xml_bytes);

    Document doc;
    doc.doc_id = doc_name.ends_with(".xml") ? doc_name.substr(0, doc_name.size() - 4) : doc_name;
    auto [topic, sub] = detail::doc_name_parts(doc.doc_id);
    doc.topic = topic;
    doc.sub_topic = sub;

    // Tokens grouped by the XML sentence attribute, ordered by the number
    // attribute when sane, by document order otherwise.
    struct RawToken {
        long t_id;
        long number;
        std::size_t file_order;
        std::string text;
    };
    std::map<long, std::vector<RawToken>> by_sentence;
    std::size_t order = 0;
    for (const XmlElement& child : root.children) {
        if (child.name != "token") continue;
        auto t_id = detail::parse_long(child.attr("t_id"));
        auto sent = detail::parse_long(child.attr("sentence"));
        auto num = detail::parse_long(child.attr("number"));
        if (!t_id || !sent)
            throw DataError(doc.doc_id + ": token missing t_id/sentence attribute");
        std::string text = child.text;
        // trim surrounding whitespace
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.erase(text.begin());
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
        if (text.empty()) {
            text = "_";
            ++st.repaired_tokens;
        }
        by_sentence[*sent].push_back({*t_id, num.value_or(-1), order++, std::move(text)});
    }

    // t_id -> (sentence index, token index)
    std::unordered_map<long, std::pair<int, int>> token_pos;
    for (auto& [sent_attr, toks] : by_sentence) {
        bool numbers_ok = true;
        for (const RawToken& t : toks)
            if (t.number < 0) numbers_ok = false;
        if (numbers_ok)
            std::sort(toks.begin(), toks.end(), [](const RawToken& a, const RawToken& b) {
                return std::tie(a.number, a.file_order) < std::tie(b.number, b.file_order);
            });
        Sentence s;
        s.index = static_cast<int>(doc.sentences.size());
        for (const RawToken& t : toks) {
            Token tok;
            tok.index = static_cast<int>(s.tokens.size());
            tok.text = t.text;
            tok.lemma = t.text;
            std::transform(tok.lemma.begin(), tok.lemma.end(), tok.lemma.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            tok.pos = "UNK";
            token_pos[t.t_id] = {s.index, tok.index};
            s.tokens.push_back(std::move(tok));
        }
        doc.sentences.push_back(std::move(s));
    }

    // Markables. Non-action types (entities, times, locations) are ignored;
    // action markables without usable anchors (the abstract instance
    // markables) are dropped and counted.
    struct RawMarkable {
        std::string type;
        std::string instance_id;
        std::vector<long> anchors;
        bool is_mention = false;
        std::size_t mention_index = 0;  // into doc.mentions when is_mention
    };
    std::unordered_map<long, RawMarkable> markables;
    const XmlElement* markables_el = nullptr;
    const XmlElement* relations_el = nullptr;
    for (const XmlElement& child : root.children) {
        if (child.name == "Markables") markables_el = &child;
        if (child.name == "Relations") relations_el = &child;
    }

    if (markables_el) {
        for (const XmlElement& mk : markables_el->children) {
            auto m_id = detail::parse_long(mk.attr("m_id"));
            if (!m_id) throw DataError(doc.doc_id + ": markable missing m_id");
            RawMarkable raw;
            raw.type = mk.name;
            if (const std::string* inst = mk.attr("instance_id")) raw.instance_id = *inst;
            for (const XmlElement& anchor : mk.children)
                if (anchor.name == "token_anchor")
                    if (auto t = detail::parse_long(anchor.attr("t_id"))) raw.anchors.push_back(*t);
            markables[*m_id] = std::move(raw);
        }
    }

    for (auto& [m_id, raw] : markables) {
        if (!detail::is_action_markable(raw.type)) continue;
        int sent = -1, lo = 0, hi = 0;
        bool usable = !raw.anchors.empty();
        bool first = true;
        for (long t : raw.anchors) {
            auto it = token_pos.find(t);
            if (it == token_pos.end()) {
                usable = false;  // dangling anchor: treated as missing
                break;
            }
            auto [s, idx] = it->second;
            if (first) {
                sent = s;
                lo = hi = idx;
                first = false;
            } else if (s != sent) {
                usable = false;  // anchors span sentences
                break;
            } else {
                lo = std::min(lo, idx);
                hi = std::max(hi, idx);
            }
        }
        if (!usable) {
            ++st.dropped_markables;
            continue;
        }
        Mention m;
        m.id = doc.doc_id + "/m" + std::to_string(m_id);
        m.doc_id = doc.doc_id;
        m.sentence_index = sent;
        m.span = {lo, hi};
        m.head_index = head_index_for(m.span, doc.sentences[static_cast<std::size_t>(sent)]);
        raw.is_mention = true;
        raw.mention_index = doc.mentions.size();
        doc.mentions.push_back(std::move(m));
    }

    // Relations.
    if (relations_el) {
        std::size_t rel_count = 0;
        for (const XmlElement& rel : relations_el->children) {
            ++rel_count;
            bool cross = rel.name.find("CROSS_DOC") != std::string::npos;
            bool intra = rel.name.find("INTRA_DOC") != std::string::npos;
            if (!cross && !intra) continue;

            std::vector<long> members;
            for (const XmlElement& ref : rel.children) {
                if (ref.name != "source" && ref.name != "target") continue;
                auto m_id = detail::parse_long(ref.attr("m_id"));
                if (!m_id) throw DataError(doc.doc_id + ": relation member missing m_id");
                if (!markables.count(*m_id))
                    throw DataError(doc.doc_id + ": relation references unknown markable m_id " +
                                    std::to_string(*m_id));
                members.push_back(*m_id);
            }

            // Chain key: the note attribute, else a member instance id, else
            // the relation id / position.
            std::string key;
            if (const std::string* note = rel.attr("note"); note && !note->empty()) key = *note;
            if (key.empty())
                for (long m : members)
                    if (!markables[m].instance_id.empty()) {
                        key = markables[m].instance_id;
                        break;
                    }
            if (key.empty()) {
                const std::string* r_id = rel.attr("r_id");
                key = "r" + (r_id ? *r_id : std::to_string(rel_count));
            }

            std::string wd_id = doc.doc_id + "/" + key;
            std::string cd_id = cross ? "t" + std::to_string(doc.topic) + "/" + key
                                      : "t" + std::to_string(doc.topic) + "/" + wd_id;
            for (long m : members) {
                const RawMarkable& raw = markables[m];
                if (!raw.is_mention) continue;  // abstract instance target
                Mention& mention = doc.mentions[raw.mention_index];
                if (mention.wd_chain && *mention.wd_chain != wd_id) ++st.chain_conflicts;
                else mention.wd_chain = wd_id;
                if (mention.cd_chain && *mention.cd_chain != cd_id) ++st.chain_conflicts;
                else mention.cd_chain = cd_id;
            }
        }
    }

    std::sort(doc.mentions.begin(), doc.mentions.end(), [](const Mention& a, const Mention& b) {
        return std::tie(a.sentence_index, a.span.start, a.span.end, a.id) <
               std::tie(b.sentence_index, b.span.start, b.span.end, b.id);
    });
    return doc;
}

}  // namespace ecoref
