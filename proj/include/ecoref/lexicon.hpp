#pragma once

// Read-only lexical resources: a word2vec text-format embedding store and a
// WordNet store backing the path-similarity features. Both are immutable
// after load; all similarity operations are pure.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ecoref/util.hpp"

namespace ecoref {

/// A similarity in [0,1], or the distinguished Unknown state (which
/// quantization maps to its own bucket).
struct SimilarityValue {
    std::optional<double> v;

    static SimilarityValue unknown() { return {}; }
    static SimilarityValue known(double value) {
        if (!(value >= 0.0 && value <= 1.0))
            throw NumericError("similarity outside [0,1]: " + std::to_string(value));
        return {value};
    }
    bool is_known() const { return v.has_value(); }
    double value() const { return *v; }
};

// ---------------------------------------------------------------------------
// Embeddings

class EmbeddingStore {
public:
    /// Load word2vec text format: header "V D", then V lines "word f1 .. fD".
    /// Duplicate words: last wins (counted in *duplicates). Any row with a
    /// wrong value count raises a DataError naming the line.
    static EmbeddingStore load(std::istream& in, std::size_t* duplicates = nullptr) {
        EmbeddingStore store;
        std::string line;
        if (!std::getline(in, line)) throw DataError("embeddings: empty input");
        std::istringstream header(line);
        long long vocab_size = 0, dim = 0;
        if (!(header >> vocab_size >> dim) || vocab_size < 0 || dim <= 0)
            throw DataError("embeddings: bad header line");
        store.dim_ = static_cast<int>(dim);
        std::size_t dups = 0;
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            std::size_t sp = line.find(' ');
            if (sp == std::string::npos)
                throw DataError("embeddings line " + std::to_string(lineno) + ": no values");
            std::string word = line.substr(0, sp);
            std::vector<double> vec;
            vec.reserve(static_cast<std::size_t>(dim));
            const char* p = line.data() + sp;
            const char* end = line.data() + line.size();
            while (p != end) {
                while (p != end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
                if (p == end) break;
                double value = 0.0;
                auto [next, ec] = std::from_chars(p, end, value);
                if (ec != std::errc())
                    throw DataError("embeddings line " + std::to_string(lineno) + ": bad float");
                vec.push_back(value);
                p = next;
            }
            if (static_cast<long long>(vec.size()) != dim)
                throw DataError("embeddings line " + std::to_string(lineno) + ": expected " +
                                std::to_string(dim) + " values, got " + std::to_string(vec.size()));
            auto [it, inserted] = store.vocab_.insert_or_assign(std::move(word), std::move(vec));
            if (!inserted) ++dups;
        }
        if (duplicates) *duplicates = dups;
        return store;
    }

    static EmbeddingStore load_file(const std::filesystem::path& path, std::size_t* duplicates = nullptr) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open embeddings file: " + path.string());
        return load(in, duplicates);
    }

    int dim() const { return dim_; }
    std::size_t size() const { return vocab_.size(); }

    /// Exact match first, then lowercase fallback; nullptr when absent.
    const std::vector<double>* lookup(const std::string& word) const {
        auto it = vocab_.find(word);
        if (it != vocab_.end()) return &it->second;
        std::string lower = word;
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (lower != word) {
            it = vocab_.find(lower);
            if (it != vocab_.end()) return &it->second;
        }
        return nullptr;
    }

    void insert(std::string word, std::vector<double> vec) {
        if (dim_ == 0) dim_ = static_cast<int>(vec.size());
        if (static_cast<int>(vec.size()) != dim_) throw DataError("embedding dimension mismatch on insert");
        vocab_[std::move(word)] = std::move(vec);
    }

private:
    int dim_ = 0;
    std::unordered_map<std::string, std::vector<double>> vocab_;
};

/// Cosine of two vectors, clamped into [0,1] (negative cosines quantize to
/// the bottom bucket, so they are floored at 0). Unknown on zero norm.
inline SimilarityValue cosine_similarity(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw NumericError("cosine: dimension mismatch");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) return SimilarityValue::unknown();
    double c = dot / (std::sqrt(nu) * std::sqrt(nv));
    return SimilarityValue::known(std::clamp(c, 0.0, 1.0));
}

// ---------------------------------------------------------------------------
// WordNet

class WordNetStore {
public:
    /// Load the TSV fixture format, three sections:
    ///   #SYNSETS   id<TAB>pos<TAB>lemma1,lemma2,...
    ///   #HYPERNYMS child_id<TAB>parent_id
    ///   #DERIV     lemma<TAB>synset_id<TAB>related_lemma<TAB>related_synset_id
    static WordNetStore load_tsv(std::istream& in) {
        WordNetStore store;
        enum class Section { none, synsets, hypernyms, deriv } section = Section::none;
        std::string line;
        std::size_t lineno = 0;
        std::vector<std::pair<std::string, std::string>> hypernym_rows;
        std::vector<std::array<std::string, 4>> deriv_rows;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (line[0] == '#') {
                if (line == "#SYNSETS") section = Section::synsets;
                else if (line == "#HYPERNYMS") section = Section::hypernyms;
                else if (line == "#DERIV") section = Section::deriv;
                continue;  // other '#' lines are comments
            }
            auto fields = split(line, '\t');
            auto bad = [&](const char* what) {
                return DataError("wordnet line " + std::to_string(lineno) + ": " + what);
            };
            switch (section) {
                case Section::none:
                    throw bad("data before any section header");
                case Section::synsets: {
                    if (fields.size() != 3) throw bad("expected id<TAB>pos<TAB>lemmas");
                    if (store.index_.count(fields[0])) throw bad("duplicate synset id");
                    int idx = static_cast<int>(store.synsets_.size());
                    store.index_[fields[0]] = idx;
                    store.synsets_.push_back({fields[0], fields[1]});
                    for (const std::string& lemma : split(fields[2], ','))
                        if (!lemma.empty()) store.lemma_index_[lemma].push_back(idx);
                    break;
                }
                case Section::hypernyms:
                    if (fields.size() != 2) throw bad("expected child<TAB>parent");
                    hypernym_rows.emplace_back(fields[0], fields[1]);
                    break;
                case Section::deriv:
                    if (fields.size() != 4) throw bad("expected lemma<TAB>synset<TAB>lemma<TAB>synset");
                    deriv_rows.push_back({fields[0], fields[1], fields[2], fields[3]});
                    break;
            }
        }

        store.parents_.resize(store.synsets_.size());
        store.children_.resize(store.synsets_.size());
        for (const auto& [child, parent] : hypernym_rows) {
            int c = store.require(child);
            int p = store.require(parent);
            if (store.synsets_[static_cast<std::size_t>(c)].pos != store.synsets_[static_cast<std::size_t>(p)].pos)
                throw DataError("hypernym edge crosses POS: " + child + " -> " + parent);
            store.parents_[static_cast<std::size_t>(c)].push_back(p);
            store.children_[static_cast<std::size_t>(p)].push_back(c);
        }
        store.check_acyclic();

        for (const auto& row : deriv_rows) {
            int from = store.require(row[1]);
            int to = store.require(row[3]);
            store.deriv_[{row[0], from}].push_back({row[2], to});
        }
        return store;
    }

    static WordNetStore load_tsv_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open wordnet file: " + path.string());
        return load_tsv(in);
    }

    bool has_synset(const std::string& id) const { return index_.count(id) != 0; }
    std::size_t synset_count() const { return synsets_.size(); }

    const std::string& pos_of(const std::string& id) const {
        return synsets_[static_cast<std::size_t>(require(id))].pos;
    }

    /// Synset ids of a lemma in sense order (all POS categories).
    std::vector<std::string> synsets_of(const std::string& lemma) const {
        std::vector<std::string> out;
        auto it = lemma_index_.find(lemma);
        if (it == lemma_index_.end()) return out;
        for (int idx : it->second) out.push_back(synsets_[static_cast<std::size_t>(idx)].id);
        return out;
    }

    /// 1/(1+d) where d is the shortest path between the synsets in the
    /// undirected hypernym graph, with a virtual root joining each POS
    /// forest. Unknown across POS categories.
    SimilarityValue path_similarity(const std::string& a, const std::string& b) const {
        int ia = require(a), ib = require(b);
        return path_similarity_indexed(ia, ib);
    }

    /// Max path similarity over all sense pairs of the two lemmas that share
    /// a POS. Unknown when either lemma has no senses or no pair is comparable.
    SimilarityValue max_sense_path_similarity(const std::string& word1, const std::string& word2) const {
        return best_over(sense_indices(word1), sense_indices(word2));
    }

    /// Max path similarity over the direct hypernyms of any sense of each word.
    SimilarityValue hypernym_path_similarity(const std::string& word1, const std::string& word2) const {
        return best_over(hypernym_indices(word1), hypernym_indices(word2));
    }

    /// Max path similarity between the derivationally related verb forms of
    /// the two words (each word's own verb senses are included).
    SimilarityValue derivational_verb_path_similarity(const std::string& word1,
                                                      const std::string& word2) const {
        return best_over(derived_verb_indices(word1), derived_verb_indices(word2));
    }

private:
    struct Synset {
        std::string id;
        std::string pos;
    };

    std::vector<Synset> synsets_;
    std::unordered_map<std::string, int> index_;
    std::map<std::string, std::vector<int>> lemma_index_;  // lemma -> senses in rank order
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
    std::map<std::pair<std::string, int>, std::vector<std::pair<std::string, int>>> deriv_;

    int require(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw DataError("unknown synset id: " + id);
        return it->second;
    }

    void check_acyclic() const {
        // Kahn's algorithm over hypernym edges.
        std::vector<int> outdeg(synsets_.size(), 0);
        std::deque<int> ready;
        for (std::size_t i = 0; i < synsets_.size(); ++i) {
            outdeg[i] = static_cast<int>(parents_[i].size());
            if (outdeg[i] == 0) ready.push_back(static_cast<int>(i));
        }
        std::size_t seen = 0;
        while (!ready.empty()) {
            int n = ready.front();
            ready.pop_front();
            ++seen;
            for (int c : children_[static_cast<std::size_t>(n)])
                if (--outdeg[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
        }
        if (seen != synsets_.size()) throw DataError("hypernym graph contains a cycle");
    }

    SimilarityValue path_similarity_indexed(int ia, int ib) const {
        const std::string& pos = synsets_[static_cast<std::size_t>(ia)].pos;
        if (pos != synsets_[static_cast<std::size_t>(ib)].pos) return SimilarityValue::unknown();
        if (ia == ib) return SimilarityValue::known(1.0);
        // BFS over the undirected hypernym graph restricted to this POS.
        // Node -1 is the virtual root, adjacent to every root of the forest.
        std::unordered_map<int, int> dist;
        std::deque<int> queue;
        dist[ia] = 0;
        queue.push_back(ia);
        while (!queue.empty()) {
            int n = queue.front();
            queue.pop_front();
            int d = dist[n];
            auto visit = [&](int next) {
                if (dist.count(next)) return false;
                dist[next] = d + 1;
                if (next == ib) return true;
                queue.push_back(next);
                return false;
            };
            if (n == -1) {
                for (std::size_t i = 0; i < synsets_.size(); ++i)
                    if (synsets_[i].pos == pos && parents_[i].empty())
                        if (visit(static_cast<int>(i))) return SimilarityValue::known(1.0 / (2.0 + d));
                continue;
            }
            for (int p : parents_[static_cast<std::size_t>(n)])
                if (visit(p)) return SimilarityValue::known(1.0 / (2.0 + d));
            for (int c : children_[static_cast<std::size_t>(n)])
                if (visit(c)) return SimilarityValue::known(1.0 / (2.0 + d));
            if (parents_[static_cast<std::size_t>(n)].empty() && !dist.count(-1)) {
                dist[-1] = d + 1;
                queue.push_back(-1);
            }
        }
        return SimilarityValue::unknown();
    }

    SimilarityValue best_over(const std::vector<int>& left, const std::vector<int>& right) const {
        SimilarityValue best = SimilarityValue::unknown();
        for (int a : left)
            for (int b : right) {
                SimilarityValue s = path_similarity_indexed(a, b);
                if (s.is_known() && (!best.is_known() || s.value() > best.value())) best = s;
            }
        return best;
    }

    std::vector<int> sense_indices(const std::string& lemma) const {
        auto it = lemma_index_.find(lemma);
        return it == lemma_index_.end() ? std::vector<int>{} : it->second;
    }

    std::vector<int> hypernym_indices(const std::string& lemma) const {
        std::vector<int> out;
        for (int s : sense_indices(lemma))
            for (int p : parents_[static_cast<std::size_t>(s)])
                if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
        return out;
    }

    std::vector<int> derived_verb_indices(const std::string& lemma) const {
        std::vector<int> out;
        auto add = [&](int s) {
            if (synsets_[static_cast<std::size_t>(s)].pos == "v" &&
                std::find(out.begin(), out.end(), s) == out.end())
                out.push_back(s);
        };
        for (int s : sense_indices(lemma)) {
            add(s);
            auto it = deriv_.find({lemma, s});
            if (it != deriv_.end())
                for (const auto& [related_lemma, related] : it->second) add(related);
        }
        return out;
    }
};

}  // namespace ecoref
