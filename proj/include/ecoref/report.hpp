#pragma once

// CSV report emission. All percentages are rounded half-up to 2 decimals.
// The pairwise tables follow the published convention of computing the F1
// cell from the already-rounded P and R cells; the coreference score report
// rounds full-precision metric values and averages the rounded F1 cells into
// the conll row.

#include <sstream>
#include <string>
#include <vector>

#include "ecoref/corpus.hpp"
#include "ecoref/metrics.hpp"

namespace ecoref {

struct PairwiseRow {
    std::string setting;  // e.g. "wd-gold"
    double threshold = 0.5;
    std::size_t coref_links = 0;
    std::size_t noncoref_links = 0;
    ConfusionCounts counts;
};

inline std::string pairwise_report_header() {
    return "setting,threshold,coref_links,noncoref_links,tp,tn,fp,fn,"
           "precision,recall,f1,accuracy_noncoref,accuracy_all\n";
}

/// One table row. P/R/accuracy cells are rounded percentages of the exact
/// count ratios; the F1 cell is the harmonic mean of the rounded P and R
/// cells, rounded again.
inline std::string pairwise_row_csv(const PairwiseRow& row) {
    PairwiseMetrics m = pairwise_metrics(row.counts);
    double p_cell = round2(m.precision * 100.0);
    double r_cell = round2(m.recall * 100.0);
    double f1_cell = (p_cell + r_cell) > 0.0 ? round2(2.0 * p_cell * r_cell / (p_cell + r_cell)) : 0.0;
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << row.setting << ',' << row.threshold << ',' << row.coref_links << ',' << row.noncoref_links
       << ',' << row.counts.tp << ',' << row.counts.tn << ',' << row.counts.fp << ',' << row.counts.fn
       << ',' << p_cell << ',' << r_cell << ',' << f1_cell << ',' << round2(m.accuracy_noncoref * 100.0)
       << ',' << round2(m.accuracy_all * 100.0) << '\n';
    return os.str();
}

/// Score report: metric,recall,precision,f1 rows for muc, b3, ceaf_e plus a
/// conll row whose F1 is the mean of the three rounded F1 cells.
inline std::string score_report_csv(const PRF& muc_prf, const PRF& b3_prf, const PRF& ceafe_prf) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << "metric,recall,precision,f1\n";
    auto emit = [&](const char* name, const PRF& prf) {
        os << name << ',' << round2(prf.recall * 100.0) << ',' << round2(prf.precision * 100.0) << ','
           << round2(prf.f1 * 100.0) << '\n';
        return round2(prf.f1 * 100.0);
    };
    double muc_cell = emit("muc", muc_prf);
    double b3_cell = emit("b3", b3_prf);
    double ceafe_cell = emit("ceaf_e", ceafe_prf);
    os << "conll,,," << round2(conll_f1(muc_cell, b3_cell, ceafe_cell)) << '\n';
    return os.str();
}

inline std::string histogram_csv(const ScoreHistogram& h) {
    std::ostringstream os;
    os << "label,bin_lo,bin_hi,count\n";
    auto emit = [&](const char* label, const std::vector<std::size_t>& counts) {
        for (int b = 0; b < h.bins; ++b) {
            double lo = static_cast<double>(b) / h.bins;
            double hi = static_cast<double>(b + 1) / h.bins;
            os << label << ',' << lo << ',' << hi << ',' << counts[static_cast<std::size_t>(b)] << '\n';
        }
    };
    emit("coref", h.coref);
    emit("noncoref", h.noncoref);
    return os.str();
}

inline std::string loss_trace_csv(const std::vector<double>& epoch_mean_loss) {
    std::ostringstream os;
    os << "epoch,mean_loss\n";
    os.precision(17);
    for (std::size_t e = 0; e < epoch_mean_loss.size(); ++e) os << e << ',' << epoch_mean_loss[e] << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Corpus statistics (ingest report)

struct SplitStats {
    std::size_t documents = 0;
    std::size_t sentences = 0;
    std::size_t mentions = 0;
    std::size_t wd_chains = 0;
    std::size_t cd_chains = 0;
    double avg_wd_chain_length = 0.0;  // mentions in WD chains / #WD chains
    double avg_cd_chain_length = 0.0;
};

inline SplitStats split_stats(const Corpus& corpus) {
    SplitStats s;
    s.documents = corpus.documents.size();
    s.sentences = corpus.sentence_count();
    s.mentions = corpus.mention_count();
    auto wd = gold_chains(corpus, Scope::WD);
    auto cd = gold_chains(corpus, Scope::CD);
    s.wd_chains = wd.size();
    s.cd_chains = cd.size();
    std::size_t wd_members = 0, cd_members = 0;
    for (const auto& c : wd) wd_members += c.size();
    for (const auto& c : cd) cd_members += c.size();
    s.avg_wd_chain_length = wd.empty() ? 0.0 : static_cast<double>(wd_members) / static_cast<double>(wd.size());
    s.avg_cd_chain_length = cd.empty() ? 0.0 : static_cast<double>(cd_members) / static_cast<double>(cd.size());
    return s;
}

inline std::string stats_report_csv(const SplitStats& train, const SplitStats& dev,
                                    const SplitStats& test, const SplitStats& total) {
    std::ostringstream os;
    os << "stat,train,dev,test,total\n";
    auto row = [&](const char* name, auto get) {
        os << name << ',' << get(train) << ',' << get(dev) << ',' << get(test) << ',' << get(total) << '\n';
    };
    row("documents", [](const SplitStats& s) { return std::to_string(s.documents); });
    row("sentences", [](const SplitStats& s) { return std::to_string(s.sentences); });
    row("event_mentions", [](const SplitStats& s) { return std::to_string(s.mentions); });
    row("cd_chains", [](const SplitStats& s) { return std::to_string(s.cd_chains); });
    row("wd_chains", [](const SplitStats& s) { return std::to_string(s.wd_chains); });
    auto fmt2 = [](double v) {
        std::ostringstream f;
        f.setf(std::ios::fixed);
        f.precision(2);
        f << round2(v);
        return f.str();
    };
    row("avg_wd_chain_length", [&](const SplitStats& s) { return fmt2(s.avg_wd_chain_length); });
    row("avg_cd_chain_length", [&](const SplitStats& s) { return fmt2(s.avg_cd_chain_length); });
    return os.str();
}

}  // namespace ecoref
