#include "fieldvar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fieldvar::metrics {

namespace {

// Identity keys for neighbor-set overlap. '\x1f' cannot occur in tokens.
std::string global_key(const std::string& surface) { return "g\x1f" + surface; }
std::string collapsed_key(const std::string& surface) { return "t\x1f" + surface; }
std::string field_key(const std::string& field, const std::string& surface) {
    return "f\x1f" + field + "\x1f" + surface;
}

}  // namespace

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("cosine: dimension mismatch");
    }
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        dot += u[j] * v[j];
        nu += u[j] * u[j];
        nv += v[j] * v[j];
    }
    if (nu == 0.0 || nv == 0.0) {
        throw std::runtime_error("cosine of a zero vector");
    }
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

DisMode parse_dis_mode(const std::string& name) {
    if (name == "cardinality") return DisMode::cardinality;
    if (name == "weighted") return DisMode::weighted;
    throw std::runtime_error("unknown distance mode: " + name);
}

const char* dis_mode_name(DisMode mode) {
    return mode == DisMode::cardinality ? "cardinality" : "weighted";
}

double jaccard_set_distance(const std::map<std::string, double>& a,
                            const std::map<std::string, double>& b, DisMode mode) {
    if (mode == DisMode::cardinality) {
        std::size_t inter = 0;
        for (const auto& [key, score] : a) {
            (void)score;
            if (b.contains(key)) {
                ++inter;
            }
        }
        std::size_t uni = a.size() + b.size() - inter;
        if (uni == 0) {
            return 0.0;  // two empty sets are identical
        }
        return static_cast<double>(uni - inter) / static_cast<double>(uni);
    }

    // Weighted: merge the two key-sorted maps; scores are floored at zero so
    // the value stays in [0, 1] and identical sets score exactly 0.
    double inter = 0.0, uni = 0.0;
    bool same_keys = true;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            uni += std::max(ia->second, 0.0);
            same_keys = false;
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            uni += std::max(ib->second, 0.0);
            same_keys = false;
            ++ib;
        } else {
            double sa = std::max(ia->second, 0.0);
            double sb = std::max(ib->second, 0.0);
            inter += (sa + sb) / 2.0;
            uni += std::max(sa, sb);
            ++ia;
            ++ib;
        }
    }
    if (uni <= 0.0) {
        return same_keys ? 0.0 : 1.0;
    }
    return std::clamp(1.0 - inter / uni, 0.0, 1.0);
}

double scaled_field_distance(double total_sim) {
    // endpoints and the clamp are exact by construction
    if (total_sim <= 0.0) {
        return 1.0;
    }
    if (total_sim >= 1.0) {
        return 0.0;
    }
    static const double lambda = std::expm1(1.0);
    return std::clamp(std::expm1(1.0 - total_sim) / lambda, 0.0, 1.0);
}

Analyzer::Analyzer(const corpus::Lexicon& lexicon, const EmbeddingTable& table,
                   const corpus::ResolvedCorpora* frequencies)
    : lexicon_(lexicon), table_(table), frequencies_(frequencies) {
    if (table_.rows() != lexicon_.slot_count()) {
        throw std::runtime_error("embedding table does not match lexicon");
    }
    norms_.resize(table_.rows());
    for (std::size_t r = 0; r < table_.rows(); ++r) {
        double n = 0.0;
        for (double v : table_.input_row(r)) {
            n += v * v;
        }
        norms_[r] = std::sqrt(n);
    }
}

NeighborSet Analyzer::top_k_neighbors(std::uint32_t query_slot, std::size_t k) const {
    if (query_slot >= table_.rows()) {
        throw std::out_of_range("slot id out of range");
    }
    if (norms_[query_slot] == 0.0) {
        throw std::runtime_error("cosine of a zero vector");
    }
    NeighborSet set;
    set.query_slot = query_slot;
    if (k == 0) {
        return set;
    }
    const std::string& query_surface = lexicon_.slot(query_slot).surface;
    auto q = table_.input_row(query_slot);
    const double qn = norms_[query_slot];

    std::vector<NeighborEntry> scored;
    scored.reserve(table_.rows());
    for (std::uint32_t s = 0; s < table_.rows(); ++s) {
        if (norms_[s] == 0.0 || lexicon_.slot(s).surface == query_surface) {
            continue;
        }
        auto row = table_.input_row(s);
        double dot = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            dot += q[j] * row[j];
        }
        scored.push_back({s, std::clamp(dot / (qn * norms_[s]), -1.0, 1.0)});
    }
    auto better = [](const NeighborEntry& a, const NeighborEntry& b) {
        return a.score != b.score ? a.score > b.score : a.slot < b.slot;
    };
    if (k < scored.size()) {
        std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k),
                          scored.end(), better);
        scored.resize(k);
    } else {
        std::sort(scored.begin(), scored.end(), better);
    }
    set.entries = std::move(scored);
    return set;
}

std::map<std::string, double> Analyzer::collapsed_identity_scores(
    const NeighborSet& set, const FieldId& field_a, const FieldId& field_b) const {
    std::map<std::string, double> scores;
    for (const NeighborEntry& e : set.entries) {
        const auto& info = lexicon_.slot(e.slot);
        std::string key;
        if (info.scope == corpus::kGlobalScope) {
            key = global_key(info.surface);
        } else if (info.scope == field_a || info.scope == field_b) {
            key = collapsed_key(info.surface);
        } else {
            key = field_key(info.scope, info.surface);
        }
        auto [it, inserted] = scores.emplace(std::move(key), e.score);
        if (!inserted && e.score > it->second) {
            it->second = e.score;  // several slots may collapse to one identity
        }
    }
    return scores;
}

double Analyzer::term_distance(const std::string& surface, const FieldId& field_a,
                               const FieldId& field_b, std::size_t k, DisMode mode) const {
    if (!lexicon_.is_field_term(surface)) {
        throw std::runtime_error("not a field term: " + surface);
    }
    if (field_a == field_b) {
        throw std::runtime_error("term distance needs two distinct fields");
    }
    NeighborSet wa = top_k_neighbors(lexicon_.term_slot(surface, field_a), k);
    NeighborSet wb = top_k_neighbors(lexicon_.term_slot(surface, field_b), k);
    return jaccard_set_distance(collapsed_identity_scores(wa, field_a, field_b),
                                collapsed_identity_scores(wb, field_a, field_b), mode);
}

TermVariation Analyzer::avg_term_variation(const std::string& surface, std::size_t k,
                                           DisMode mode) const {
    const auto& fields = lexicon_.fields();
    if (fields.size() < 2) {
        throw std::runtime_error("term variation needs at least two fields");
    }
    TermVariation tv;
    tv.surface = surface;
    double sum = 0.0;
    double best = -1.0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        for (std::size_t j = i + 1; j < fields.size(); ++j) {
            double d = term_distance(surface, fields[i], fields[j], k, mode);
            tv.pairwise.emplace_back(fields[i], fields[j], d);
            sum += d;
            if (d > best) {
                best = d;
                tv.argmax_pair = {fields[i], fields[j]};
            }
        }
    }
    tv.average = sum / static_cast<double>(tv.pairwise.size());
    return tv;
}

std::vector<TermVariation> Analyzer::rank_terms_by_variation(std::size_t k, DisMode mode,
                                                             RankDirection direction,
                                                             std::size_t limit) const {
    std::vector<TermVariation> all;
    all.reserve(lexicon_.field_terms().size());
    for (const std::string& surface : lexicon_.field_terms()) {
        all.push_back(avg_term_variation(surface, k, mode));
    }
    std::sort(all.begin(), all.end(), [direction](const TermVariation& a,
                                                  const TermVariation& b) {
        if (a.average != b.average) {
            return direction == RankDirection::most ? a.average > b.average
                                                    : a.average < b.average;
        }
        return a.surface < b.surface;
    });
    if (all.size() > limit) {
        all.resize(limit);
    }
    return all;
}

double Analyzer::sim_from_neighbors(const NeighborSet& neighbors, std::uint32_t query_slot,
                                    const FieldId& field_a, const FieldId& field_b) const {
    if (frequencies_ == nullptr) {
        throw std::runtime_error("term-to-field similarity requires corpus frequencies");
    }
    double weighted = 0.0;
    std::size_t members = 0;
    for (const NeighborEntry& e : neighbors.entries) {
        if (lexicon_.slot(e.slot).scope == field_b) {
            weighted += e.score * frequencies_->frequency(e.slot, field_b);
            ++members;
        }
    }
    if (members == 0) {
        return 0.0;  // no neighbors from the other field: maximal dissimilarity
    }
    double sim = frequencies_->frequency(query_slot, field_a) * weighted /
                 static_cast<double>(members);
    return std::max(sim, 0.0);
}

double Analyzer::term_to_field_sim(const std::string& surface, const FieldId& field_a,
                                   const FieldId& field_b, std::size_t k) const {
    if (!lexicon_.is_field_term(surface)) {
        throw std::runtime_error("not a field term: " + surface);
    }
    std::uint32_t slot = lexicon_.term_slot(surface, field_a);
    return sim_from_neighbors(top_k_neighbors(slot, k), slot, field_a, field_b);
}

double Analyzer::field_distance(const FieldId& field_a, const FieldId& field_b,
                                std::size_t k) const {
    double total = 0.0;
    for (const std::string& surface : lexicon_.field_terms()) {
        total += term_to_field_sim(surface, field_a, field_b, k);
    }
    return scaled_field_distance(total);
}

FieldDistanceMatrix Analyzer::field_distance_matrix(std::size_t k) const {
    FieldDistanceMatrix m;
    m.fields = lexicon_.fields();
    const std::size_t n = m.fields.size();
    m.raw.assign(n, std::vector<double>(n, 0.0));
    m.symmetrized.assign(n, std::vector<double>(n, 0.0));

    // Neighbor sets of (term, f_i) are shared across all target fields.
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<std::uint32_t, NeighborSet>> sets;
        sets.reserve(lexicon_.field_terms().size());
        for (const std::string& surface : lexicon_.field_terms()) {
            std::uint32_t slot = lexicon_.term_slot(surface, m.fields[i]);
            sets.emplace_back(slot, top_k_neighbors(slot, k));
        }
        for (std::size_t j = 0; j < n; ++j) {
            double total = 0.0;
            for (const auto& [slot, neighbors] : sets) {
                total += sim_from_neighbors(neighbors, slot, m.fields[i], m.fields[j]);
            }
            m.raw[i][j] = scaled_field_distance(total);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m.symmetrized[i][j] = (m.raw[i][j] + m.raw[j][i]) / 2.0;
        }
    }
    return m;
}

}  // namespace fieldvar::metrics
