#pragma once

#include <map>

#include "fieldvar/model.hpp"

namespace fieldvar::metrics {

using corpus::FieldId;
using model::EmbeddingTable;

/// u.v / (|u||v|). Throws on zero vectors or mismatched dimensions.
double cosine(std::span<const double> u, std::span<const double> v);

enum class DisMode { cardinality, weighted };
enum class RankDirection { most, least };

DisMode parse_dis_mode(const std::string& name);
const char* dis_mode_name(DisMode mode);

struct NeighborEntry {
    std::uint32_t slot;
    double score;
};

/// The k most cosine-similar slots to a query, descending by score with
/// slot-id tie-break, excluding the query surface's own slots in every field.
struct NeighborSet {
    std::uint32_t query_slot = 0;
    std::vector<NeighborEntry> entries;
};

struct TermVariation {
    std::string surface;
    // Unordered field pairs in lexicographic order, with their distance.
    std::vector<std::tuple<FieldId, FieldId, double>> pairwise;
    double average = 0.0;
    std::pair<FieldId, FieldId> argmax_pair;
};

struct FieldDistanceMatrix {
    std::vector<FieldId> fields;
    std::vector<std::vector<double>> raw;          // directed
    std::vector<std::vector<double>> symmetrized;  // (raw + raw^T) / 2
};

/// Jaccard distance of two neighbor identity sets, 1 - overlap/union.
/// Cardinality mode uses set sizes; weighted mode aggregates scores floored
/// at zero: intersection sums (a+b)/2 over shared keys, union sums
/// max(a, b, 0) over all keys.
double jaccard_set_distance(const std::map<std::string, double>& a,
                            const std::map<std::string, double>& b, DisMode mode);

/// Exponential rescaling of an aggregated term-to-field similarity into a
/// field distance: expm1(1 - total) / expm1(1), clamped to [0, 1].
double scaled_field_distance(double total_sim);

// Read-only analysis over a trained table. All methods are pure; an
// Analyzer may be shared freely across threads. Frequencies are only needed
// by the sim / field-distance family.
class Analyzer {
public:
    Analyzer(const corpus::Lexicon& lexicon, const EmbeddingTable& table,
             const corpus::ResolvedCorpora* frequencies = nullptr);

    /// Brute-force scan over every slot; exact and deterministic. k is
    /// clamped to the eligible slot count.
    NeighborSet top_k_neighbors(std::uint32_t query_slot, std::size_t k) const;

    /// Dis^k between a term's two field embeddings. Neighbor slots scoped to
    /// either query field collapse to their surface before the overlap is
    /// taken; third-field and global neighbors keep full identity.
    double term_distance(const std::string& surface, const FieldId& field_a,
                         const FieldId& field_b, std::size_t k, DisMode mode) const;

    TermVariation avg_term_variation(const std::string& surface, std::size_t k,
                                     DisMode mode) const;

    std::vector<TermVariation> rank_terms_by_variation(std::size_t k, DisMode mode,
                                                       RankDirection direction,
                                                       std::size_t limit) const;

    /// sim^k: frequency- and cosine-weighted similarity of (surface, field_a)
    /// to field_b's term slots among its top-k neighbors; 0 when none appear.
    double term_to_field_sim(const std::string& surface, const FieldId& field_a,
                             const FieldId& field_b, std::size_t k) const;

    /// FieldDis^k for the ordered pair (field_a, field_b).
    double field_distance(const FieldId& field_a, const FieldId& field_b, std::size_t k) const;

    FieldDistanceMatrix field_distance_matrix(std::size_t k) const;

    const corpus::Lexicon& lexicon() const { return lexicon_; }
    const EmbeddingTable& table() const { return table_; }

private:
    std::map<std::string, double> collapsed_identity_scores(const NeighborSet& set,
                                                            const FieldId& field_a,
                                                            const FieldId& field_b) const;
    double sim_from_neighbors(const NeighborSet& neighbors, std::uint32_t query_slot,
                              const FieldId& field_a, const FieldId& field_b) const;

    const corpus::Lexicon& lexicon_;
    const EmbeddingTable& table_;
    const corpus::ResolvedCorpora* frequencies_;
    std::vector<double> norms_;
};

}  // namespace fieldvar::metrics
