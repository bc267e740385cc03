#pragma once

#include "fieldvar/metrics.hpp"

namespace fieldvar::cli {

// Report files round-trip through these pairs: parsing an emitted file and
// re-serializing it reproduces the file byte for byte.

void save_term_variation_tsv(const std::filesystem::path& path,
                             const std::vector<metrics::TermVariation>& rows,
                             const std::vector<corpus::FieldId>& fields);
std::vector<metrics::TermVariation> load_term_variation_tsv(const std::filesystem::path& path,
                                                            std::vector<corpus::FieldId>& fields);

void save_neighbors_tsv(const std::filesystem::path& path, const metrics::NeighborSet& set,
                        const corpus::Lexicon& lexicon);

struct NeighborRow {
    std::size_t rank;
    std::string surface;
    std::string scope;
    double cosine;
};
std::vector<NeighborRow> load_neighbors_tsv(const std::filesystem::path& path);

void save_field_matrix_csv(const std::filesystem::path& path,
                           const metrics::FieldDistanceMatrix& matrix, bool directed);
void load_field_matrix_csv(const std::filesystem::path& path,
                           std::vector<corpus::FieldId>& fields,
                           std::vector<std::vector<double>>& values);

struct CoordRow {
    std::string surface;
    std::string scope;
    std::vector<double> coords;
};
void save_coords_tsv(const std::filesystem::path& path, const std::vector<CoordRow>& rows);
std::vector<CoordRow> load_coords_tsv(const std::filesystem::path& path);

/// Self-contained heatmap rendering; darker cells mean larger distances.
void save_field_matrix_svg(const std::filesystem::path& path,
                           const metrics::FieldDistanceMatrix& matrix, bool directed);

}  // namespace fieldvar::cli
