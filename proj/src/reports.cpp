#include "fieldvar/reports.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fieldvar/io_util.hpp"

namespace fieldvar::cli {

void save_term_variation_tsv(const std::filesystem::path& path,
                             const std::vector<metrics::TermVariation>& rows,
                             const std::vector<corpus::FieldId>& fields) {
    std::ostringstream out;
    out << "surface\tavg_dis\targmax_pair";
    for (std::size_t i = 0; i < fields.size(); ++i) {
        for (std::size_t j = i + 1; j < fields.size(); ++j) {
            out << "\tdis(" << fields[i] << ',' << fields[j] << ')';
        }
    }
    out << '\n';
    for (const metrics::TermVariation& tv : rows) {
        out << tv.surface << '\t' << format_float(tv.average) << '\t' << tv.argmax_pair.first
            << '-' << tv.argmax_pair.second;
        for (const auto& [a, b, d] : tv.pairwise) {
            (void)a;
            (void)b;
            out << '\t' << format_float(d);
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

std::vector<metrics::TermVariation> load_term_variation_tsv(
    const std::filesystem::path& path, std::vector<corpus::FieldId>& fields) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) {
        throw std::runtime_error("invalid term-variation report: " + path.string());
    }
    std::vector<std::string> header = split(lines[0], '\t');
    if (header.size() < 3 || header[0] != "surface" || header[1] != "avg_dis" ||
        header[2] != "argmax_pair") {
        throw std::runtime_error("invalid term-variation header: " + path.string());
    }
    std::vector<std::pair<corpus::FieldId, corpus::FieldId>> pairs;
    std::set<corpus::FieldId> field_set;
    for (std::size_t c = 3; c < header.size(); ++c) {
        const std::string& col = header[c];
        if (col.rfind("dis(", 0) != 0 || col.back() != ')') {
            throw std::runtime_error("invalid term-variation header: " + path.string());
        }
        std::vector<std::string> pair = split(col.substr(4, col.size() - 5), ',');
        if (pair.size() != 2) {
            throw std::runtime_error("invalid term-variation header: " + path.string());
        }
        pairs.emplace_back(pair[0], pair[1]);
        field_set.insert(pair[0]);
        field_set.insert(pair[1]);
    }
    fields.assign(field_set.begin(), field_set.end());

    std::vector<metrics::TermVariation> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        std::vector<std::string> cols = split(lines[i], '\t');
        if (cols.size() != header.size()) {
            throw std::runtime_error("invalid term-variation line " + std::to_string(i + 1) +
                                     " of " + path.string());
        }
        metrics::TermVariation tv;
        tv.surface = cols[0];
        tv.average = std::stod(cols[1]);
        std::size_t dash = cols[2].find('-');
        if (dash == std::string::npos) {
            throw std::runtime_error("invalid argmax pair on line " + std::to_string(i + 1) +
                                     " of " + path.string());
        }
        tv.argmax_pair = {cols[2].substr(0, dash), cols[2].substr(dash + 1)};
        for (std::size_t c = 3; c < cols.size(); ++c) {
            tv.pairwise.emplace_back(pairs[c - 3].first, pairs[c - 3].second,
                                     std::stod(cols[c]));
        }
        rows.push_back(std::move(tv));
    }
    return rows;
}

void save_neighbors_tsv(const std::filesystem::path& path, const metrics::NeighborSet& set,
                        const corpus::Lexicon& lexicon) {
    std::ostringstream out;
    out << "rank\tsurface\tscope\tcosine\n";
    for (std::size_t i = 0; i < set.entries.size(); ++i) {
        const auto& info = lexicon.slot(set.entries[i].slot);
        out << (i + 1) << '\t' << info.surface << '\t' << info.scope << '\t'
            << format_float(set.entries[i].score) << '\n';
    }
    atomic_write(path, out.str());
}

std::vector<NeighborRow> load_neighbors_tsv(const std::filesystem::path& path) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || lines[0] != "rank\tsurface\tscope\tcosine") {
        throw std::runtime_error("invalid neighbor report: " + path.string());
    }
    std::vector<NeighborRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        std::vector<std::string> cols = split(lines[i], '\t');
        if (cols.size() != 4) {
            throw std::runtime_error("invalid neighbor line " + std::to_string(i + 1) + " of " +
                                     path.string());
        }
        rows.push_back({std::stoul(cols[0]), cols[1], cols[2], std::stod(cols[3])});
    }
    return rows;
}

void save_field_matrix_csv(const std::filesystem::path& path,
                           const metrics::FieldDistanceMatrix& matrix, bool directed) {
    const auto& values = directed ? matrix.raw : matrix.symmetrized;
    std::ostringstream out;
    out << "field";
    for (const corpus::FieldId& f : matrix.fields) {
        out << ',' << f;
    }
    out << '\n';
    for (std::size_t i = 0; i < matrix.fields.size(); ++i) {
        out << matrix.fields[i];
        for (std::size_t j = 0; j < matrix.fields.size(); ++j) {
            out << ',' << format_float(values[i][j]);
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

void load_field_matrix_csv(const std::filesystem::path& path,
                           std::vector<corpus::FieldId>& fields,
                           std::vector<std::vector<double>>& values) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) {
        throw std::runtime_error("invalid field matrix: " + path.string());
    }
    std::vector<std::string> header = split(lines[0], ',');
    if (header.size() < 2 || header[0] != "field") {
        throw std::runtime_error("invalid field matrix header: " + path.string());
    }
    fields.assign(header.begin() + 1, header.end());
    values.clear();
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        std::vector<std::string> cols = split(lines[i], ',');
        if (cols.size() != header.size() || cols[0] != fields[values.size()]) {
            throw std::runtime_error("invalid field matrix line " + std::to_string(i + 1) +
                                     " of " + path.string());
        }
        std::vector<double> row;
        for (std::size_t c = 1; c < cols.size(); ++c) {
            row.push_back(std::stod(cols[c]));
        }
        values.push_back(std::move(row));
    }
    if (values.size() != fields.size()) {
        throw std::runtime_error("field matrix is not square: " + path.string());
    }
}

void save_coords_tsv(const std::filesystem::path& path, const std::vector<CoordRow>& rows) {
    std::ostringstream out;
    out << "surface\tfield\tx\ty\n";
    for (const CoordRow& row : rows) {
        out << row.surface << '\t' << row.scope;
        for (double c : row.coords) {
            out << '\t' << format_float(c);
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

std::vector<CoordRow> load_coords_tsv(const std::filesystem::path& path) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || lines[0] != "surface\tfield\tx\ty") {
        throw std::runtime_error("invalid coordinates file: " + path.string());
    }
    std::vector<CoordRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        std::vector<std::string> cols = split(lines[i], '\t');
        if (cols.size() < 3) {
            throw std::runtime_error("invalid coordinates line " + std::to_string(i + 1) +
                                     " of " + path.string());
        }
        CoordRow row{cols[0], cols[1], {}};
        for (std::size_t c = 2; c < cols.size(); ++c) {
            row.coords.push_back(std::stod(cols[c]));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void save_field_matrix_svg(const std::filesystem::path& path,
                           const metrics::FieldDistanceMatrix& matrix, bool directed) {
    const auto& values = directed ? matrix.raw : matrix.symmetrized;
    const std::size_t n = matrix.fields.size();
    const int cell = 56;
    const int margin = 110;
    const int size = margin + cell * static_cast<int>(n) + 16;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\""
        << size << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < n; ++i) {
        out << "<text x=\"" << (margin - 8) << "\" y=\"" << (margin + cell * i + cell / 2 + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\">"
            << matrix.fields[i] << "</text>\n";
        out << "<text x=\"" << (margin + cell * i + cell / 2) << "\" y=\"" << (margin - 10)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
            << matrix.fields[i] << "</text>\n";
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double v = std::clamp(values[i][j], 0.0, 1.0);
            // linear ramp, white at 0 to dark blue at 1
            int r = static_cast<int>(std::lround(255.0 - v * (255.0 - 8.0)));
            int g = static_cast<int>(std::lround(255.0 - v * (255.0 - 48.0)));
            int b = static_cast<int>(std::lround(255.0 - v * (255.0 - 107.0)));
            out << "<rect x=\"" << (margin + cell * j) << "\" y=\"" << (margin + cell * i)
                << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << r
                << ',' << g << ',' << b << ")\" stroke=\"#ccc\"/>\n";
            bool dark = v > 0.55;
            out << "<text x=\"" << (margin + cell * j + cell / 2) << "\" y=\""
                << (margin + cell * i + cell / 2 + 4)
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\""
                << " fill=\"" << (dark ? "white" : "black") << "\">" << format_float(v)
                << "</text>\n";
        }
    }
    out << "</svg>\n";
    atomic_write(path, out.str());
}

}  // namespace fieldvar::cli
