#include "fieldvar/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "fieldvar/io_util.hpp"

namespace fieldvar::eval {

namespace {

double parse_score(const std::string& text, std::size_t line_no,
                   const std::filesystem::path& path) {
    try {
        std::size_t consumed = 0;
        double v = std::stod(text, &consumed);
        if (consumed != text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("bad annotation score on line " + std::to_string(line_no) +
                                 " of " + path.string());
    }
}

}  // namespace

AnnotationSet load_annotations(const std::filesystem::path& path, bool raw_per_annotator,
                               const std::set<std::string>* vocabulary) {
    std::vector<std::string> lines = read_lines(path);
    std::map<std::string, double> aggregated;
    if (raw_per_annotator) {
        std::map<std::string, std::pair<int, int>> tallies;  // surface -> (sum, count)
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (trim(lines[i]).empty()) {
                continue;
            }
            std::vector<std::string> cols = split(lines[i], '\t');
            if (cols.size() != 2) {
                throw std::runtime_error("bad annotation line " + std::to_string(i + 1) +
                                         " of " + path.string());
            }
            double v = parse_score(trim(cols[1]), i + 1, path);
            if (v != 1.0 && v != -1.0) {
                throw std::runtime_error("raw annotation must be +1 or -1 on line " +
                                         std::to_string(i + 1) + " of " + path.string());
            }
            auto& [sum, count] = tallies[trim(cols[0])];
            sum += v > 0 ? 1 : -1;
            ++count;
        }
        for (const auto& [surface, tally] : tallies) {
            if (tally.second < 5) {
                throw std::runtime_error("term " + surface + " has " +
                                         std::to_string(tally.second) +
                                         " annotations (need >= 5)");
            }
            aggregated[surface] = static_cast<double>(tally.first) / 5.0;
        }
    } else {
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (trim(lines[i]).empty()) {
                continue;
            }
            std::vector<std::string> cols = split(lines[i], '\t');
            if (cols.size() != 2) {
                throw std::runtime_error("bad annotation line " + std::to_string(i + 1) +
                                         " of " + path.string());
            }
            aggregated[trim(cols[0])] = parse_score(trim(cols[1]), i + 1, path);
        }
    }

    AnnotationSet set;
    for (const auto& [surface, score] : aggregated) {
        if (score < -1.0 || score > 1.0) {
            throw std::runtime_error("annotation score out of [-1, 1] for term " + surface);
        }
        if (vocabulary != nullptr && !vocabulary->contains(surface)) {
            std::cerr << "warning: dropping annotated term outside the vocabulary: " << surface
                      << "\n";
            continue;
        }
        set.entries[surface] = score;
    }
    if (set.entries.size() < 2) {
        throw std::runtime_error("need at least 2 annotated terms in " + path.string());
    }
    return set;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw std::invalid_argument("pearson: length mismatch");
    }
    if (xs.size() < 2) {
        throw std::invalid_argument("pearson: need at least 2 points");
    }
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx;
        double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw std::runtime_error("pearson: zero variance input");
    }
    return sxy / std::sqrt(sxx * syy);
}

double ndcg_at(const std::map<std::string, double>& model_scores,
               const std::map<std::string, double>& relevance, std::size_t rank) {
    if (rank < 1) {
        throw std::invalid_argument("ndcg rank must be >= 1");
    }
    struct Item {
        const std::string* surface;
        double score;
        double gain;
    };
    std::vector<Item> items;
    for (const auto& [surface, score] : model_scores) {
        auto it = relevance.find(surface);
        if (it != relevance.end()) {
            // Shift [-1, 1] relevance to non-negative gains, floored at 0.
            items.push_back({&surface, score, std::max(it->second + 1.0, 0.0)});
        }
    }
    if (items.empty()) {
        throw std::runtime_error("ndcg: no overlapping items");
    }
    std::size_t r = std::min(rank, items.size());

    auto by_model = [](const Item& a, const Item& b) {
        return a.score != b.score ? a.score > b.score : *a.surface < *b.surface;
    };
    auto by_gain = [](const Item& a, const Item& b) {
        return a.gain != b.gain ? a.gain > b.gain : *a.surface < *b.surface;
    };
    std::vector<Item> model_order = items;
    std::sort(model_order.begin(), model_order.end(), by_model);
    std::vector<Item> ideal_order = items;
    std::sort(ideal_order.begin(), ideal_order.end(), by_gain);

    double dcg = 0.0, idcg = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        double discount = std::log2(static_cast<double>(i) + 2.0);
        dcg += model_order[i].gain / discount;
        idcg += ideal_order[i].gain / discount;
    }
    if (idcg == 0.0) {
        throw std::runtime_error("ndcg: ideal DCG is zero (all relevance at the floor)");
    }
    return dcg / idcg;
}

std::vector<BaselineModel> train_separate_baseline(
    const std::vector<corpus::FieldCorpus>& corpora, const model::Hyperparams& hp,
    std::size_t min_count) {
    std::vector<BaselineModel> models;
    models.reserve(corpora.size());
    for (std::size_t i = 0; i < corpora.size(); ++i) {
        std::vector<corpus::FieldCorpus> single = {corpora[i]};
        std::set<std::string> vocab = corpus::build_global_vocab(single, {}, min_count);
        corpus::Lexicon lexicon =
            corpus::Lexicon::build({corpora[i].field}, {}, std::move(vocab));
        model::Hyperparams field_hp = hp;
        field_hp.seed = hp.seed + i;  // independent spaces
        model::EmbeddingTable table = model::train(single, lexicon, field_hp);
        models.push_back({corpora[i].field, std::move(lexicon), std::move(table)});
    }
    return models;
}

double baseline_term_distance(const std::string& surface, const BaselineModel& a,
                              const BaselineModel& b, std::size_t k, metrics::DisMode mode) {
    auto surfaces_of = [&](const BaselineModel& m) {
        if (!m.lexicon.is_global(surface)) {
            throw std::runtime_error("surface " + surface +
                                     " not in the baseline vocabulary of field " + m.field);
        }
        metrics::Analyzer analyzer(m.lexicon, m.table);
        metrics::NeighborSet set =
            analyzer.top_k_neighbors(m.lexicon.global_slot(surface), k);
        std::map<std::string, double> scores;
        for (const auto& e : set.entries) {
            scores[m.lexicon.slot(e.slot).surface] = e.score;
        }
        return scores;
    };
    return metrics::jaccard_set_distance(surfaces_of(a), surfaces_of(b), mode);
}

EvalReport compare_methods(const AnnotationSet& annotations,
                           const std::vector<MethodScores>& methods,
                           const std::vector<std::size_t>& ranks) {
    EvalReport report;
    report.ranks = ranks;
    for (const MethodScores& method : methods) {
        std::vector<double> xs, ys;
        std::map<std::string, double> covered;
        for (const auto& [surface, truth] : annotations.entries) {
            auto it = method.scores.find(surface);
            if (it == method.scores.end()) {
                throw std::runtime_error("method " + method.method +
                                         " is missing a score for term " + surface);
            }
            xs.push_back(it->second);
            ys.push_back(truth);
            covered[surface] = it->second;
        }
        EvalRow row;
        row.method = method.method;
        row.pearson = pearson(xs, ys);
        for (std::size_t rank : ranks) {
            row.ndcg.emplace_back(rank, ndcg_at(covered, annotations.entries, rank));
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

void save_eval_report(const std::filesystem::path& path, const EvalReport& report) {
    std::ostringstream out;
    out << "method\tpearson";
    for (std::size_t rank : report.ranks) {
        out << "\tndcg@" << rank;
    }
    out << '\n';
    for (const EvalRow& row : report.rows) {
        out << row.method << '\t' << format_float(row.pearson);
        for (const auto& [rank, value] : row.ndcg) {
            (void)rank;
            out << '\t' << format_float(value);
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

EvalReport load_eval_report(const std::filesystem::path& path) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) {
        throw std::runtime_error("invalid eval report: " + path.string());
    }
    std::vector<std::string> header = split(lines[0], '\t');
    if (header.size() < 2 || header[0] != "method" || header[1] != "pearson") {
        throw std::runtime_error("invalid eval report header: " + path.string());
    }
    EvalReport report;
    for (std::size_t c = 2; c < header.size(); ++c) {
        if (header[c].rfind("ndcg@", 0) != 0) {
            throw std::runtime_error("invalid eval report header: " + path.string());
        }
        report.ranks.push_back(std::stoul(header[c].substr(5)));
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        std::vector<std::string> cols = split(lines[i], '\t');
        if (cols.size() != header.size()) {
            throw std::runtime_error("invalid eval report line " + std::to_string(i + 1) +
                                     " of " + path.string());
        }
        EvalRow row;
        row.method = cols[0];
        row.pearson = std::stod(cols[1]);
        for (std::size_t c = 2; c < cols.size(); ++c) {
            row.ndcg.emplace_back(report.ranks[c - 2], std::stod(cols[c]));
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace fieldvar::eval
