#pragma once

#include "fieldvar/metrics.hpp"

namespace fieldvar::eval {

using corpus::FieldId;

/// Human judgments of term variation, aggregated to scores in [-1, 1].
struct AnnotationSet {
    std::map<std::string, double> entries;
};

/// Loads either the pre-aggregated form (surface<TAB>score) or, with
/// raw_per_annotator, one +1/-1 judgment per line aggregated as sum/5 with
/// at least five judgments required per term. Surfaces missing from
/// `vocabulary` (when given) are dropped with a warning.
AnnotationSet load_annotations(const std::filesystem::path& path, bool raw_per_annotator,
                               const std::set<std::string>* vocabulary = nullptr);

/// Sample Pearson correlation. Throws on length mismatch, fewer than two
/// points, or zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// nDCG at `rank` with gain max(relevance + 1, 0) and log2(i + 1) discount.
/// Items are ranked by model score descending (ties by surface); the ideal
/// ranking sorts by relevance. Throws when the ideal DCG is zero.
double ndcg_at(const std::map<std::string, double>& model_scores,
               const std::map<std::string, double>& relevance, std::size_t rank);

/// A vanilla CBOW space trained on a single field (every word global).
struct BaselineModel {
    FieldId field;
    corpus::Lexicon lexicon;
    model::EmbeddingTable table;
};

std::vector<BaselineModel> train_separate_baseline(
    const std::vector<corpus::FieldCorpus>& corpora, const model::Hyperparams& hp,
    std::size_t min_count = 5);

/// Dis^k between two separately-trained spaces: neighbor sets are taken per
/// space and compared by surface identity.
double baseline_term_distance(const std::string& surface, const BaselineModel& a,
                              const BaselineModel& b, std::size_t k, metrics::DisMode mode);

struct MethodScores {
    std::string method;
    std::map<std::string, double> scores;  // higher = more varied
};

struct EvalRow {
    std::string method;
    double pearson = 0.0;
    std::vector<std::pair<std::size_t, double>> ndcg;  // (rank, value)
};

struct EvalReport {
    std::vector<std::size_t> ranks;
    std::vector<EvalRow> rows;
};

/// Pearson + nDCG of each method against the annotations. Every method must
/// cover every annotated surface.
EvalReport compare_methods(const AnnotationSet& annotations,
                           const std::vector<MethodScores>& methods,
                           const std::vector<std::size_t>& ranks);

void save_eval_report(const std::filesystem::path& path, const EvalReport& report);
EvalReport load_eval_report(const std::filesystem::path& path);

}  // namespace fieldvar::eval
