#pragma once

#include "fieldvar/metrics.hpp"

namespace fieldvar::cli {

/// Flat `key = value` file; '#' starts a comment, blank lines are skipped.
/// Duplicate keys are an error.
std::map<std::string, std::string> parse_key_value_file(const std::filesystem::path& path);

std::size_t parse_size(const std::string& key, const std::string& value);
double parse_double(const std::string& key, const std::string& value);
std::uint64_t parse_u64(const std::string& key, const std::string& value);

/// Everything one run needs: corpus location, vocabulary sizes, training
/// hyperparameters, and analysis settings. Unknown keys are rejected.
struct RunConfig {
    std::filesystem::path corpus_root;
    std::filesystem::path stopwords;  // optional; empty = no stopword list
    std::filesystem::path output_dir = "fieldvar-out";
    std::size_t terms_per_field = 200;
    std::size_t min_count = 5;
    model::Hyperparams hp;
    std::size_t k = 10000;
    metrics::DisMode dis_mode = metrics::DisMode::cardinality;

    static RunConfig parse_file(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    std::filesystem::path lexicon_path() const { return output_dir / "lexicon.tsv"; }
    std::filesystem::path embeddings_text_path() const { return output_dir / "embeddings.txt"; }
    std::filesystem::path embeddings_binary_path() const {
        return output_dir / "embeddings.bin";
    }
};

}  // namespace fieldvar::cli
