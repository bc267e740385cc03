#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "fieldvar/corpus.hpp"

namespace fieldvar::cli {

// Planted-structure corpus description. Divergent terms draw their contexts
// from a per-field topic vocabulary (disjoint across fields), stable terms
// from one shared vocabulary, so the ground truth of which terms vary is
// known by construction. Titles carry the planted terms so vocabulary
// selection captures them.
struct SynthSpec {
    std::filesystem::path root;
    std::vector<corpus::FieldId> fields;
    std::vector<std::string> divergent_terms;
    std::vector<std::string> stable_terms;
    std::size_t tokens_per_field = 200000;
    std::size_t filler_words = 2000;
    std::size_t topic_words_per_field = 300;
    std::size_t shared_topic_words = 300;
    double planted_rate = 0.3;  // fraction of sentences carrying a planted term
    std::size_t doc_tokens = 4000;
    // Skews how often each planted term is chosen (0 = uniform). Divergent
    // and stable terms are interleaved first, so the skew spreads term
    // frequencies an order of magnitude without favoring either class.
    double term_skew = 0.0;
    // Per-field overrides of tokens_per_field (unequal corpus sizes).
    std::map<corpus::FieldId, std::size_t> tokens_overrides;
    // Optional explicit vocabularies; generated names are used when empty.
    std::map<corpus::FieldId, std::vector<std::string>> topic_vocab;
    std::vector<std::string> shared_vocab;

    static SynthSpec parse_file(const std::filesystem::path& path);
    void validate() const;
};

/// Writes the corpus tree (papers/*.txt + titles.txt per field). The root is
/// replaced wholesale, and a fixed seed reproduces the tree byte for byte.
/// Token counts per field match the spec exactly.
void generate_synthetic_corpus(const SynthSpec& spec, std::uint64_t seed);

}  // namespace fieldvar::cli
