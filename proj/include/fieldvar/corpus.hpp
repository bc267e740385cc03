#pragma once

#include <filesystem>

#include "fieldvar/tokenizer.hpp"

namespace fieldvar::corpus {

using FieldId = std::string;

/// One field's share of the corpus: the concatenated body token stream plus
/// the token stream of its article titles.
struct FieldCorpus {
    FieldId field;
    std::vector<std::string> body_tokens;
    std::vector<std::string> title_tokens;
};

/// Reads the tree <root>/<field>/papers/*.txt + <root>/<field>/titles.txt.
/// Fields and documents are visited in lexicographic order, so repeated runs
/// over the same tree produce identical token streams.
std::vector<FieldCorpus> ingest_corpus(const std::filesystem::path& root,
                                       const TokenizerConfig& config);

}  // namespace fieldvar::corpus
