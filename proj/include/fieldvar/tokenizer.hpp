#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace fieldvar::corpus {

struct TokenizerConfig {
    bool lowercase = true;
    // Applied downstream (title-term selection), never inside tokenize().
    std::unordered_set<std::string> stopword_list;
    std::size_t min_token_length = 1;
    bool keep_internal_hyphens = true;
};

/// Splits on whitespace and punctuation. Hyphens with alphanumeric text on
/// both sides survive when keep_internal_hyphens is set ("public-key").
/// Deterministic; empty input yields an empty sequence.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config);

/// One surface form per line, blank lines ignored.
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

}  // namespace fieldvar::corpus
