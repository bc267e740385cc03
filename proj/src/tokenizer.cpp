#include "fieldvar/tokenizer.hpp"

#include <cctype>
#include <stdexcept>

#include "fieldvar/io_util.hpp"

namespace fieldvar::corpus {

namespace {

// Bytes >= 0x80 are UTF-8 lead/continuation bytes; treat them as letters so
// multi-byte characters pass through intact.
bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
    if (config.min_token_length < 1) {
        throw std::invalid_argument("min_token_length must be >= 1");
    }
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= config.min_token_length) {
            tokens.push_back(current);
        }
        current.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        auto c = static_cast<unsigned char>(text[i]);
        if (is_word_byte(c)) {
            if (config.lowercase && c < 0x80) {
                c = static_cast<unsigned char>(std::tolower(c));
            }
            current.push_back(static_cast<char>(c));
        } else if (c == '-' && config.keep_internal_hyphens && !current.empty() &&
                   is_word_byte(static_cast<unsigned char>(current.back())) &&
                   i + 1 < text.size() && is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
            current.push_back('-');
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
    std::unordered_set<std::string> words;
    for (const std::string& line : read_lines(path)) {
        std::string w = trim(line);
        if (!w.empty()) {
            words.insert(w);
        }
    }
    return words;
}

}  // namespace fieldvar::corpus
