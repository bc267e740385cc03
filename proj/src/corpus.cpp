#include "fieldvar/corpus.hpp"

#include <algorithm>
#include <stdexcept>

#include "fieldvar/io_util.hpp"

namespace fieldvar::corpus {

std::vector<FieldCorpus> ingest_corpus(const std::filesystem::path& root,
                                       const TokenizerConfig& config) {
    if (!std::filesystem::is_directory(root)) {
        throw std::runtime_error("corpus root is not a directory: " + root.string());
    }
    std::vector<std::string> field_names;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (entry.is_directory()) {
            field_names.push_back(entry.path().filename().string());
        }
    }
    std::sort(field_names.begin(), field_names.end());
    if (field_names.size() < 2) {
        throw std::runtime_error("corpus root must contain at least two field directories: " +
                                 root.string());
    }

    std::vector<FieldCorpus> corpora;
    corpora.reserve(field_names.size());
    for (const std::string& name : field_names) {
        const std::filesystem::path field_dir = root / name;
        const std::filesystem::path titles_path = field_dir / "titles.txt";
        if (!std::filesystem::exists(titles_path)) {
            throw std::runtime_error("missing titles for field " + name);
        }

        std::vector<std::filesystem::path> docs;
        const std::filesystem::path papers_dir = field_dir / "papers";
        if (std::filesystem::is_directory(papers_dir)) {
            for (const auto& entry : std::filesystem::directory_iterator(papers_dir)) {
                if (entry.is_regular_file() && entry.path().extension() == ".txt") {
                    docs.push_back(entry.path());
                }
            }
        }
        if (docs.empty()) {
            throw std::runtime_error("no documents for field " + name);
        }
        std::sort(docs.begin(), docs.end());

        FieldCorpus fc;
        fc.field = name;
        for (const auto& doc : docs) {
            std::vector<std::string> tokens = tokenize(read_text_file(doc), config);
            fc.body_tokens.insert(fc.body_tokens.end(),
                                  std::make_move_iterator(tokens.begin()),
                                  std::make_move_iterator(tokens.end()));
        }
        if (fc.body_tokens.empty()) {
            throw std::runtime_error("field " + name + " has no body tokens after tokenization");
        }
        fc.title_tokens = tokenize(read_text_file(titles_path), config);
        corpora.push_back(std::move(fc));
    }
    return corpora;
}

}  // namespace fieldvar::corpus
