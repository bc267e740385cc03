#include "fieldvar/lexicon.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "fieldvar/io_util.hpp"

namespace fieldvar::corpus {

std::map<FieldId, std::vector<std::string>> build_term_vocab(
    const std::vector<FieldCorpus>& corpora,
    const std::unordered_set<std::string>& stopwords,
    std::size_t n) {
    if (n < 1) {
        throw std::invalid_argument("terms per field must be >= 1");
    }
    std::map<FieldId, std::vector<std::string>> lists;
    for (const FieldCorpus& fc : corpora) {
        if (fc.title_tokens.empty()) {
            throw std::runtime_error("field " + fc.field + " has no title tokens");
        }
        std::map<std::string, std::size_t> counts;
        for (const std::string& t : fc.title_tokens) {
            if (!stopwords.contains(t)) {
                ++counts[t];
            }
        }
        std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
        // count descending, lexicographic among ties
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        if (ranked.size() < n) {
            std::cerr << "warning: field " << fc.field << " has only " << ranked.size()
                      << " distinct non-stopword title tokens (requested " << n << ")\n";
        }
        std::vector<std::string> list;
        for (std::size_t i = 0; i < ranked.size() && i < n; ++i) {
            list.push_back(ranked[i].first);
        }
        lists[fc.field] = std::move(list);
    }
    return lists;
}

std::set<std::string> build_global_vocab(const std::vector<FieldCorpus>& corpora,
                                         const std::set<std::string>& field_terms,
                                         std::size_t min_count) {
    std::map<std::string, std::size_t> counts;
    for (const FieldCorpus& fc : corpora) {
        for (const std::string& t : fc.body_tokens) {
            ++counts[t];
        }
    }
    std::set<std::string> vocab;
    for (const auto& [word, count] : counts) {
        if (count >= min_count && !field_terms.contains(word)) {
            vocab.insert(word);
        }
    }
    if (vocab.empty()) {
        throw std::runtime_error("global vocabulary is empty");
    }
    return vocab;
}

Lexicon Lexicon::build(std::vector<FieldId> fields,
                       std::map<FieldId, std::vector<std::string>> per_field_terms,
                       std::set<std::string> global_words) {
    if (fields.empty()) {
        throw std::invalid_argument("lexicon needs at least one field");
    }
    std::sort(fields.begin(), fields.end());
    if (std::adjacent_find(fields.begin(), fields.end()) != fields.end()) {
        throw std::invalid_argument("duplicate field id");
    }
    for (const auto& [field, terms] : per_field_terms) {
        if (std::find(fields.begin(), fields.end(), field) == fields.end()) {
            throw std::invalid_argument("term list for unknown field: " + field);
        }
        (void)terms;
    }

    Lexicon lex;
    lex.fields_ = std::move(fields);
    lex.per_field_terms_ = std::move(per_field_terms);
    lex.global_words_ = std::move(global_words);
    for (const auto& [field, terms] : lex.per_field_terms_) {
        lex.field_terms_.insert(terms.begin(), terms.end());
    }
    for (const std::string& term : lex.field_terms_) {
        if (lex.global_words_.contains(term)) {
            throw std::runtime_error("global vocabulary and field terms must be disjoint: " +
                                     term);
        }
    }
    for (std::size_t i = 0; i < lex.fields_.size(); ++i) {
        lex.field_pos_[lex.fields_[i]] = i;
    }

    lex.slots_.reserve(lex.global_words_.size() +
                       lex.field_terms_.size() * lex.fields_.size());
    for (const std::string& w : lex.global_words_) {
        lex.global_index_[w] = static_cast<std::uint32_t>(lex.slots_.size());
        lex.slots_.push_back({w, kGlobalScope});
    }
    for (const std::string& term : lex.field_terms_) {
        lex.term_base_[term] = static_cast<std::uint32_t>(lex.slots_.size());
        for (const FieldId& field : lex.fields_) {
            lex.slots_.push_back({term, field});
        }
    }
    return lex;
}

std::optional<std::uint32_t> Lexicon::resolve(const std::string& word,
                                              const FieldId& field) const {
    auto fit = field_pos_.find(field);
    if (fit == field_pos_.end()) {
        throw std::runtime_error("unknown field: " + field);
    }
    if (auto it = term_base_.find(word); it != term_base_.end()) {
        return it->second + static_cast<std::uint32_t>(fit->second);
    }
    if (auto it = global_index_.find(word); it != global_index_.end()) {
        return it->second;
    }
    return std::nullopt;
}

bool Lexicon::has_field(const FieldId& field) const { return field_pos_.contains(field); }

std::size_t Lexicon::field_index(const FieldId& field) const {
    auto it = field_pos_.find(field);
    if (it == field_pos_.end()) {
        throw std::runtime_error("unknown field: " + field);
    }
    return it->second;
}

bool Lexicon::is_field_term(const std::string& surface) const {
    return term_base_.contains(surface);
}

bool Lexicon::is_global(const std::string& word) const { return global_index_.contains(word); }

std::uint32_t Lexicon::term_slot(const std::string& surface, const FieldId& field) const {
    auto it = term_base_.find(surface);
    if (it == term_base_.end()) {
        throw std::runtime_error("not a field term: " + surface);
    }
    return it->second + static_cast<std::uint32_t>(field_index(field));
}

std::uint32_t Lexicon::global_slot(const std::string& word) const {
    auto it = global_index_.find(word);
    if (it == global_index_.end()) {
        throw std::runtime_error("not a global word: " + word);
    }
    return it->second;
}

void Lexicon::save_tsv(const std::filesystem::path& path) const {
    std::ostringstream out;
    out << "slot_id\tsurface\tscope\n";
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        out << i << '\t' << slots_[i].surface << '\t' << slots_[i].scope << '\n';
    }
    atomic_write(path, out.str());
}

Lexicon Lexicon::load_tsv(const std::filesystem::path& path) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || lines[0] != "slot_id\tsurface\tscope") {
        throw std::runtime_error("invalid lexicon file: " + path.string());
    }
    std::set<std::string> globals;
    std::set<FieldId> fields;
    std::map<FieldId, std::set<std::string>> terms_by_field;
    std::vector<SlotInfo> file_slots;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        std::vector<std::string> cols = split(lines[i], '\t');
        if (cols.size() != 3 || cols[0] != std::to_string(file_slots.size())) {
            throw std::runtime_error("invalid lexicon line " + std::to_string(i + 1) + " in " +
                                     path.string());
        }
        file_slots.push_back({cols[1], cols[2]});
        if (cols[2] == kGlobalScope) {
            globals.insert(cols[1]);
        } else {
            fields.insert(cols[2]);
            terms_by_field[cols[2]].insert(cols[1]);
        }
    }
    std::map<FieldId, std::vector<std::string>> per_field;
    for (const auto& [field, terms] : terms_by_field) {
        per_field[field] = std::vector<std::string>(terms.begin(), terms.end());
    }
    Lexicon lex = build(std::vector<FieldId>(fields.begin(), fields.end()),
                        std::move(per_field), std::move(globals));
    if (lex.slot_count() != file_slots.size()) {
        throw std::runtime_error("lexicon file is not in canonical form: " + path.string());
    }
    for (std::size_t i = 0; i < file_slots.size(); ++i) {
        if (file_slots[i].surface != lex.slots_[i].surface ||
            file_slots[i].scope != lex.slots_[i].scope) {
            throw std::runtime_error("lexicon file is not in canonical form: " + path.string());
        }
    }
    return lex;
}

}  // namespace fieldvar::corpus
