#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

#include "fieldvar/corpus.hpp"

namespace fieldvar::corpus {

inline constexpr const char* kGlobalScope = "GLOBAL";

/// Top-n title tokens per field after stopword removal, ordered by count
/// descending with lexicographic tie-break. Warns to stderr and returns all
/// available tokens when a field has fewer than n distinct candidates.
std::map<FieldId, std::vector<std::string>> build_term_vocab(
    const std::vector<FieldCorpus>& corpora,
    const std::unordered_set<std::string>& stopwords,
    std::size_t n);

/// Body tokens whose total corpus count reaches min_count, minus every field
/// term (the vocabularies stay disjoint). Throws if nothing survives.
std::set<std::string> build_global_vocab(const std::vector<FieldCorpus>& corpora,
                                         const std::set<std::string>& field_terms,
                                         std::size_t min_count);

struct SlotInfo {
    std::string surface;
    std::string scope;  // kGlobalScope or a field name
};

// The dual vocabulary with dense slot ids. Canonical order: global words
// sorted lexicographically, then field terms sorted by (surface, field).
// Every term in V_F owns one slot per field, so a surface occurring in two
// fields maps to two distinct embeddings. Immutable once built; safe for
// unrestricted concurrent reads.
class Lexicon {
public:
    static Lexicon build(std::vector<FieldId> fields,
                         std::map<FieldId, std::vector<std::string>> per_field_terms,
                         std::set<std::string> global_words);

    std::size_t slot_count() const { return slots_.size(); }
    std::size_t field_count() const { return fields_.size(); }
    const std::vector<FieldId>& fields() const { return fields_; }
    const std::set<std::string>& global_words() const { return global_words_; }
    const std::set<std::string>& field_terms() const { return field_terms_; }
    const std::map<FieldId, std::vector<std::string>>& per_field_term_lists() const {
        return per_field_terms_;
    }

    /// Slot of (word, field): field terms route to their field-local slot,
    /// global words to their single slot, anything else to nullopt (the
    /// token is skipped in training). Unknown fields throw.
    std::optional<std::uint32_t> resolve(const std::string& word, const FieldId& field) const;

    bool has_field(const FieldId& field) const;
    std::size_t field_index(const FieldId& field) const;
    bool is_field_term(const std::string& surface) const;
    bool is_global(const std::string& word) const;
    std::uint32_t term_slot(const std::string& surface, const FieldId& field) const;
    std::uint32_t global_slot(const std::string& word) const;

    const SlotInfo& slot(std::uint32_t id) const { return slots_.at(id); }
    bool slot_is_term(std::uint32_t id) const { return slots_.at(id).scope != kGlobalScope; }

    void save_tsv(const std::filesystem::path& path) const;
    static Lexicon load_tsv(const std::filesystem::path& path);

private:
    std::vector<FieldId> fields_;
    std::map<FieldId, std::vector<std::string>> per_field_terms_;
    std::set<std::string> global_words_;
    std::set<std::string> field_terms_;
    std::vector<SlotInfo> slots_;
    std::unordered_map<std::string, std::uint32_t> global_index_;
    std::unordered_map<std::string, std::uint32_t> term_base_;
    std::unordered_map<std::string, std::size_t> field_pos_;
};

}  // namespace fieldvar::corpus
