#pragma once

#include "fieldvar/lexicon.hpp"

namespace fieldvar::corpus {

/// Per-field slot streams with out-of-vocabulary tokens dropped, plus the
/// slot counts the trainer and the frequency measure share. Field order
/// matches Lexicon::fields().
struct ResolvedCorpora {
    std::vector<FieldId> fields;
    std::vector<std::vector<std::uint32_t>> streams;
    std::vector<std::vector<std::int64_t>> counts;  // [field][slot]
    std::vector<std::int64_t> totals;               // resolved tokens per field
    std::vector<std::int64_t> slot_totals;          // per slot, summed over fields

    std::size_t field_index(const FieldId& field) const;

    /// Relative frequency of a slot within one field's resolved stream.
    /// OOV tokens are excluded from both numerator and denominator, so the
    /// values over all slots sum to 1 per field.
    double frequency(std::uint32_t slot, const FieldId& field) const;
};

ResolvedCorpora resolve_corpora(const std::vector<FieldCorpus>& corpora, const Lexicon& lexicon);

}  // namespace fieldvar::corpus
