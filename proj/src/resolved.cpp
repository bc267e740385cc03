#include "fieldvar/resolved.hpp"

#include <stdexcept>

namespace fieldvar::corpus {

std::size_t ResolvedCorpora::field_index(const FieldId& field) const {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == field) {
            return i;
        }
    }
    throw std::runtime_error("unknown field: " + field);
}

double ResolvedCorpora::frequency(std::uint32_t slot, const FieldId& field) const {
    std::size_t f = field_index(field);
    if (totals[f] == 0) {
        throw std::runtime_error("field " + field + " has no resolved tokens");
    }
    return static_cast<double>(counts[f].at(slot)) / static_cast<double>(totals[f]);
}

ResolvedCorpora resolve_corpora(const std::vector<FieldCorpus>& corpora,
                                const Lexicon& lexicon) {
    if (corpora.size() != lexicon.field_count()) {
        throw std::runtime_error("corpus fields do not match lexicon");
    }
    ResolvedCorpora rc;
    rc.fields = lexicon.fields();
    rc.streams.resize(rc.fields.size());
    rc.counts.assign(rc.fields.size(), std::vector<std::int64_t>(lexicon.slot_count(), 0));
    rc.totals.assign(rc.fields.size(), 0);
    rc.slot_totals.assign(lexicon.slot_count(), 0);

    for (const FieldCorpus& fc : corpora) {
        if (!lexicon.has_field(fc.field)) {
            throw std::runtime_error("corpus fields do not match lexicon: " + fc.field);
        }
        std::size_t f = lexicon.field_index(fc.field);
        auto& stream = rc.streams[f];
        stream.reserve(fc.body_tokens.size());
        for (const std::string& token : fc.body_tokens) {
            if (auto slot = lexicon.resolve(token, fc.field)) {
                stream.push_back(*slot);
                ++rc.counts[f][*slot];
                ++rc.slot_totals[*slot];
            }
        }
        rc.totals[f] = static_cast<std::int64_t>(stream.size());
    }
    return rc;
}

}  // namespace fieldvar::corpus
