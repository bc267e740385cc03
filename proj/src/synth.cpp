#include "fieldvar/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fieldvar/io_util.hpp"
#include "fieldvar/prng.hpp"
#include "fieldvar/run_config.hpp"

namespace fieldvar::cli {

namespace {

bool plain_token(const std::string& s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-')) {
            return false;
        }
    }
    return s.front() != '-' && s.back() != '-';
}

std::vector<std::string> numbered_words(const std::string& prefix, std::size_t count) {
    std::vector<std::string> words;
    words.reserve(count);
    char buf[64];
    for (std::size_t i = 0; i < count; ++i) {
        std::snprintf(buf, sizeof(buf), "%s%04zu", prefix.c_str(), i);
        words.emplace_back(buf);
    }
    return words;
}

std::vector<std::string> parse_list(const std::string& value) {
    std::vector<std::string> items;
    for (const std::string& part : split(value, ',')) {
        std::string item = trim(part);
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

}  // namespace

SynthSpec SynthSpec::parse_file(const std::filesystem::path& path) {
    SynthSpec spec;
    for (const auto& [key, value] : parse_key_value_file(path)) {
        if (key == "root") {
            spec.root = value;
        } else if (key == "fields") {
            spec.fields = parse_list(value);
        } else if (key == "divergent_terms") {
            spec.divergent_terms = parse_list(value);
        } else if (key == "stable_terms") {
            spec.stable_terms = parse_list(value);
        } else if (key == "tokens_per_field") {
            spec.tokens_per_field = parse_size(key, value);
        } else if (key == "filler_words") {
            spec.filler_words = parse_size(key, value);
        } else if (key == "topic_words_per_field") {
            spec.topic_words_per_field = parse_size(key, value);
        } else if (key == "shared_topic_words") {
            spec.shared_topic_words = parse_size(key, value);
        } else if (key == "planted_rate") {
            spec.planted_rate = parse_double(key, value);
        } else if (key == "doc_tokens") {
            spec.doc_tokens = parse_size(key, value);
        } else if (key == "term_skew") {
            spec.term_skew = parse_double(key, value);
        } else if (key.rfind("tokens.", 0) == 0) {
            spec.tokens_overrides[key.substr(7)] = parse_size(key, value);
        } else if (key.rfind("topic_vocab.", 0) == 0) {
            spec.topic_vocab[key.substr(12)] = parse_list(value);
        } else if (key == "shared_vocab") {
            spec.shared_vocab = parse_list(value);
        } else {
            throw std::runtime_error("unknown synthesis key: " + key);
        }
    }
    return spec;
}

void SynthSpec::validate() const {
    if (root.empty()) {
        throw std::runtime_error("synthesis spec needs a root path");
    }
    if (fields.size() < 2) {
        throw std::runtime_error("synthesis needs at least two fields");
    }
    std::set<std::string> field_set(fields.begin(), fields.end());
    if (field_set.size() != fields.size()) {
        throw std::runtime_error("duplicate field in synthesis spec");
    }
    if (divergent_terms.empty() || stable_terms.empty()) {
        throw std::runtime_error("synthesis needs at least one divergent and one stable term");
    }
    if (!(planted_rate > 0.0 && planted_rate < 1.0)) {
        throw std::runtime_error("planted_rate must be in (0, 1)");
    }
    if (tokens_per_field < 100 || doc_tokens < 20) {
        throw std::runtime_error("token budgets too small for synthesis");
    }
    if (filler_words < 1) {
        throw std::runtime_error("filler_words must be >= 1");
    }
    if (term_skew < 0.0) {
        throw std::runtime_error("term_skew must be >= 0");
    }
    for (const auto& [field, budget] : tokens_overrides) {
        if (!field_set.contains(field)) {
            throw std::runtime_error("token override for unknown field: " + field);
        }
        if (budget < 100) {
            throw std::runtime_error("token budgets too small for synthesis");
        }
    }

    std::vector<std::string> planted = divergent_terms;
    planted.insert(planted.end(), stable_terms.begin(), stable_terms.end());
    std::set<std::string> planted_set(planted.begin(), planted.end());
    if (planted_set.size() != planted.size()) {
        throw std::runtime_error("planted terms must be distinct");
    }
    for (const std::string& f : fields) {
        if (!plain_token(f)) {
            throw std::runtime_error("field name must be a plain lowercase token: " + f);
        }
    }
    for (const std::string& t : planted) {
        if (!plain_token(t)) {
            throw std::runtime_error("planted term must be a plain lowercase token: " + t);
        }
    }
    for (const auto& [field, words] : topic_vocab) {
        if (!field_set.contains(field)) {
            throw std::runtime_error("topic vocabulary for unknown field: " + field);
        }
        (void)words;
    }

    // Topic vocabularies must stay disjoint from each other and from the
    // shared vocabulary, or the planted contrast dissolves.
    std::set<std::string> seen(shared_vocab.begin(), shared_vocab.end());
    for (const auto& [field, words] : topic_vocab) {
        (void)field;
        for (const std::string& w : words) {
            if (!seen.insert(w).second) {
                throw std::runtime_error("topic vocabularies overlap: " + w);
            }
        }
    }
    for (const std::string& t : planted) {
        if (seen.contains(t)) {
            throw std::runtime_error("planted term collides with a topic word: " + t);
        }
    }
}

void generate_synthetic_corpus(const SynthSpec& spec, std::uint64_t seed) {
    spec.validate();

    std::map<corpus::FieldId, std::vector<std::string>> topics = spec.topic_vocab;
    for (std::size_t f = 0; f < spec.fields.size(); ++f) {
        if (!topics.contains(spec.fields[f]) || topics[spec.fields[f]].empty()) {
            topics[spec.fields[f]] =
                numbered_words("t" + spec.fields[f], spec.topic_words_per_field);
        }
    }
    std::vector<std::string> shared = spec.shared_vocab;
    if (shared.empty()) {
        shared = numbered_words("sh", spec.shared_topic_words);
    }
    std::vector<std::string> filler = numbered_words("w", spec.filler_words);

    std::set<std::string> generated(filler.begin(), filler.end());
    generated.insert(shared.begin(), shared.end());
    for (const auto& [field, words] : topics) {
        (void)field;
        generated.insert(words.begin(), words.end());
    }
    std::vector<std::string> planted = spec.divergent_terms;
    planted.insert(planted.end(), spec.stable_terms.begin(), spec.stable_terms.end());
    for (const std::string& t : planted) {
        if (generated.contains(t)) {
            throw std::runtime_error("planted term collides with a generated word: " + t);
        }
    }

    if (std::filesystem::exists(spec.root)) {
        std::filesystem::remove_all(spec.root);
    }

    // interleave the classes so a frequency skew hits both evenly
    std::vector<std::pair<std::string, bool>> selection;  // (term, is_divergent)
    for (std::size_t i = 0;
         i < std::max(spec.divergent_terms.size(), spec.stable_terms.size()); ++i) {
        if (i < spec.divergent_terms.size()) {
            selection.emplace_back(spec.divergent_terms[i], true);
        }
        if (i < spec.stable_terms.size()) {
            selection.emplace_back(spec.stable_terms[i], false);
        }
    }

    for (std::size_t f = 0; f < spec.fields.size(); ++f) {
        const corpus::FieldId& field = spec.fields[f];
        Rng rng(seed + 1000003ull * (f + 1));
        const std::vector<std::string>& topic = topics[field];
        const std::size_t budget = spec.tokens_overrides.contains(field)
                                       ? spec.tokens_overrides.at(field)
                                       : spec.tokens_per_field;

        std::vector<std::string> tokens;
        tokens.reserve(budget + 32);
        std::vector<std::size_t> line_breaks;
        while (tokens.size() < budget) {
            if (rng.next_double() < spec.planted_rate) {
                double u = std::pow(rng.next_double(), 1.0 + spec.term_skew);
                auto idx = static_cast<std::size_t>(u * static_cast<double>(selection.size()));
                if (idx >= selection.size()) {
                    idx = selection.size() - 1;
                }
                const std::vector<std::string>& context =
                    selection[idx].second ? topic : shared;
                std::size_t left = 4 + rng.next_index(3);
                std::size_t right = 4 + rng.next_index(3);
                for (std::size_t i = 0; i < left; ++i) {
                    tokens.push_back(context[rng.next_index(context.size())]);
                }
                tokens.push_back(selection[idx].first);
                for (std::size_t i = 0; i < right; ++i) {
                    tokens.push_back(context[rng.next_index(context.size())]);
                }
            } else {
                std::size_t len = 8 + rng.next_index(8);
                for (std::size_t i = 0; i < len; ++i) {
                    // mild skew so filler frequencies spread without hubs
                    double u = rng.next_double();
                    tokens.push_back(filler[static_cast<std::size_t>(
                        u * std::sqrt(u) * static_cast<double>(filler.size()))]);
                }
            }
            line_breaks.push_back(tokens.size());
        }
        tokens.resize(budget);

        const std::filesystem::path papers = spec.root / field / "papers";
        std::filesystem::create_directories(papers);
        std::size_t doc_index = 0;
        std::size_t pos = 0;
        std::size_t break_idx = 0;
        while (pos < tokens.size()) {
            std::size_t end = std::min(tokens.size(), pos + spec.doc_tokens);
            std::ostringstream doc;
            std::size_t line_start = pos;
            for (std::size_t i = pos; i < end; ++i) {
                while (break_idx < line_breaks.size() && line_breaks[break_idx] <= i) {
                    ++break_idx;
                }
                bool line_end = (i + 1 == end) ||
                                (break_idx < line_breaks.size() &&
                                 line_breaks[break_idx] == i + 1);
                doc << tokens[i] << (line_end ? '\n' : ' ');
                if (line_end) {
                    line_start = i + 1;
                }
            }
            (void)line_start;
            char name[32];
            std::snprintf(name, sizeof(name), "doc_%04zu.txt", doc_index++);
            atomic_write(papers / name, doc.str());
            pos = end;
        }

        // Titles list every planted term with strictly decreasing counts so
        // top-n selection is unambiguous.
        std::ostringstream titles;
        for (std::size_t j = 0; j < planted.size(); ++j) {
            for (std::size_t rep = 0; rep < planted.size() - j + 1; ++rep) {
                titles << planted[j] << '\n';
            }
        }
        atomic_write(spec.root / field / "titles.txt", titles.str());
    }
}

}  // namespace fieldvar::cli
