#include "fieldvar/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fieldvar/io_util.hpp"

namespace fieldvar::model {

namespace {

// -log sigmoid(x) == softplus(-x), computed without overflow.
double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void Hyperparams::validate() const {
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (half_window < 1) throw std::invalid_argument("half_window must be >= 1");
    if (negatives < 1) throw std::invalid_argument("negatives must be >= 1");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (!(learning_rate_start >= learning_rate_end && learning_rate_end > 0.0)) {
        throw std::invalid_argument("need learning_rate_start >= learning_rate_end > 0");
    }
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (subsample < 0.0) throw std::invalid_argument("subsample must be >= 0");
}

bool EmbeddingTable::all_finite() const {
    for (double v : input_) {
        if (!std::isfinite(v)) return false;
    }
    for (double v : output_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

std::vector<double> context_vector(std::span<const std::uint32_t> context_slots,
                                   const EmbeddingTable& table) {
    if (context_slots.empty()) {
        throw std::invalid_argument("context window is empty");
    }
    std::vector<double> h(table.dim(), 0.0);
    for (std::uint32_t slot : context_slots) {
        auto row = table.input_row(slot);
        for (std::size_t j = 0; j < h.size(); ++j) {
            h[j] += row[j];
        }
    }
    double inv = 1.0 / static_cast<double>(context_slots.size());
    for (double& v : h) {
        v *= inv;
    }
    return h;
}

NegativeSampler::NegativeSampler(std::span<const std::int64_t> slot_counts, double power) {
    std::size_t n = slot_counts.size();
    weight_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        weight_[i] = slot_counts[i] > 0
                         ? std::pow(static_cast<double>(slot_counts[i]), power)
                         : 0.0;
        total_weight_ += weight_[i];
    }
    if (!(total_weight_ > 0.0)) {
        throw std::runtime_error("negative-sampling distribution is empty");
    }

    // Vose's alias construction; exact probabilities, O(1) draws.
    prob_.assign(n, 1.0);
    alias_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        alias_[i] = static_cast<std::uint32_t>(i);
    }
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = weight_[i] * static_cast<double>(n) / total_weight_;
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        std::uint32_t s = small.back();
        std::uint32_t g = large.back();
        small.pop_back();
        large.pop_back();
        prob_[s] = scaled[s];
        alias_[s] = g;
        scaled[g] = (scaled[g] + scaled[s]) - 1.0;
        (scaled[g] < 1.0 ? small : large).push_back(g);
    }
}

std::uint32_t NegativeSampler::draw(Rng& rng) const {
    double u = rng.next_double() * static_cast<double>(prob_.size());
    auto i = static_cast<std::size_t>(u);
    if (i >= prob_.size()) {
        i = prob_.size() - 1;
    }
    double frac = u - static_cast<double>(i);
    return frac < prob_[i] ? static_cast<std::uint32_t>(i) : alias_[i];
}

void NegativeSampler::sample(Rng& rng, std::uint32_t target, std::size_t n,
                             const std::vector<std::uint8_t>* eligible,
                             std::vector<std::uint32_t>& out) const {
    constexpr int kMaxRedraw = 100;
    for (std::size_t j = 0; j < n; ++j) {
        for (int attempt = 0; attempt < kMaxRedraw; ++attempt) {
            std::uint32_t s = draw(rng);
            if (s == target) continue;
            if (eligible != nullptr && (*eligible)[s] == 0) continue;
            out.push_back(s);
            break;
        }
    }
}

double NegativeSampler::probability(std::uint32_t slot) const {
    return weight_.at(slot) / total_weight_;
}

NsGradients ns_loss_and_grad(std::uint32_t center_slot, std::span<const double> context_vec,
                             std::span<const std::uint32_t> negatives,
                             const EmbeddingTable& table) {
    const std::size_t d = table.dim();
    if (context_vec.size() != d) {
        throw std::invalid_argument("context vector dimension mismatch");
    }
    NsGradients r;
    r.context_grad.assign(d, 0.0);
    auto accumulate = [&](std::uint32_t slot, bool positive) {
        auto u = table.output_row(slot);
        double dot = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            dot += u[j] * context_vec[j];
        }
        r.loss += positive ? softplus(-dot) : softplus(dot);
        double g = sigmoid(dot) - (positive ? 1.0 : 0.0);
        std::vector<double> og(d);
        for (std::size_t j = 0; j < d; ++j) {
            og[j] = g * context_vec[j];
            r.context_grad[j] += g * u[j];
        }
        r.output_grads.emplace_back(slot, std::move(og));
    };
    accumulate(center_slot, true);
    for (std::uint32_t neg : negatives) {
        accumulate(neg, false);
    }
    if (!std::isfinite(r.loss)) {
        throw std::runtime_error("non-finite loss at slot " + std::to_string(center_slot));
    }
    return r;
}

double apply_window_update(EmbeddingTable& table, std::uint32_t center_slot,
                           std::span<const std::uint32_t> context,
                           std::span<const std::uint32_t> negatives, double learning_rate,
                           std::vector<double>& scratch_h, std::vector<double>& scratch_g) {
    const std::size_t d = table.dim();
    if (context.empty()) {
        throw std::invalid_argument("context window is empty");
    }
    scratch_h.assign(d, 0.0);
    scratch_g.assign(d, 0.0);
    for (std::uint32_t slot : context) {
        auto row = table.input_row(slot);
        for (std::size_t j = 0; j < d; ++j) {
            scratch_h[j] += row[j];
        }
    }
    const double inv = 1.0 / static_cast<double>(context.size());
    for (double& v : scratch_h) {
        v *= inv;
    }

    double loss = 0.0;
    auto step = [&](std::uint32_t slot, bool positive) {
        auto out = table.output_row(slot);
        double dot = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            dot += out[j] * scratch_h[j];
        }
        loss += positive ? softplus(-dot) : softplus(dot);
        double g = sigmoid(dot) - (positive ? 1.0 : 0.0);
        for (std::size_t j = 0; j < d; ++j) {
            scratch_g[j] += g * out[j];
            out[j] -= learning_rate * g * scratch_h[j];
        }
    };
    step(center_slot, true);
    for (std::uint32_t neg : negatives) {
        step(neg, false);
    }
    if (!std::isfinite(loss)) {
        throw std::runtime_error("non-finite loss at slot " + std::to_string(center_slot) +
                                 " (learning rate too high?)");
    }

    const double scale = learning_rate * inv;
    for (std::uint32_t slot : context) {
        auto row = table.input_row(slot);
        for (std::size_t j = 0; j < d; ++j) {
            row[j] -= scale * scratch_g[j];
        }
    }
    return loss;
}

Trainer::Trainer(const corpus::ResolvedCorpora& resolved, const corpus::Lexicon& lexicon,
                 const Hyperparams& hp)
    : resolved_(resolved),
      lexicon_(lexicon),
      hp_(hp),
      table_(lexicon.slot_count(), hp.dim),
      sampler_(resolved.slot_totals, hp.unigram_power),
      rng_(hp.seed) {
    hp_.validate();

    // Canonical CBOW init: input rows uniform in [-0.5/d, 0.5/d], output zero.
    const double range = 0.5 / static_cast<double>(hp_.dim);
    for (std::size_t r = 0; r < table_.rows(); ++r) {
        auto row = table_.input_row(r);
        for (std::size_t j = 0; j < hp_.dim; ++j) {
            row[j] = rng_.next_in(-range, range);
        }
    }

    eligible_.resize(resolved_.fields.size());
    for (std::size_t f = 0; f < resolved_.fields.size(); ++f) {
        auto& mask = eligible_[f];
        mask.assign(lexicon_.slot_count(), 0);
        for (std::uint32_t s = 0; s < lexicon_.slot_count(); ++s) {
            const auto& scope = lexicon_.slot(s).scope;
            mask[s] = (scope == corpus::kGlobalScope || scope == resolved_.fields[f]) ? 1 : 0;
        }
    }

    for (const auto& stream : resolved_.streams) {
        if (stream.size() >= 2) {
            total_updates_ += stream.size();
        }
    }
    total_updates_ *= hp_.epochs;
}

double Trainer::current_learning_rate() const {
    if (total_updates_ == 0) {
        return hp_.learning_rate_start;
    }
    double progress = static_cast<double>(done_updates_.load(std::memory_order_relaxed)) /
                      static_cast<double>(total_updates_);
    if (progress > 1.0) {
        progress = 1.0;
    }
    return hp_.learning_rate_start +
           (hp_.learning_rate_end - hp_.learning_rate_start) * progress;
}

std::vector<std::uint32_t> Trainer::effective_stream(std::size_t field_index, Rng& rng) const {
    const auto& stream = resolved_.streams[field_index];
    if (hp_.subsample <= 0.0) {
        return stream;
    }
    // word2vec-style frequent-word subsampling over corpus-wide counts.
    double budget = hp_.subsample * static_cast<double>(std::accumulate(
                                        resolved_.totals.begin(), resolved_.totals.end(),
                                        std::int64_t{0}));
    std::vector<std::uint32_t> kept;
    kept.reserve(stream.size());
    for (std::uint32_t slot : stream) {
        auto cn = static_cast<double>(resolved_.slot_totals[slot]);
        double keep = (std::sqrt(cn / budget) + 1.0) * budget / cn;
        if (keep >= 1.0 || rng.next_double() < keep) {
            kept.push_back(slot);
        }
    }
    return kept;
}

double Trainer::pass_range(std::span<const std::uint32_t> stream, std::size_t field_index,
                           Rng& rng, std::uint64_t& windows_done) {
    const std::size_t s = hp_.half_window;
    const auto& mask = eligible_[field_index];
    std::vector<double> h, g;
    std::vector<std::uint32_t> context, negatives;
    context.reserve(2 * s);
    negatives.reserve(hp_.negatives);

    double loss_sum = 0.0;
    for (std::size_t t = 0; t < stream.size(); ++t) {
        std::size_t lo = t > s ? t - s : 0;
        std::size_t hi = std::min(stream.size(), t + s + 1);
        if (hi - lo <= 1) {
            continue;  // no context at all
        }
        context.clear();
        for (std::size_t u = lo; u < hi; ++u) {
            if (u != t) {
                context.push_back(stream[u]);
            }
        }
        negatives.clear();
        sampler_.sample(rng, stream[t], hp_.negatives, &mask, negatives);
        double lr = current_learning_rate();
        loss_sum += apply_window_update(table_, stream[t], context, negatives, lr, h, g);
        done_updates_.fetch_add(1, std::memory_order_relaxed);
        ++windows_done;
    }
    return loss_sum;
}

double Trainer::field_pass(std::size_t field_index) {
    std::vector<std::uint32_t> stream = effective_stream(field_index, rng_);
    std::uint64_t windows = 0;
    double loss = pass_range(stream, field_index, rng_, windows);
    return windows > 0 ? loss / static_cast<double>(windows) : 0.0;
}

EmbeddingTable Trainer::run(TrainStats* stats) {
    for (std::size_t epoch = 0; epoch < hp_.epochs; ++epoch) {
        double loss_sum = 0.0;
        std::uint64_t windows = 0;
        for (std::size_t f = 0; f < resolved_.streams.size(); ++f) {
            std::vector<std::uint32_t> stream = effective_stream(f, rng_);
            if (hp_.workers <= 1) {
                loss_sum += pass_range(stream, f, rng_, windows);
            } else {
                // Hogwild-style: workers update the shared table without
                // locks, tolerating lost updates. Nondeterministic.
                std::size_t nw = std::min(hp_.workers, std::max<std::size_t>(stream.size(), 1));
                std::vector<std::thread> threads;
                std::vector<double> losses(nw, 0.0);
                std::vector<std::uint64_t> counts(nw, 0);
                std::size_t chunk = (stream.size() + nw - 1) / nw;
                for (std::size_t w = 0; w < nw; ++w) {
                    std::uint64_t seed = rng_.next_u64();
                    std::size_t begin = w * chunk;
                    std::size_t end = std::min(stream.size(), begin + chunk);
                    if (begin >= end) {
                        continue;
                    }
                    threads.emplace_back([this, &stream, &losses, &counts, f, w, seed, begin,
                                          end] {
                        Rng worker_rng(seed);
                        std::span<const std::uint32_t> part(stream.data() + begin, end - begin);
                        losses[w] = pass_range(part, f, worker_rng, counts[w]);
                    });
                }
                for (auto& th : threads) {
                    th.join();
                }
                for (std::size_t w = 0; w < nw; ++w) {
                    loss_sum += losses[w];
                    windows += counts[w];
                }
            }
        }
        if (stats != nullptr) {
            stats->epoch_mean_loss.push_back(
                windows > 0 ? loss_sum / static_cast<double>(windows) : 0.0);
            stats->total_windows += windows;
        }
    }
    return table_;
}

EmbeddingTable train(const corpus::ResolvedCorpora& resolved, const corpus::Lexicon& lexicon,
                     const Hyperparams& hp, TrainStats* stats) {
    hp.validate();
    std::int64_t resolved_tokens = 0;
    for (std::int64_t t : resolved.totals) {
        resolved_tokens += t;
    }
    if (resolved_tokens == 0) {
        throw std::runtime_error("empty effective corpus: all tokens are out of vocabulary");
    }
    Trainer trainer(resolved, lexicon, hp);
    EmbeddingTable table = trainer.run(stats);
    if (!table.all_finite()) {
        throw std::runtime_error("training produced non-finite embeddings");
    }
    return table;
}

EmbeddingTable train(const std::vector<corpus::FieldCorpus>& corpora,
                     const corpus::Lexicon& lexicon, const Hyperparams& hp, TrainStats* stats) {
    corpus::ResolvedCorpora resolved = corpus::resolve_corpora(corpora, lexicon);
    return train(resolved, lexicon, hp, stats);
}

std::vector<double> embedding_of(const std::string& surface,
                                 const std::optional<corpus::FieldId>& field,
                                 const EmbeddingTable& table, const corpus::Lexicon& lexicon) {
    std::uint32_t slot = 0;
    if (lexicon.is_field_term(surface)) {
        if (!field.has_value()) {
            throw std::runtime_error("field term requires a field: " + surface);
        }
        slot = lexicon.term_slot(surface, *field);
    } else if (lexicon.is_global(surface)) {
        slot = lexicon.global_slot(surface);
    } else {
        throw std::runtime_error("unknown word: " + surface);
    }
    auto row = table.input_row(slot);
    return {row.begin(), row.end()};
}

void save_embeddings_text(const std::filesystem::path& path, const EmbeddingTable& table,
                          const corpus::Lexicon& lexicon) {
    if (table.rows() != lexicon.slot_count()) {
        throw std::runtime_error("embedding table does not match lexicon");
    }
    std::ostringstream out;
    out << table.rows() << ' ' << table.dim() << '\n';
    for (std::uint32_t r = 0; r < table.rows(); ++r) {
        const auto& info = lexicon.slot(r);
        out << info.surface << '\t' << info.scope << '\t';
        auto row = table.input_row(r);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j > 0) {
                out << ' ';
            }
            out << format_float(row[j]);
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

namespace {

void append_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

void append_f32(std::string& buf, float v) {
    append_u32(buf, std::bit_cast<std::uint32_t>(v));
}

std::uint32_t read_u32(const std::string& buf, std::size_t& pos) {
    if (pos + 4 > buf.size()) {
        throw std::runtime_error("invalid embedding file: truncated");
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    }
    pos += 4;
    return v;
}

std::string read_string(const std::string& buf, std::size_t& pos) {
    std::uint32_t len = read_u32(buf, pos);
    if (pos + len > buf.size()) {
        throw std::runtime_error("invalid embedding file: truncated string");
    }
    std::string s = buf.substr(pos, len);
    pos += len;
    return s;
}

constexpr char kBinaryMagic[4] = {'F', 'V', 'E', 'B'};

}  // namespace

void save_embeddings_binary(const std::filesystem::path& path, const EmbeddingTable& table,
                            const corpus::Lexicon& lexicon) {
    if (table.rows() != lexicon.slot_count()) {
        throw std::runtime_error("embedding table does not match lexicon");
    }
    std::string buf;
    buf.append(kBinaryMagic, 4);
    append_u32(buf, 1);  // version
    append_u32(buf, static_cast<std::uint32_t>(table.rows()));
    append_u32(buf, static_cast<std::uint32_t>(table.dim()));
    for (std::uint32_t r = 0; r < table.rows(); ++r) {
        const auto& info = lexicon.slot(r);
        append_u32(buf, static_cast<std::uint32_t>(info.surface.size()));
        buf.append(info.surface);
        append_u32(buf, static_cast<std::uint32_t>(info.scope.size()));
        buf.append(info.scope);
        for (double v : table.input_row(r)) {
            append_f32(buf, static_cast<float>(v));
        }
    }
    atomic_write(path, buf);
}

LoadedEmbeddings load_embeddings_text(const std::filesystem::path& path) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) {
        throw std::runtime_error("invalid embedding file: " + path.string());
    }
    std::istringstream header(lines[0]);
    std::size_t rows = 0, dim = 0;
    if (!(header >> rows >> dim) || dim == 0) {
        throw std::runtime_error("invalid embedding file header: " + path.string());
    }
    if (lines.size() < rows + 1) {
        throw std::runtime_error("invalid embedding file: truncated: " + path.string());
    }
    LoadedEmbeddings le{EmbeddingTable(rows, dim), {}};
    le.slots.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<std::string> cols = split(lines[r + 1], '\t');
        if (cols.size() != 3) {
            throw std::runtime_error("invalid embedding row " + std::to_string(r + 2) + " in " +
                                     path.string());
        }
        le.slots.push_back({cols[0], cols[1]});
        std::istringstream values(cols[2]);
        auto row = le.table.input_row(r);
        for (std::size_t j = 0; j < dim; ++j) {
            if (!(values >> row[j])) {
                throw std::runtime_error("invalid embedding row " + std::to_string(r + 2) +
                                         " in " + path.string());
            }
        }
    }
    return le;
}

LoadedEmbeddings load_embeddings_binary(const std::filesystem::path& path) {
    std::string buf = read_text_file(path);
    std::size_t pos = 0;
    if (buf.size() < 4 || std::memcmp(buf.data(), kBinaryMagic, 4) != 0) {
        throw std::runtime_error("invalid embedding file magic: " + path.string());
    }
    pos = 4;
    std::uint32_t version = read_u32(buf, pos);
    if (version != 1) {
        throw std::runtime_error("unsupported embedding file version: " + path.string());
    }
    std::uint32_t rows = read_u32(buf, pos);
    std::uint32_t dim = read_u32(buf, pos);
    if (dim == 0) {
        throw std::runtime_error("invalid embedding file header: " + path.string());
    }
    LoadedEmbeddings le{EmbeddingTable(rows, dim), {}};
    le.slots.reserve(rows);
    for (std::uint32_t r = 0; r < rows; ++r) {
        std::string surface = read_string(buf, pos);
        std::string scope = read_string(buf, pos);
        le.slots.push_back({std::move(surface), std::move(scope)});
        auto row = le.table.input_row(r);
        for (std::uint32_t j = 0; j < dim; ++j) {
            row[j] = std::bit_cast<float>(read_u32(buf, pos));
        }
    }
    return le;
}

}  // namespace fieldvar::model
