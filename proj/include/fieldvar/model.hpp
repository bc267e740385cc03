#pragma once

#include <atomic>
#include <optional>
#include <span>
#include <vector>

#include "fieldvar/prng.hpp"
#include "fieldvar/resolved.hpp"

namespace fieldvar::model {

struct Hyperparams {
    std::size_t dim = 100;
    std::size_t half_window = 24;  // s: context half-size
    std::size_t negatives = 5;
    std::size_t epochs = 5;
    double learning_rate_start = 0.05;
    double learning_rate_end = 0.0001;
    std::uint64_t seed = 1;
    double unigram_power = 0.75;
    double subsample = 0.0;  // frequent-word subsampling threshold; 0 disables
    std::size_t workers = 1; // >1 enables the lock-free throughput mode

    void validate() const;
};

/// Input and output parameter matrices over all lexical slots. Rows are
/// contiguous doubles; the table is immutable after training and safe for
/// unrestricted concurrent reads.
class EmbeddingTable {
public:
    EmbeddingTable(std::size_t rows, std::size_t dim)
        : dim_(dim), input_(rows * dim, 0.0), output_(rows * dim, 0.0) {}

    std::size_t rows() const { return dim_ == 0 ? 0 : input_.size() / dim_; }
    std::size_t dim() const { return dim_; }

    std::span<double> input_row(std::size_t r) { return {input_.data() + r * dim_, dim_}; }
    std::span<const double> input_row(std::size_t r) const {
        return {input_.data() + r * dim_, dim_};
    }
    std::span<double> output_row(std::size_t r) { return {output_.data() + r * dim_, dim_}; }
    std::span<const double> output_row(std::size_t r) const {
        return {output_.data() + r * dim_, dim_};
    }

    bool all_finite() const;

private:
    std::size_t dim_;
    std::vector<double> input_;
    std::vector<double> output_;
};

/// Mean of the context slots' input vectors. The denominator is the actual
/// context size (windows truncate at sequence edges). Throws on empty input.
std::vector<double> context_vector(std::span<const std::uint32_t> context_slots,
                                   const EmbeddingTable& table);

/// Walker alias sampler over slot counts raised to `power`. Slots with zero
/// count never appear regardless of the exponent.
class NegativeSampler {
public:
    NegativeSampler(std::span<const std::int64_t> slot_counts, double power);

    /// One unconditioned draw from the distribution.
    std::uint32_t draw(Rng& rng) const;

    /// n draws, redrawing any draw that hits `target` or a slot rejected by
    /// `eligible` (when provided). A draw whose redraw budget runs out is
    /// skipped, so the result can be shorter than n.
    void sample(Rng& rng, std::uint32_t target, std::size_t n,
                const std::vector<std::uint8_t>* eligible,
                std::vector<std::uint32_t>& out) const;

    double probability(std::uint32_t slot) const;
    std::size_t size() const { return prob_.size(); }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
    std::vector<double> weight_;
    double total_weight_ = 0.0;
};

/// Loss and exact analytic gradients for one negative-sampling step:
///   loss = -log sigmoid(u_c . h) - sum_neg log sigmoid(-u_n . h)
struct NsGradients {
    double loss = 0.0;
    std::vector<double> context_grad;  // dL/dh
    // dL/du for the center slot followed by each negative, in input order.
    std::vector<std::pair<std::uint32_t, std::vector<double>>> output_grads;
};

NsGradients ns_loss_and_grad(std::uint32_t center_slot, std::span<const double> context_vec,
                             std::span<const std::uint32_t> negatives,
                             const EmbeddingTable& table);

/// Fused SGD step on one window: updates the output rows of center/negatives
/// and spreads the context gradient (scaled by 1/|context|) onto each context
/// slot's input row. Returns the window loss. Throws if the loss goes
/// non-finite (divergent learning rate).
double apply_window_update(EmbeddingTable& table, std::uint32_t center_slot,
                           std::span<const std::uint32_t> context,
                           std::span<const std::uint32_t> negatives, double learning_rate,
                           std::vector<double>& scratch_h, std::vector<double>& scratch_g);

struct TrainStats {
    std::vector<double> epoch_mean_loss;
    std::uint64_t total_windows = 0;
};

/// CBOW trainer over the resolved field streams. Deterministic contract:
/// with workers == 1 and a fixed seed the resulting table is bit-identical
/// across runs. With workers > 1 the table is updated lock-free and results
/// are nondeterministic. While a field is being processed only global slots
/// and that field's term slots change; negatives that land on foreign-field
/// slots are redrawn.
class Trainer {
public:
    Trainer(const corpus::ResolvedCorpora& resolved, const corpus::Lexicon& lexicon,
            const Hyperparams& hp);

    EmbeddingTable run(TrainStats* stats = nullptr);

    /// One deterministic pass over one field's stream; returns the mean
    /// window loss. Exposed so localization can be checked per pass.
    double field_pass(std::size_t field_index);

    const EmbeddingTable& table() const { return table_; }

private:
    std::vector<std::uint32_t> effective_stream(std::size_t field_index, Rng& rng) const;
    double pass_range(std::span<const std::uint32_t> stream, std::size_t field_index, Rng& rng,
                      std::uint64_t& windows_done);
    double current_learning_rate() const;

    const corpus::ResolvedCorpora& resolved_;
    const corpus::Lexicon& lexicon_;
    Hyperparams hp_;
    EmbeddingTable table_;
    NegativeSampler sampler_;
    std::vector<std::vector<std::uint8_t>> eligible_;  // per field
    std::uint64_t total_updates_ = 0;
    std::atomic<std::uint64_t> done_updates_ = 0;
    Rng rng_;
};

EmbeddingTable train(const corpus::ResolvedCorpora& resolved, const corpus::Lexicon& lexicon,
                     const Hyperparams& hp, TrainStats* stats = nullptr);
EmbeddingTable train(const std::vector<corpus::FieldCorpus>& corpora,
                     const corpus::Lexicon& lexicon, const Hyperparams& hp,
                     TrainStats* stats = nullptr);

/// Input vector of a surface form. Global words ignore the field argument;
/// field terms require it. Unknown surfaces throw.
std::vector<double> embedding_of(const std::string& surface,
                                 const std::optional<corpus::FieldId>& field,
                                 const EmbeddingTable& table, const corpus::Lexicon& lexicon);

// Embedding exports: a text format (8 significant digits) and a binary
// mirror (little-endian 32-bit floats, length-prefixed strings) for fast
// reload. Both carry the input vectors in slot order.
void save_embeddings_text(const std::filesystem::path& path, const EmbeddingTable& table,
                          const corpus::Lexicon& lexicon);
void save_embeddings_binary(const std::filesystem::path& path, const EmbeddingTable& table,
                            const corpus::Lexicon& lexicon);

struct LoadedEmbeddings {
    EmbeddingTable table;  // output rows zero
    std::vector<corpus::SlotInfo> slots;
};

LoadedEmbeddings load_embeddings_text(const std::filesystem::path& path);
LoadedEmbeddings load_embeddings_binary(const std::filesystem::path& path);

}  // namespace fieldvar::model
