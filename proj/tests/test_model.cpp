#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fieldvar/model.hpp"
#include "test_util.hpp"

using namespace fieldvar;
using namespace fieldvar::model;
using corpus::FieldCorpus;
using corpus::Lexicon;

namespace {

EmbeddingTable random_table(std::size_t rows, std::size_t dim, std::uint64_t seed,
                            double scale = 1.0) {
    EmbeddingTable t(rows, dim);
    Rng rng(seed);
    for (std::size_t r = 0; r < rows; ++r) {
        auto in = t.input_row(r);
        auto out = t.output_row(r);
        for (std::size_t j = 0; j < dim; ++j) {
            in[j] = rng.next_in(-scale, scale);
            out[j] = rng.next_in(-scale, scale);
        }
    }
    return t;
}

// Two-field setup over a tiny synthetic vocabulary; the term "pivot" is
// localized, everything else is global.
struct TinyWorld {
    std::vector<FieldCorpus> corpora;
    Lexicon lexicon;
};

TinyWorld tiny_world(std::size_t tokens_per_field) {
    std::vector<std::string> vocab_a = {"ga", "gb", "gc", "gd"};
    std::vector<std::string> vocab_b = {"ge", "gf", "gg", "gh"};
    FieldCorpus a{"alpha", {}, {"pivot"}};
    FieldCorpus b{"beta", {}, {"pivot"}};
    Rng rng(7);
    for (std::size_t i = 0; i < tokens_per_field; ++i) {
        a.body_tokens.push_back(i % 5 == 0 ? "pivot" : vocab_a[rng.next_index(4)]);
        b.body_tokens.push_back(i % 5 == 0 ? "pivot" : vocab_b[rng.next_index(4)]);
    }
    std::set<std::string> globals(vocab_a.begin(), vocab_a.end());
    globals.insert(vocab_b.begin(), vocab_b.end());
    Lexicon lex = Lexicon::build({"alpha", "beta"},
                                 {{"alpha", {"pivot"}}, {"beta", {"pivot"}}}, globals);
    return {{a, b}, lex};
}

bool rows_equal(const EmbeddingTable& x, const EmbeddingTable& y) {
    if (x.rows() != y.rows() || x.dim() != y.dim()) {
        return false;
    }
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t j = 0; j < x.dim(); ++j) {
            if (x.input_row(r)[j] != y.input_row(r)[j] ||
                x.output_row(r)[j] != y.output_row(r)[j]) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("context_vector: forced cases and recomputation oracle") {
    EmbeddingTable t = random_table(6, 4, 11);
    std::vector<std::uint32_t> one = {2};
    auto h1 = context_vector(one, t);
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(h1[j] == t.input_row(2)[j]);
    }

    // v and -v average to zero
    EmbeddingTable sym(2, 3);
    for (std::size_t j = 0; j < 3; ++j) {
        sym.input_row(0)[j] = 1.5 * static_cast<double>(j + 1);
        sym.input_row(1)[j] = -1.5 * static_cast<double>(j + 1);
    }
    std::vector<std::uint32_t> pair = {0, 1};
    for (double v : context_vector(pair, sym)) {
        CHECK(v == 0.0);
    }

    std::vector<std::uint32_t> five = {0, 1, 3, 4, 5};
    auto h5 = context_vector(five, t);
    for (std::size_t j = 0; j < 4; ++j) {
        double expect = 0.0;
        for (auto s : five) {
            expect += t.input_row(s)[j];
        }
        expect /= 5.0;
        CHECK(h5[j] == doctest::Approx(expect).epsilon(1e-12));
    }

    CHECK_THROWS_AS(context_vector({}, t), std::invalid_argument);
}

TEST_CASE("negative_sample: degenerate distribution always hits the only slot") {
    std::vector<std::int64_t> counts = {1, 0};
    NegativeSampler sampler(counts, 1.0);
    Rng rng(3);
    std::vector<std::uint32_t> out;
    sampler.sample(rng, 1, 50, nullptr, out);
    REQUIRE(out.size() == 50);
    for (auto s : out) {
        CHECK(s == 0);
    }
}

TEST_CASE("negative_sample: power 0 gives a uniform draw histogram") {
    std::vector<std::int64_t> counts = {4, 900, 13, 77, 250, 1, 38, 612, 5, 120};
    NegativeSampler sampler(counts, 0.0);
    Rng rng(17);
    std::vector<std::size_t> histogram(counts.size(), 0);
    const std::size_t draws = 100000;
    for (std::size_t i = 0; i < draws; ++i) {
        ++histogram[sampler.draw(rng)];
    }
    double p = 1.0 / static_cast<double>(counts.size());
    double sigma = std::sqrt(static_cast<double>(draws) * p * (1.0 - p));
    for (std::size_t s = 0; s < counts.size(); ++s) {
        CHECK(std::abs(static_cast<double>(histogram[s]) -
                       static_cast<double>(draws) * p) <= 3.0 * sigma);
    }
}

TEST_CASE("negative_sample: power 0.75 histogram matches the analytic distribution") {
    std::vector<std::int64_t> counts = {3, 7, 1, 12, 5, 9, 2, 8, 4, 6};
    NegativeSampler sampler(counts, 0.75);

    // analytic distribution straight from the counts
    std::vector<double> expected(counts.size());
    double total = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        expected[i] = std::pow(static_cast<double>(counts[i]), 0.75);
        total += expected[i];
    }
    for (double& p : expected) {
        p /= total;
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
        CHECK(sampler.probability(static_cast<std::uint32_t>(i)) ==
              doctest::Approx(expected[i]).epsilon(1e-12));
    }

    Rng rng(29);
    std::vector<std::size_t> histogram(counts.size(), 0);
    const std::size_t draws = 1000000;
    for (std::size_t i = 0; i < draws; ++i) {
        ++histogram[sampler.draw(rng)];
    }
    for (std::size_t s = 0; s < counts.size(); ++s) {
        double mean = static_cast<double>(draws) * expected[s];
        double sigma = std::sqrt(mean * (1.0 - expected[s]));
        CHECK(std::abs(static_cast<double>(histogram[s]) - mean) <= 3.0 * sigma);
    }
}

TEST_CASE("negative_sample: target redraw and eligibility mask") {
    std::vector<std::int64_t> counts = {10, 10, 10, 10, 10, 10};
    NegativeSampler sampler(counts, 1.0);
    Rng rng(5);
    std::vector<std::uint8_t> even_only = {1, 0, 1, 0, 1, 0};
    std::vector<std::uint32_t> out;
    for (int i = 0; i < 2000; ++i) {
        out.clear();
        sampler.sample(rng, 2, 5, &even_only, out);
        REQUIRE(out.size() == 5);
        for (auto s : out) {
            CHECK(s != 2);
            CHECK(s % 2 == 0);
        }
    }
}

TEST_CASE("ns_loss_and_grad: zero vectors give 2 ln 2") {
    EmbeddingTable t(3, 4);  // all zeros
    std::vector<double> h(4, 0.0);
    std::vector<std::uint32_t> negs = {1};
    auto g = ns_loss_and_grad(0, h, negs, t);
    CHECK(g.loss == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("ns_loss_and_grad: saturated positive term loses nothing") {
    EmbeddingTable t(2, 4);
    std::vector<double> h(4, 10.0);
    for (std::size_t j = 0; j < 4; ++j) {
        t.output_row(0)[j] = 10.0;  // u_c . h = 400, sigma ~ 1
        t.output_row(1)[j] = -10.0;
    }
    std::vector<std::uint32_t> negs = {1};
    auto g = ns_loss_and_grad(0, h, negs, t);
    CHECK(g.loss < 1e-12);  // negative term is saturated too
}

TEST_CASE("ns_loss_and_grad: analytic gradients match central finite differences") {
    const std::size_t dim = 10;
    Rng seed_rng(101);
    for (int instance = 0; instance < 10; ++instance) {
        EmbeddingTable t = random_table(8, dim, seed_rng.next_u64());
        std::vector<double> h(dim);
        for (auto& v : h) {
            v = seed_rng.next_in(-1.0, 1.0);
        }
        std::vector<std::uint32_t> negs = {2, 3, 4, 5, 6};
        auto g = ns_loss_and_grad(1, h, negs, t);

        const double step = 1e-5;
        auto check_rel = [](double analytic, double numeric) {
            double denom = std::max(std::abs(numeric), 1e-8);
            CHECK(std::abs(analytic - numeric) / denom < 1e-4);
        };
        for (std::size_t j = 0; j < dim; ++j) {
            std::vector<double> hp = h, hm = h;
            hp[j] += step;
            hm[j] -= step;
            double numeric = (ns_loss_and_grad(1, hp, negs, t).loss -
                              ns_loss_and_grad(1, hm, negs, t).loss) /
                             (2.0 * step);
            check_rel(g.context_grad[j], numeric);
        }
        for (const auto& [slot, grad] : g.output_grads) {
            for (std::size_t j = 0; j < dim; ++j) {
                EmbeddingTable tp = t, tm = t;
                tp.output_row(slot)[j] += step;
                tm.output_row(slot)[j] -= step;
                double numeric = (ns_loss_and_grad(1, h, negs, tp).loss -
                                  ns_loss_and_grad(1, h, negs, tm).loss) /
                                 (2.0 * step);
                check_rel(grad[j], numeric);
            }
        }
    }
}

TEST_CASE("apply_window_update agrees with ns_loss_and_grad plus manual SGD") {
    const std::size_t dim = 6;
    EmbeddingTable fused = random_table(20, dim, 42);
    EmbeddingTable manual = fused;
    std::vector<std::uint32_t> context = {7, 3, 7, 11};  // repeated slot on purpose
    std::vector<std::uint32_t> negs = {1, 14, 18};
    const double lr = 0.1;

    std::vector<double> h, g;
    double fused_loss = apply_window_update(fused, 5, context, negs, lr, h, g);

    auto ctx_vec = context_vector(context, manual);
    auto grads = ns_loss_and_grad(5, ctx_vec, negs, manual);
    CHECK(fused_loss == doctest::Approx(grads.loss).epsilon(1e-12));
    for (const auto& [slot, grad] : grads.output_grads) {
        auto row = manual.output_row(slot);
        for (std::size_t j = 0; j < dim; ++j) {
            row[j] -= lr * grad[j];
        }
    }
    const double inv = 1.0 / static_cast<double>(context.size());
    for (auto slot : context) {
        auto row = manual.input_row(slot);
        for (std::size_t j = 0; j < dim; ++j) {
            row[j] -= lr * inv * grads.context_grad[j];
        }
    }
    for (std::size_t r = 0; r < fused.rows(); ++r) {
        for (std::size_t j = 0; j < dim; ++j) {
            CHECK(fused.input_row(r)[j] ==
                  doctest::Approx(manual.input_row(r)[j]).epsilon(1e-12));
            CHECK(fused.output_row(r)[j] ==
                  doctest::Approx(manual.output_row(r)[j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("train: descent on a learnable toy corpus") {
    TinyWorld world = tiny_world(4000);
    Hyperparams hp;
    hp.dim = 12;
    hp.half_window = 3;
    hp.negatives = 4;
    hp.epochs = 2;
    hp.seed = 9;
    TrainStats stats;
    auto table = train(world.corpora, world.lexicon, hp, &stats);
    REQUIRE(stats.epoch_mean_loss.size() == 2);
    CHECK(stats.epoch_mean_loss[1] < stats.epoch_mean_loss[0]);
    CHECK(table.all_finite());
}

TEST_CASE("train: loss is non-increasing over three epochs at 50k tokens") {
    TinyWorld world = tiny_world(25000);  // two fields -> 50k tokens
    Hyperparams hp;
    hp.dim = 16;
    hp.half_window = 2;
    hp.negatives = 5;
    hp.epochs = 3;
    hp.seed = 13;
    TrainStats stats;
    train(world.corpora, world.lexicon, hp, &stats);
    REQUIRE(stats.epoch_mean_loss.size() == 3);
    CHECK(stats.epoch_mean_loss[1] <= stats.epoch_mean_loss[0]);
    CHECK(stats.epoch_mean_loss[2] <= stats.epoch_mean_loss[1]);
}

TEST_CASE("train: fixed seed and a single worker are bit-reproducible") {
    TinyWorld world = tiny_world(1200);
    Hyperparams hp;
    hp.dim = 8;
    hp.half_window = 2;
    hp.epochs = 2;
    hp.seed = 77;
    hp.workers = 1;
    auto t1 = train(world.corpora, world.lexicon, hp);
    auto t2 = train(world.corpora, world.lexicon, hp);
    CHECK(rows_equal(t1, t2));
}

TEST_CASE("train: processing one field never touches foreign term rows") {
    TinyWorld world = tiny_world(1500);
    auto resolved = corpus::resolve_corpora(world.corpora, world.lexicon);
    Hyperparams hp;
    hp.dim = 10;
    hp.half_window = 3;
    hp.seed = 21;
    Trainer trainer(resolved, world.lexicon, hp);

    std::vector<std::uint32_t> beta_slots;
    for (std::uint32_t s = 0; s < world.lexicon.slot_count(); ++s) {
        if (world.lexicon.slot(s).scope == "beta") {
            beta_slots.push_back(s);
        }
    }
    REQUIRE_FALSE(beta_slots.empty());
    std::vector<double> before;
    for (auto s : beta_slots) {
        auto in = trainer.table().input_row(s);
        auto out = trainer.table().output_row(s);
        before.insert(before.end(), in.begin(), in.end());
        before.insert(before.end(), out.begin(), out.end());
    }

    trainer.field_pass(0);  // alpha

    std::size_t pos = 0;
    for (auto s : beta_slots) {
        auto in = trainer.table().input_row(s);
        auto out = trainer.table().output_row(s);
        for (double v : in) {
            CHECK(v == before[pos++]);
        }
        for (double v : out) {
            CHECK(v == before[pos++]);
        }
    }
}

TEST_CASE("train: all-OOV corpus is an error") {
    FieldCorpus a{"a", {"zz", "zz"}, {"t"}};
    FieldCorpus b{"b", {"qq"}, {"t"}};
    auto lex = Lexicon::build({"a", "b"}, {{"a", {"t"}}}, {"known"});
    Hyperparams hp;
    hp.dim = 4;
    CHECK_THROWS_WITH_AS(train({a, b}, lex, hp),
                         "empty effective corpus: all tokens are out of vocabulary",
                         std::runtime_error);
}

TEST_CASE("train: improves the full-softmax log likelihood oracle") {
    TinyWorld world = tiny_world(3000);
    auto resolved = corpus::resolve_corpora(world.corpora, world.lexicon);
    Hyperparams hp;
    hp.dim = 12;
    hp.half_window = 3;
    hp.epochs = 4;
    hp.seed = 31;

    // mean log P(center | context) under the exact softmax over the slots
    // occurring in each field; the training surrogate should raise it
    auto softmax_ll = [&](const EmbeddingTable& table) {
        double ll = 0.0;
        std::size_t windows = 0;
        for (std::size_t f = 0; f < resolved.streams.size(); ++f) {
            std::vector<std::uint32_t> present;
            for (std::uint32_t s = 0; s < world.lexicon.slot_count(); ++s) {
                if (resolved.counts[f][s] > 0) {
                    present.push_back(s);
                }
            }
            const auto& stream = resolved.streams[f];
            for (std::size_t t = 2; t + 2 < stream.size(); t += 7) {
                std::vector<std::uint32_t> ctx = {stream[t - 2], stream[t - 1],
                                                  stream[t + 1], stream[t + 2]};
                auto h = context_vector(ctx, table);
                double target = 0.0, maxdot = -1e300;
                std::vector<double> dots(present.size());
                for (std::size_t i = 0; i < present.size(); ++i) {
                    auto u = table.output_row(present[i]);
                    double dot = 0.0;
                    for (std::size_t j = 0; j < h.size(); ++j) {
                        dot += u[j] * h[j];
                    }
                    dots[i] = dot;
                    maxdot = std::max(maxdot, dot);
                    if (present[i] == stream[t]) {
                        target = dot;
                    }
                }
                double z = 0.0;
                for (double dot : dots) {
                    z += std::exp(dot - maxdot);
                }
                ll += target - (maxdot + std::log(z));
                ++windows;
            }
        }
        return ll / static_cast<double>(windows);
    };

    Trainer trainer(resolved, world.lexicon, hp);
    double before = softmax_ll(trainer.table());
    auto table = trainer.run();
    double after = softmax_ll(table);
    CHECK(after > before);
}

TEST_CASE("train: frequent-word subsampling shrinks the stream and stays finite") {
    TinyWorld world = tiny_world(3000);
    Hyperparams hp;
    hp.dim = 8;
    hp.half_window = 2;
    hp.epochs = 1;
    hp.seed = 3;
    TrainStats plain, thinned;
    train(world.corpora, world.lexicon, hp, &plain);
    hp.subsample = 1e-3;
    auto table = train(world.corpora, world.lexicon, hp, &thinned);
    CHECK(table.all_finite());
    CHECK(thinned.total_windows < plain.total_windows);
    CHECK(thinned.total_windows > 0);
}

TEST_CASE("train: throughput mode produces a finite table") {
    TinyWorld world = tiny_world(2000);
    Hyperparams hp;
    hp.dim = 8;
    hp.half_window = 2;
    hp.epochs = 2;
    hp.workers = 2;
    auto table = train(world.corpora, world.lexicon, hp);
    CHECK(table.all_finite());
}

TEST_CASE("embedding_of: slot lookups and declared errors") {
    TinyWorld world = tiny_world(300);
    Hyperparams hp;
    hp.dim = 6;
    hp.half_window = 2;
    hp.epochs = 1;
    auto table = train(world.corpora, world.lexicon, hp);

    auto g1 = embedding_of("ga", corpus::FieldId("alpha"), table, world.lexicon);
    auto g2 = embedding_of("ga", corpus::FieldId("beta"), table, world.lexicon);
    auto g3 = embedding_of("ga", std::nullopt, table, world.lexicon);
    CHECK(g1 == g2);
    CHECK(g1 == g3);

    auto p = embedding_of("pivot", corpus::FieldId("alpha"), table, world.lexicon);
    auto row = table.input_row(world.lexicon.term_slot("pivot", "alpha"));
    CHECK(std::equal(p.begin(), p.end(), row.begin()));

    CHECK_THROWS_WITH_AS(embedding_of("pivot", std::nullopt, table, world.lexicon),
                         "field term requires a field: pivot", std::runtime_error);
    CHECK_THROWS_AS(embedding_of("missing", std::nullopt, table, world.lexicon),
                    std::runtime_error);
}

TEST_CASE("embedding exports: text and binary round-trips") {
    TinyWorld world = tiny_world(400);
    Hyperparams hp;
    hp.dim = 5;
    hp.half_window = 2;
    hp.epochs = 1;
    auto table = train(world.corpora, world.lexicon, hp);

    testutil::TempDir dir("export");
    auto txt = dir.path() / "emb.txt";
    auto bin = dir.path() / "emb.bin";
    save_embeddings_text(txt, table, world.lexicon);
    save_embeddings_binary(bin, table, world.lexicon);

    // parse -> reserialize is a fixed point for the text format
    auto loaded_txt = load_embeddings_text(txt);
    REQUIRE(loaded_txt.slots.size() == world.lexicon.slot_count());
    std::string first = read_text_file(txt);
    save_embeddings_text(dir.path() / "emb2.txt", loaded_txt.table, world.lexicon);
    CHECK(read_text_file(dir.path() / "emb2.txt") == first);

    // binary reload preserves the float32 payload exactly
    auto loaded_bin = load_embeddings_binary(bin);
    REQUIRE(loaded_bin.slots.size() == world.lexicon.slot_count());
    for (std::uint32_t r = 0; r < table.rows(); ++r) {
        CHECK(loaded_bin.slots[r].surface == world.lexicon.slot(r).surface);
        CHECK(loaded_bin.slots[r].scope == world.lexicon.slot(r).scope);
        for (std::size_t j = 0; j < table.dim(); ++j) {
            CHECK(loaded_bin.table.input_row(r)[j] ==
                  static_cast<double>(static_cast<float>(table.input_row(r)[j])));
        }
    }
    save_embeddings_binary(dir.path() / "emb2.bin", loaded_bin.table, world.lexicon);
    CHECK(read_text_file(dir.path() / "emb2.bin") == read_text_file(bin));

    CHECK_THROWS_AS(load_embeddings_binary(txt), std::runtime_error);
}

TEST_CASE("hyperparams validation") {
    Hyperparams hp;
    hp.dim = 0;
    CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
    hp = Hyperparams{};
    hp.learning_rate_end = 0.0;
    CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
    hp = Hyperparams{};
    hp.learning_rate_end = hp.learning_rate_start * 2;
    CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
}

}  // TEST_SUITE
