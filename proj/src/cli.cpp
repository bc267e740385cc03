#include "fieldvar/cli.hpp"

#include <iostream>

#include <CLI11.hpp>

#include "fieldvar/eval.hpp"
#include "fieldvar/io_util.hpp"
#include "fieldvar/pca.hpp"
#include "fieldvar/reports.hpp"
#include "fieldvar/run_config.hpp"
#include "fieldvar/synth.hpp"

namespace fieldvar::cli {

namespace {

corpus::TokenizerConfig tokenizer_config(const RunConfig& cfg) {
    corpus::TokenizerConfig tc;
    if (!cfg.stopwords.empty()) {
        tc.stopword_list = corpus::load_stopwords(cfg.stopwords);
    }
    return tc;
}

corpus::Lexicon require_lexicon(const RunConfig& cfg) {
    const auto path = cfg.lexicon_path();
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error("lexicon not found (run build-vocab first): " + path.string());
    }
    return corpus::Lexicon::load_tsv(path);
}

model::EmbeddingTable require_model(const RunConfig& cfg, const corpus::Lexicon& lexicon) {
    const auto bin = cfg.embeddings_binary_path();
    const auto txt = cfg.embeddings_text_path();
    model::LoadedEmbeddings loaded = [&] {
        if (std::filesystem::exists(bin)) {
            return model::load_embeddings_binary(bin);
        }
        if (std::filesystem::exists(txt)) {
            return model::load_embeddings_text(txt);
        }
        throw std::runtime_error("model not found (run train first): " +
                                 cfg.output_dir.string());
    }();
    if (loaded.slots.size() != lexicon.slot_count()) {
        throw std::runtime_error("embedding file does not match lexicon");
    }
    for (std::uint32_t i = 0; i < loaded.slots.size(); ++i) {
        if (loaded.slots[i].surface != lexicon.slot(i).surface ||
            loaded.slots[i].scope != lexicon.slot(i).scope) {
            throw std::runtime_error("embedding file does not match lexicon");
        }
    }
    return std::move(loaded.table);
}

struct CommonFlags {
    std::string config_path;
    std::string corpus_root;
    std::string stopwords;
    std::string output_dir;

    RunConfig resolve() const {
        RunConfig cfg =
            config_path.empty() ? RunConfig{} : RunConfig::parse_file(config_path);
        if (!corpus_root.empty()) {
            cfg.corpus_root = corpus_root;
        }
        if (!stopwords.empty()) {
            cfg.stopwords = stopwords;
        }
        if (!output_dir.empty()) {
            cfg.output_dir = output_dir;
        }
        return cfg;
    }

    void attach(CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file (key = value)");
        sub->add_option("--corpus", corpus_root, "corpus root directory");
        sub->add_option("--stopwords", stopwords, "stopword list, one per line");
        sub->add_option("--out-dir", output_dir, "output directory for artifacts");
    }
};

void require_corpus_root(const RunConfig& cfg) {
    if (cfg.corpus_root.empty()) {
        throw std::runtime_error("corpus root required (--corpus or config corpus_root)");
    }
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"field-localized word embeddings and cross-field variation analysis"};
    app.name("fieldvar");
    app.require_subcommand(1);

    CommonFlags vocab_flags;
    std::size_t terms_per_field = 0;
    std::size_t min_count_flag = 0;
    auto* sub_vocab =
        app.add_subcommand("build-vocab", "ingest the corpus and build the dual vocabulary");
    vocab_flags.attach(sub_vocab);
    sub_vocab->add_option("--terms-per-field", terms_per_field,
                          "title terms selected per field");
    sub_vocab->add_option("--min-count", min_count_flag, "global vocabulary count threshold");

    CommonFlags train_flags;
    bool deterministic = false;
    auto* sub_train =
        app.add_subcommand("train", "train the partially-localized CBOW embeddings");
    train_flags.attach(sub_train);
    sub_train->add_flag("--deterministic", deterministic,
                        "single training worker (bit-reproducible)");

    CommonFlags tv_flags;
    std::size_t tv_k = 0;
    std::string tv_mode;
    std::string tv_term;
    std::size_t tv_top = 0;
    std::size_t tv_bottom = 0;
    auto* sub_tv = app.add_subcommand("term-var", "rank terms by cross-field variation");
    tv_flags.attach(sub_tv);
    sub_tv->add_option("--k", tv_k, "neighborhood size");
    sub_tv->add_option("--mode", tv_mode, "cardinality or weighted");
    sub_tv->add_option("--term", tv_term, "report a single term");
    sub_tv->add_option("--top", tv_top, "report the N most varied terms");
    sub_tv->add_option("--bottom", tv_bottom, "report the N least varied terms");

    CommonFlags nb_flags;
    std::string nb_term;
    std::string nb_field;
    std::size_t nb_k = 10;
    auto* sub_nb = app.add_subcommand("neighbors", "nearest neighbors of a term");
    nb_flags.attach(sub_nb);
    sub_nb->add_option("--term", nb_term, "query surface form")->required();
    sub_nb->add_option("--field", nb_field, "field of the query (for field terms)");
    sub_nb->add_option("--k", nb_k, "neighbor count");

    CommonFlags fv_flags;
    std::size_t fv_k = 0;
    bool fv_directed = false;
    bool fv_svg = false;
    auto* sub_fv = app.add_subcommand("field-var", "field-level distance matrix");
    fv_flags.attach(sub_fv);
    sub_fv->add_option("--k", fv_k, "neighborhood size");
    sub_fv->add_flag("--directed", fv_directed, "emit the raw directed matrix");
    sub_fv->add_flag("--svg", fv_svg, "also render a heatmap SVG");

    CommonFlags ev_flags;
    std::string ev_annotations;
    std::string ev_ranks = "30,50";
    std::string ev_baseline;
    bool ev_raw = false;
    std::size_t ev_k = 0;
    std::string ev_mode;
    auto* sub_ev = app.add_subcommand("eval", "compare model scores with annotations");
    ev_flags.attach(sub_ev);
    sub_ev->add_option("--annotations", ev_annotations, "annotation TSV")->required();
    sub_ev->add_option("--ndcg-ranks", ev_ranks, "comma-separated nDCG ranks");
    sub_ev->add_option("--baseline", ev_baseline, "optional baseline: separate-cbow");
    sub_ev->add_flag("--raw", ev_raw, "annotations are raw per-annotator +1/-1 rows");
    sub_ev->add_option("--k", ev_k, "neighborhood size");
    sub_ev->add_option("--mode", ev_mode, "cardinality or weighted");

    CommonFlags pj_flags;
    std::string pj_scope = "terms";
    std::string pj_out = "coords.tsv";
    auto* sub_pj = app.add_subcommand("project", "2-D projection of embeddings");
    pj_flags.attach(sub_pj);
    sub_pj->add_option("--scope", pj_scope, "terms (field slots) or all");
    sub_pj->add_option("--out", pj_out, "coordinates file (relative to the output dir)");

    std::string sy_spec;
    std::uint64_t sy_seed = 1;
    std::string sy_root;
    auto* sub_sy = app.add_subcommand("synth", "generate a planted-structure corpus");
    sub_sy->add_option("--spec", sy_spec, "synthesis spec file")->required();
    sub_sy->add_option("--seed", sy_seed, "generator seed");
    sub_sy->add_option("--root", sy_root, "override the spec's root path");

    std::vector<const char*> argv;
    argv.push_back("fieldvar");
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(sub_vocab)) {
            RunConfig cfg = vocab_flags.resolve();
            if (terms_per_field > 0) {
                cfg.terms_per_field = terms_per_field;
            }
            if (min_count_flag > 0) {
                cfg.min_count = min_count_flag;
            }
            require_corpus_root(cfg);
            corpus::TokenizerConfig tc = tokenizer_config(cfg);
            auto corpora = corpus::ingest_corpus(cfg.corpus_root, tc);
            auto term_lists =
                corpus::build_term_vocab(corpora, tc.stopword_list, cfg.terms_per_field);
            std::set<std::string> vf;
            for (const auto& [field, list] : term_lists) {
                (void)field;
                vf.insert(list.begin(), list.end());
            }
            auto vg = corpus::build_global_vocab(corpora, vf, cfg.min_count);
            std::vector<corpus::FieldId> fields;
            for (const auto& fc : corpora) {
                fields.push_back(fc.field);
            }
            auto lexicon = corpus::Lexicon::build(fields, term_lists, vg);
            lexicon.save_tsv(cfg.lexicon_path());
            std::cout << "lexicon: " << lexicon.global_words().size() << " global words, "
                      << lexicon.field_terms().size() << " field terms, "
                      << lexicon.slot_count() << " slots -> " << cfg.lexicon_path().string()
                      << "\n";
        } else if (app.got_subcommand(sub_train)) {
            RunConfig cfg = train_flags.resolve();
            require_corpus_root(cfg);
            if (deterministic) {
                cfg.hp.workers = 1;
            }
            auto lexicon = require_lexicon(cfg);
            auto corpora = corpus::ingest_corpus(cfg.corpus_root, tokenizer_config(cfg));
            auto resolved = corpus::resolve_corpora(corpora, lexicon);
            model::TrainStats stats;
            auto table = model::train(resolved, lexicon, cfg.hp, &stats);
            model::save_embeddings_text(cfg.embeddings_text_path(), table, lexicon);
            model::save_embeddings_binary(cfg.embeddings_binary_path(), table, lexicon);
            std::cout << "trained " << table.rows() << " slots x " << table.dim() << " dims, "
                      << stats.total_windows << " windows, final epoch loss "
                      << format_float(stats.epoch_mean_loss.empty()
                                          ? 0.0
                                          : stats.epoch_mean_loss.back())
                      << " -> " << cfg.embeddings_binary_path().string() << "\n";
        } else if (app.got_subcommand(sub_tv)) {
            RunConfig cfg = tv_flags.resolve();
            std::size_t k = tv_k > 0 ? tv_k : cfg.k;
            metrics::DisMode mode =
                tv_mode.empty() ? cfg.dis_mode : metrics::parse_dis_mode(tv_mode);
            auto lexicon = require_lexicon(cfg);
            auto table = require_model(cfg, lexicon);
            metrics::Analyzer analyzer(lexicon, table);
            bool top_given = sub_tv->count("--top") > 0;
            bool bottom_given = sub_tv->count("--bottom") > 0;
            std::vector<metrics::TermVariation> rows;
            if (!tv_term.empty()) {
                rows.push_back(analyzer.avg_term_variation(tv_term, k, mode));
            } else if (top_given && bottom_given) {
                throw std::runtime_error("choose one of --top or --bottom");
            } else if (bottom_given) {
                rows = analyzer.rank_terms_by_variation(k, mode, metrics::RankDirection::least,
                                                        tv_bottom);
            } else {
                rows = analyzer.rank_terms_by_variation(k, mode, metrics::RankDirection::most,
                                                        top_given ? tv_top : 20);
            }
            auto path = cfg.output_dir / "term_variation.tsv";
            save_term_variation_tsv(path, rows, lexicon.fields());
            std::cout << "term variation (" << metrics::dis_mode_name(mode) << ", k=" << k
                      << "): " << rows.size() << " terms -> " << path.string() << "\n";
        } else if (app.got_subcommand(sub_nb)) {
            RunConfig cfg = nb_flags.resolve();
            auto lexicon = require_lexicon(cfg);
            auto table = require_model(cfg, lexicon);
            metrics::Analyzer analyzer(lexicon, table);
            std::uint32_t slot = 0;
            std::string file_tag = nb_term;
            if (lexicon.is_field_term(nb_term)) {
                if (nb_field.empty()) {
                    throw std::runtime_error("field term requires a field: " + nb_term);
                }
                slot = lexicon.term_slot(nb_term, nb_field);
                file_tag += "_" + nb_field;
            } else if (lexicon.is_global(nb_term)) {
                slot = lexicon.global_slot(nb_term);
            } else {
                throw std::runtime_error("unknown word: " + nb_term);
            }
            auto set = analyzer.top_k_neighbors(slot, nb_k);
            auto path = cfg.output_dir / ("neighbors_" + file_tag + ".tsv");
            save_neighbors_tsv(path, set, lexicon);
            std::cout << "neighbors of " << nb_term << ": " << set.entries.size()
                      << " rows -> " << path.string() << "\n";
        } else if (app.got_subcommand(sub_fv)) {
            RunConfig cfg = fv_flags.resolve();
            require_corpus_root(cfg);
            std::size_t k = fv_k > 0 ? fv_k : cfg.k;
            auto lexicon = require_lexicon(cfg);
            auto table = require_model(cfg, lexicon);
            auto corpora = corpus::ingest_corpus(cfg.corpus_root, tokenizer_config(cfg));
            auto resolved = corpus::resolve_corpora(corpora, lexicon);
            metrics::Analyzer analyzer(lexicon, table, &resolved);
            auto matrix = analyzer.field_distance_matrix(k);
            auto path = cfg.output_dir / "field_distance.csv";
            save_field_matrix_csv(path, matrix, fv_directed);
            if (fv_svg) {
                save_field_matrix_svg(cfg.output_dir / "field_distance.svg", matrix,
                                      fv_directed);
            }
            std::cout << "field distances (k=" << k << ", "
                      << (fv_directed ? "directed" : "symmetrized") << ") over "
                      << matrix.fields.size() << " fields -> " << path.string() << "\n";
        } else if (app.got_subcommand(sub_ev)) {
            RunConfig cfg = ev_flags.resolve();
            std::size_t k = ev_k > 0 ? ev_k : cfg.k;
            metrics::DisMode mode =
                ev_mode.empty() ? cfg.dis_mode : metrics::parse_dis_mode(ev_mode);
            auto lexicon = require_lexicon(cfg);
            auto table = require_model(cfg, lexicon);
            auto annotations =
                eval::load_annotations(ev_annotations, ev_raw, &lexicon.field_terms());
            std::vector<std::size_t> ranks;
            for (const std::string& part : split(ev_ranks, ',')) {
                ranks.push_back(parse_size("ndcg-ranks", trim(part)));
            }

            metrics::Analyzer analyzer(lexicon, table);
            const auto& fields = lexicon.fields();
            std::vector<eval::MethodScores> methods;
            if (ev_baseline == "separate-cbow") {
                require_corpus_root(cfg);
                auto corpora = corpus::ingest_corpus(cfg.corpus_root, tokenizer_config(cfg));
                auto baselines =
                    eval::train_separate_baseline(corpora, cfg.hp, cfg.min_count);
                eval::MethodScores method{"separate-cbow-js", {}};
                for (const auto& [surface, truth] : annotations.entries) {
                    (void)truth;
                    double sum = 0.0;
                    std::size_t pairs = 0;
                    for (std::size_t i = 0; i < baselines.size(); ++i) {
                        for (std::size_t j = i + 1; j < baselines.size(); ++j) {
                            sum += eval::baseline_term_distance(surface, baselines[i],
                                                                baselines[j], k, mode);
                            ++pairs;
                        }
                    }
                    method.scores[surface] = sum / static_cast<double>(pairs);
                }
                methods.push_back(std::move(method));
            } else if (!ev_baseline.empty()) {
                throw std::runtime_error("unknown baseline: " + ev_baseline);
            }
            {
                eval::MethodScores cos_method{"model-cosine", {}};
                for (const auto& [surface, truth] : annotations.entries) {
                    (void)truth;
                    double sum = 0.0;
                    std::size_t pairs = 0;
                    for (std::size_t i = 0; i < fields.size(); ++i) {
                        auto u = model::embedding_of(surface, fields[i], table, lexicon);
                        for (std::size_t j = i + 1; j < fields.size(); ++j) {
                            auto v = model::embedding_of(surface, fields[j], table, lexicon);
                            sum += metrics::cosine(u, v);
                            ++pairs;
                        }
                    }
                    // higher = more varied, like every other method
                    cos_method.scores[surface] = 1.0 - sum / static_cast<double>(pairs);
                }
                methods.push_back(std::move(cos_method));
            }
            {
                eval::MethodScores js_method{"model-js", {}};
                for (const auto& [surface, truth] : annotations.entries) {
                    (void)truth;
                    js_method.scores[surface] =
                        analyzer.avg_term_variation(surface, k, mode).average;
                }
                methods.push_back(std::move(js_method));
            }

            auto report = eval::compare_methods(annotations, methods, ranks);
            auto path = cfg.output_dir / "eval_report.tsv";
            eval::save_eval_report(path, report);
            for (const auto& row : report.rows) {
                std::cout << row.method << ": pearson " << format_float(row.pearson);
                for (const auto& [rank, value] : row.ndcg) {
                    std::cout << ", ndcg@" << rank << " " << format_float(value);
                }
                std::cout << "\n";
            }
            std::cout << "eval report over " << annotations.entries.size() << " terms -> "
                      << path.string() << "\n";
        } else if (app.got_subcommand(sub_pj)) {
            RunConfig cfg = pj_flags.resolve();
            if (pj_scope != "terms" && pj_scope != "all") {
                throw std::runtime_error("unknown projection scope: " + pj_scope);
            }
            auto lexicon = require_lexicon(cfg);
            auto table = require_model(cfg, lexicon);
            std::vector<std::vector<double>> vectors;
            std::vector<CoordRow> rows;
            for (std::uint32_t s = 0; s < lexicon.slot_count(); ++s) {
                if (pj_scope == "terms" && !lexicon.slot_is_term(s)) {
                    continue;
                }
                auto row = table.input_row(s);
                vectors.emplace_back(row.begin(), row.end());
                rows.push_back({lexicon.slot(s).surface, lexicon.slot(s).scope, {}});
            }
            auto coords = pca_project(vectors, 2);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                rows[i].coords = coords[i];
            }
            std::filesystem::path out = pj_out;
            if (out.is_relative()) {
                out = cfg.output_dir / out;
            }
            save_coords_tsv(out, rows);
            std::cout << "projected " << rows.size() << " vectors -> " << out.string() << "\n";
        } else if (app.got_subcommand(sub_sy)) {
            SynthSpec spec = SynthSpec::parse_file(sy_spec);
            if (!sy_root.empty()) {
                spec.root = sy_root;
            }
            generate_synthetic_corpus(spec, sy_seed);
            std::cout << "synthetic corpus: " << spec.fields.size() << " fields x "
                      << spec.tokens_per_field << " tokens -> " << spec.root.string() << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace fieldvar::cli
