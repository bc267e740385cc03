#include "fieldvar/run_config.hpp"

#include <sstream>
#include <stdexcept>

#include "fieldvar/io_util.hpp"

namespace fieldvar::cli {

std::map<std::string, std::string> parse_key_value_file(const std::filesystem::path& path) {
    std::map<std::string, std::string> entries;
    std::vector<std::string> lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line = lines[i];
        if (std::size_t hash = line.find('#'); hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("expected key = value on line " + std::to_string(i + 1) +
                                     " of " + path.string());
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::runtime_error("empty key on line " + std::to_string(i + 1) + " of " +
                                     path.string());
        }
        if (!entries.emplace(key, value).second) {
            throw std::runtime_error("duplicate key " + key + " in " + path.string());
        }
    }
    return entries;
}

namespace {

template <typename T, typename Parse>
T checked_parse(const std::string& key, const std::string& value, Parse parse) {
    try {
        std::size_t consumed = 0;
        T v = parse(value, &consumed);
        if (consumed != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("bad value for " + key + ": " + value);
    }
}

}  // namespace

std::size_t parse_size(const std::string& key, const std::string& value) {
    return checked_parse<std::size_t>(key, value, [](const std::string& s, std::size_t* c) {
        return static_cast<std::size_t>(std::stoull(s, c));
    });
}

double parse_double(const std::string& key, const std::string& value) {
    return checked_parse<double>(
        key, value, [](const std::string& s, std::size_t* c) { return std::stod(s, c); });
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    return checked_parse<std::uint64_t>(key, value, [](const std::string& s, std::size_t* c) {
        return static_cast<std::uint64_t>(std::stoull(s, c));
    });
}

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
    RunConfig cfg;
    for (const auto& [key, value] : parse_key_value_file(path)) {
        if (key == "corpus_root") {
            cfg.corpus_root = value;
        } else if (key == "stopwords") {
            cfg.stopwords = value;
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "terms_per_field") {
            cfg.terms_per_field = parse_size(key, value);
        } else if (key == "min_count") {
            cfg.min_count = parse_size(key, value);
        } else if (key == "dim") {
            cfg.hp.dim = parse_size(key, value);
        } else if (key == "half_window") {
            cfg.hp.half_window = parse_size(key, value);
        } else if (key == "negatives") {
            cfg.hp.negatives = parse_size(key, value);
        } else if (key == "epochs") {
            cfg.hp.epochs = parse_size(key, value);
        } else if (key == "learning_rate_start") {
            cfg.hp.learning_rate_start = parse_double(key, value);
        } else if (key == "learning_rate_end") {
            cfg.hp.learning_rate_end = parse_double(key, value);
        } else if (key == "seed") {
            cfg.hp.seed = parse_u64(key, value);
        } else if (key == "unigram_power") {
            cfg.hp.unigram_power = parse_double(key, value);
        } else if (key == "subsample") {
            cfg.hp.subsample = parse_double(key, value);
        } else if (key == "workers") {
            cfg.hp.workers = parse_size(key, value);
        } else if (key == "k") {
            cfg.k = parse_size(key, value);
        } else if (key == "dis_mode") {
            cfg.dis_mode = metrics::parse_dis_mode(value);
        } else {
            throw std::runtime_error("unknown config key: " + key);
        }
    }
    if (cfg.corpus_root.empty()) {
        throw std::runtime_error("config is missing corpus_root: " + path.string());
    }
    cfg.hp.validate();
    return cfg;
}

void RunConfig::save(const std::filesystem::path& path) const {
    std::ostringstream out;
    out << "corpus_root = " << corpus_root.string() << '\n';
    out << "stopwords = " << stopwords.string() << '\n';
    out << "output_dir = " << output_dir.string() << '\n';
    out << "terms_per_field = " << terms_per_field << '\n';
    out << "min_count = " << min_count << '\n';
    out << "dim = " << hp.dim << '\n';
    out << "half_window = " << hp.half_window << '\n';
    out << "negatives = " << hp.negatives << '\n';
    out << "epochs = " << hp.epochs << '\n';
    out << "learning_rate_start = " << format_float(hp.learning_rate_start) << '\n';
    out << "learning_rate_end = " << format_float(hp.learning_rate_end) << '\n';
    out << "seed = " << hp.seed << '\n';
    out << "unigram_power = " << format_float(hp.unigram_power) << '\n';
    out << "subsample = " << format_float(hp.subsample) << '\n';
    out << "workers = " << hp.workers << '\n';
    out << "k = " << k << '\n';
    out << "dis_mode = " << metrics::dis_mode_name(dis_mode) << '\n';
    atomic_write(path, out.str());
}

}  // namespace fieldvar::cli
