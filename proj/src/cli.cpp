#include "etac/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "etac/codec.hpp"
#include "etac/errors.hpp"
#include "etac/lab.hpp"

namespace etac {

TokenError::TokenError(std::size_t line, std::size_t column, std::string token, std::string reason)
    : std::runtime_error(fmt::format("line {}, column {}: {} '{}'", line, column, reason, token)),
      line_(line),
      column_(column),
      token_(std::move(token)) {}

Message parse_tokens(std::string_view text) {
    Message out;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t i = 0;
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    while (i < text.size()) {
        const char c = text[i];
        if (is_space(c)) {
            if (c == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) {
            ++i;
        }
        const std::string_view token = text.substr(start, i - start);
        Symbol value = 0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec == std::errc::result_out_of_range) {
            throw TokenError(line, column, std::string(token), "symbol out of range");
        }
        if (ec != std::errc{} || ptr != token.data() + token.size()) {
            throw TokenError(line, column, std::string(token), "not a positive integer");
        }
        if (value == 0) {
            throw TokenError(line, column, std::string(token), "symbol must be positive");
        }
        if (value > kMaxSymbol) {
            throw TokenError(line, column, std::string(token), "symbol out of range");
        }
        out.push_back(value);
        column += token.size();
    }
    return out;
}

std::string format_tokens(const Message& msg) {
    std::string out;
    for (std::size_t i = 0; i < msg.size(); ++i) {
        if (i != 0) {
            out += ' ';
        }
        out += std::to_string(msg[i]);
    }
    if (!msg.empty()) {
        out += '\n';
    }
    return out;
}

std::vector<std::size_t> parse_n_grid(std::string_view text) {
    const auto number = [&](std::string_view s) {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
            throw std::invalid_argument(fmt::format("bad n value '{}'", s));
        }
        return v;
    };
    std::vector<std::size_t> grid;
    if (const auto dots = text.find(".."); dots != std::string_view::npos) {
        const std::size_t lo = number(text.substr(0, dots));
        const std::size_t hi = number(text.substr(dots + 2));
        if (lo == 0 || lo > hi) {
            throw std::invalid_argument(fmt::format("bad n range '{}'", text));
        }
        for (std::size_t n = lo; n <= hi; n *= 2) {
            grid.push_back(n);
        }
        return grid;
    }
    while (!text.empty()) {
        const auto comma = text.find(',');
        grid.push_back(number(text.substr(0, comma)));
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    }
    if (grid.empty()) {
        throw std::invalid_argument("empty n grid");
    }
    return grid;
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error(fmt::format("{}: cannot open for reading", path));
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    if (is.bad()) {
        throw std::runtime_error(fmt::format("{}: read failed", path));
    }
    return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view data) {
    namespace fs = std::filesystem;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw std::runtime_error(fmt::format("{}: cannot open for writing", tmp));
        }
        os.write(data.data(), static_cast<std::streamsize>(data.size()));
        os.flush();
        if (!os) {
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw std::runtime_error(fmt::format("{}: write failed", tmp));
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error(fmt::format("{}: cannot replace", path));
    }
}

namespace {

struct BenchOptions {
    std::string envelope = "power:alpha=2";
    std::string source = "envelope";
    std::string n = "1024..65536";
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    std::string rule = "rank";
    unsigned threads = 0;
    std::string out;
    std::string config;
};

void add_bench_options(CLI::App* sub, BenchOptions& opt) {
    sub->add_option("--envelope", opt.envelope, "power:alpha=A[,C=c] or geometric:q=Q[,C=c]")->capture_default_str();
    sub->add_option("--source", opt.source, "envelope | bayes")->capture_default_str();
    sub->add_option("--n", opt.n, "grid: LO..HI (doubling) or comma list")->capture_default_str();
    sub->add_option("--trials", opt.trials, "trials per grid point")->capture_default_str();
    sub->add_option("--seed", opt.seed, "experiment seed")->capture_default_str();
    sub->add_option("--rule", opt.rule, "censoring rule: rank | value")->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads, 0 = all cores")->capture_default_str();
    sub->add_option("--out", opt.out, "CSV output path (default: stdout)");
    sub->add_option("--config", opt.config, "key = value file mirroring these flags");
}

// Fills options not given on the command line from a key = value file.
void apply_config(CLI::App* sub, const std::string& path) {
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_file(path);
    } catch (const CLI::FileError&) {
        throw std::runtime_error(fmt::format("{}: cannot read config", path));
    }
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") {
            continue;
        }
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == sub->get_name())) {
            continue;
        }
        CLI::Option* opt = item.name == "config" ? nullptr : sub->get_option_no_throw("--" + item.name);
        if (opt == nullptr) {
            throw CLI::ConfigError::Extras(item.fullname());
        }
        if (opt->count() == 0) {
            for (const auto& value : item.inputs) {
                opt->add_result(value);
            }
            opt->run_callback();
        }
    }
}

ExperimentConfig make_config(const BenchOptions& opt) {
    ExperimentConfig cfg;
    cfg.envelope = EnvelopeSpec::parse(opt.envelope);
    cfg.source = parse_source_kind(opt.source);
    if (cfg.source == SourceKind::custom) {
        throw std::invalid_argument("--source custom is only available through the library");
    }
    cfg.n_grid = parse_n_grid(opt.n);
    cfg.trials = opt.trials;
    cfg.seed = opt.seed;
    cfg.rule = parse_censor_rule(opt.rule);
    cfg.threads = opt.threads;
    return cfg;
}

enum class Bench { redundancy, threshold, distinct };

int run_bench(Bench kind, const BenchOptions& opt) {
    ExperimentConfig cfg;
    try {
        cfg = make_config(opt);
        const std::size_t minimum = kind == Bench::redundancy ? kMinRedundancyTrials : kMinThresholdTrials;
        if (cfg.trials < minimum) {
            throw std::invalid_argument(fmt::format("--trials must be at least {}", minimum));
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "etac: " << e.what() << '\n';
        return kExitUsage;
    }
    const LabReport rep = kind == Bench::redundancy  ? redundancy_curve(cfg)
                          : kind == Bench::threshold ? threshold_stats(cfg)
                                                     : distinct_symbol_stats(cfg);
    if (opt.out.empty()) {
        std::cout << format_csv(rep.table);
    } else {
        emit_csv(rep.table, opt.out);
    }
    for (const auto& c : rep.checks) {
        std::cerr << c.name << ": " << (c.pass ? "PASS" : "FAIL");
        if (!c.detail.empty()) {
            std::cerr << " (" << c.detail << ')';
        }
        std::cerr << '\n';
    }
    return rep.all_pass() ? kExitOk : kExitData;
}

int run_compress(const std::string& in, const std::string& out, const std::string& rule_text, bool bytes) {
    CensorRule rule;
    try {
        rule = parse_censor_rule(rule_text);
    } catch (const std::invalid_argument& e) {
        std::cerr << "etac: " << e.what() << '\n';
        return kExitUsage;
    }
    const std::string text = read_file(in);
    Message msg;
    if (bytes) {
        msg.reserve(text.size());
        for (unsigned char b : text) {
            msg.push_back(Symbol{b} + 1);
        }
    } else {
        try {
            msg = parse_tokens(text);
        } catch (const TokenError& e) {
            throw std::runtime_error(fmt::format("{}: {}", in, e.what()));
        }
    }
    const auto container = encode(msg, rule);
    const auto data = container.to_bytes();
    write_file_atomic(out, std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
    const auto rep = codelength_report(msg, rule);
    std::cerr << fmt::format("symbols={} rule={} total_bits={} mixture_bits={} elias_bits={} N_censored={}\n",
                             rep.symbols, to_string(rule), rep.total_bits, rep.mixture_bits, rep.elias_bits,
                             rep.censored);
    return kExitOk;
}

Message decode_file(const std::string& in) {
    const std::string raw = read_file(in);
    const std::vector<std::uint8_t> data(raw.begin(), raw.end());
    try {
        return decode(data);
    } catch (const DecodeError& e) {
        throw std::runtime_error(fmt::format("{}: {} ({})", in, e.what(), to_string(e.kind())));
    }
}

int run_decompress(const std::string& in, const std::string& out, bool bytes) {
    const Message msg = decode_file(in);
    std::string text;
    if (bytes) {
        text.reserve(msg.size());
        for (Symbol x : msg) {
            if (x > 256) {
                throw std::runtime_error(fmt::format("{}: symbol {} is not a byte", in, x));
            }
            text.push_back(static_cast<char>(x - 1));
        }
    } else {
        text = format_tokens(msg);
    }
    write_file_atomic(out, text);
    return kExitOk;
}

int run_inspect(const std::string& in) {
    const std::string raw = read_file(in);
    const std::vector<std::uint8_t> data(raw.begin(), raw.end());
    EncodedContainer container;
    Message msg;
    try {
        container = EncodedContainer::parse(data);
        msg = decode(container);
    } catch (const DecodeError& e) {
        throw std::runtime_error(fmt::format("{}: {} ({})", in, e.what(), to_string(e.kind())));
    }
    const auto rep = codelength_report(msg, container.rule);
    std::cout << fmt::format(
        "rule: {}\ncontainer_bytes: {}\npayload_bits: {}\nsymbols: {}\ntotal_bits: {}\nmixture_bits: {}\n"
        "elias_bits: {}\nideal_mixture_bits: {:.3f}\nN_censored: {}\nM: {}\ntau: {}\n",
        to_string(container.rule), data.size(), container.payload.size(), rep.symbols, rep.total_bits, rep.mixture_bits,
        rep.elias_bits, rep.ideal_mixture_bits, rep.censored, rep.final_m, rep.final_tau);
    return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"ETAC: universal lossless coding of integer sequences"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "etac 1.0");

    std::string in;
    std::string out;
    std::string rule = "rank";
    bool bytes = false;

    auto* compress = app.add_subcommand("compress", "encode a token (or byte) file into a container");
    compress->add_option("input", in, "input file")->required();
    compress->add_option("output", out, "container file")->required();
    compress->add_option("--rule", rule, "censoring rule: rank | value")->capture_default_str();
    compress->add_flag("--bytes", bytes, "read raw bytes, symbol = byte + 1");

    auto* decompress = app.add_subcommand("decompress", "decode a container back to tokens");
    decompress->add_option("input", in, "container file")->required();
    decompress->add_option("output", out, "output file")->required();
    decompress->add_flag("--bytes", bytes, "write raw bytes, byte = symbol - 1");

    auto* inspect = app.add_subcommand("inspect", "print container header and codelength breakdown");
    inspect->add_option("input", in, "container file")->required();

    BenchOptions bench_redundancy;
    BenchOptions bench_threshold;
    BenchOptions bench_distinct;
    auto* redundancy = app.add_subcommand("bench-redundancy", "redundancy against the true source");
    add_bench_options(redundancy, bench_redundancy);
    auto* threshold = app.add_subcommand("bench-threshold", "concentration of the empirical threshold");
    add_bench_options(threshold, bench_threshold);
    auto* distinct = app.add_subcommand("bench-distinct", "distinct symbols against the threshold");
    add_bench_options(distinct, bench_distinct);

    try {
        app.parse(argc, argv);
        for (auto [sub, opt] : {std::pair{redundancy, &bench_redundancy}, std::pair{threshold, &bench_threshold},
                                std::pair{distinct, &bench_distinct}}) {
            if (sub->parsed() && !opt->config.empty()) {
                apply_config(sub, opt->config);
            }
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const std::runtime_error& e) {
        std::cerr << "etac: " << e.what() << '\n';
        return kExitData;
    }

    try {
        if (compress->parsed()) {
            return run_compress(in, out, rule, bytes);
        }
        if (decompress->parsed()) {
            return run_decompress(in, out, bytes);
        }
        if (inspect->parsed()) {
            return run_inspect(in);
        }
        if (redundancy->parsed()) {
            return run_bench(Bench::redundancy, bench_redundancy);
        }
        if (threshold->parsed()) {
            return run_bench(Bench::threshold, bench_threshold);
        }
        if (distinct->parsed()) {
            return run_bench(Bench::distinct, bench_distinct);
        }
    } catch (const std::exception& e) {
        std::cerr << "etac: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace etac
