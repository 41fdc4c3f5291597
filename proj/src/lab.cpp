#include "etac/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "etac/threshold.hpp"

namespace etac {

namespace {

void require_trials(const ExperimentConfig& cfg, std::size_t minimum) {
    if (cfg.trials < minimum) {
        throw std::invalid_argument(fmt::format("lab: need at least {} trials, got {}", minimum, cfg.trials));
    }
    if (cfg.n_grid.empty()) {
        throw std::invalid_argument("lab: empty n grid");
    }
    if (!std::is_sorted(cfg.n_grid.begin(), cfg.n_grid.end()) ||
        std::adjacent_find(cfg.n_grid.begin(), cfg.n_grid.end()) != cfg.n_grid.end()) {
        throw std::invalid_argument("lab: n grid must be increasing");
    }
}

// Runs body(i) for i in [0, count) on worker threads; results land by index.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body body) {
    unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; !failed.load() && (i = next.fetch_add(1)) < count;) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

template <class Trial>
std::vector<std::vector<TrialRecord>> collect(const ExperimentConfig& cfg, Trial trial) {
    std::vector<std::vector<TrialRecord>> out(cfg.n_grid.size(), std::vector<TrialRecord>(cfg.trials));
    parallel_for(cfg.n_grid.size() * cfg.trials, cfg.threads, [&](std::size_t i) {
        const std::size_t g = i / cfg.trials;
        const std::size_t t = i % cfg.trials;
        out[g][t] = trial(cfg.n_grid[g], t);
    });
    return out;
}

template <class Field>
Summary summarize_field(const std::vector<TrialRecord>& records, Field field) {
    std::vector<double> values;
    values.reserve(records.size());
    for (const auto& r : records) {
        values.push_back(static_cast<double>(field(r)));
    }
    return summarize(values);
}

std::size_t distinct_count(Message msg) {
    std::sort(msg.begin(), msg.end());
    return static_cast<std::size_t>(std::unique(msg.begin(), msg.end()) - msg.begin());
}

double source_threshold(const ExperimentConfig& cfg, std::size_t n) {
    return exact_threshold_m(cfg.envelope, static_cast<double>(n));
}

std::string fmt_num(double x) {
    return fmt::format("{:.6g}", x);
}

}  // namespace

std::string_view to_string(SourceKind kind) noexcept {
    switch (kind) {
        case SourceKind::envelope: return "envelope";
        case SourceKind::bayes: return "bayes";
        case SourceKind::custom: return "custom";
    }
    return "?";
}

SourceKind parse_source_kind(std::string_view text) {
    if (text == "envelope") {
        return SourceKind::envelope;
    }
    if (text == "bayes") {
        return SourceKind::bayes;
    }
    if (text == "custom") {
        return SourceKind::custom;
    }
    throw std::invalid_argument(fmt::format("unknown source kind '{}'", text));
}

SourceModel make_source(const ExperimentConfig& cfg) {
    switch (cfg.source) {
        case SourceKind::envelope: return envelope_source(cfg.envelope);
        case SourceKind::bayes: return bayes_source(cfg.envelope, cfg.seed);
        case SourceKind::custom:
            if (!cfg.custom) {
                throw std::invalid_argument("lab: custom source not set");
            }
            return *cfg.custom;
    }
    throw std::invalid_argument("lab: bad source kind");
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::size_t n, std::size_t trial) {
    const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
    const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    return make_rng({lo(seed), hi(seed), lo(n), hi(n), lo(trial), hi(trial)});
}

TrialRecord run_trial(const ExperimentConfig& cfg, const SourceModel& source, std::size_t n, std::size_t trial) {
    auto rng = trial_rng(cfg.seed, n, trial);
    const Message msg = source.sample(n, rng);
    const CodelengthReport rep = codelength_report(msg, cfg.rule);

    long double nll = 0.0L;
    for (Symbol x : msg) {
        nll -= std::log2(static_cast<long double>(source.pmf(x)));
    }

    TrialRecord r;
    r.n = n;
    r.seed = cfg.seed;
    r.trial = trial;
    r.total_bits = rep.total_bits;
    r.mixture_bits = rep.mixture_bits;
    r.elias_bits = rep.elias_bits;
    r.ideal_mixture_bits = rep.ideal_mixture_bits;
    r.censored = rep.censored;
    r.m = rep.final_m;
    r.k = distinct_count(msg);
    r.neg_log2_likelihood = static_cast<double>(nll);
    return r;
}

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t n, std::size_t trial) {
    return run_trial(cfg, make_source(cfg), n, trial);
}

TrialRecord observe_trial(const ExperimentConfig& cfg, const SourceModel& source, std::size_t n, std::size_t trial) {
    auto rng = trial_rng(cfg.seed, n, trial);
    const Message msg = source.sample(n, rng);
    ThresholdState state;
    for (Symbol x : msg) {
        state.observe(x);
    }
    TrialRecord r;
    r.n = n;
    r.seed = cfg.seed;
    r.trial = trial;
    r.m = state.size();
    r.k = distinct_count(msg);
    return r;
}

Summary summarize(std::span<const double> values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) {
        return s;
    }
    long double sum = 0.0L;
    for (double v : values) {
        sum += v;
    }
    const long double mean = sum / static_cast<long double>(values.size());
    long double sq = 0.0L;
    for (double v : values) {
        sq += (v - mean) * (v - mean);
    }
    s.mean = static_cast<double>(mean);
    if (values.size() > 1) {
        s.variance = static_cast<double>(sq / static_cast<long double>(values.size() - 1));
        s.se = std::sqrt(s.variance / static_cast<double>(values.size()));
    }
    return s;
}

bool LabReport::all_pass() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.pass; });
}

double heavy_tail_bound(double m, double n, double factor) {
    return factor * m * std::log2(n);
}

double light_tail_bound(double m, double n, double factor) {
    return factor * m * std::log2(n) * std::log2(std::max(m, 2.0));
}

double threshold_mean_bound(double m) {
    return m + 3.0 * std::sqrt(m) + 3.0;
}

double bernstein_tail(double mean, double t) {
    return std::exp(-t * t / (2.0 * (mean + t / 3.0)));
}

const std::vector<std::string>& redundancy_columns() {
    static const std::vector<std::string> cols{
        "n", "trials", "mean_redundancy", "se_redundancy", "ci_low", "ci_high", "mean_mixture_redundancy",
        "mean_total_bits", "mean_mixture_bits", "mean_elias_bits", "mean_neg_log2_likelihood", "mean_censored",
        "mean_M", "mean_K", "se_K", "m_n", "m_n_log2_n", "bound_5_2", "bound_1_2", "bound_light"};
    return cols;
}

const std::vector<std::string>& threshold_columns() {
    static const std::vector<std::string> cols{
        "n", "trials", "mean_M", "var_M", "se_M", "m_n", "mean_bound", "mean_K", "se_K",
        "exceed_1", "bernstein_1", "exceed_2", "bernstein_2"};
    return cols;
}

const std::vector<std::string>& distinct_columns() {
    static const std::vector<std::string> cols{
        "n", "trials", "mean_K", "se_K", "mean_M", "se_M", "two_mean_M", "m_prime_n", "ratio_K_mprime"};
    return cols;
}

namespace {

BoundCheck k_vs_m_check(const ExperimentConfig& cfg, const std::vector<std::vector<TrialRecord>>& records) {
    BoundCheck c{"K<=2M", true, {}};
    for (std::size_t g = 0; g < records.size(); ++g) {
        const auto k = summarize_field(records[g], [](const TrialRecord& r) { return r.k; });
        const auto m = summarize_field(records[g], [](const TrialRecord& r) { return r.m; });
        if (!(k.mean <= 2.0 * m.mean + 3.0 * k.se)) {
            c.pass = false;
            c.detail = fmt::format("n={} mean K={} 2 mean M={}", cfg.n_grid[g], fmt_num(k.mean), fmt_num(2 * m.mean));
            return c;
        }
    }
    return c;
}

}  // namespace

LabReport redundancy_curve(const ExperimentConfig& cfg) {
    require_trials(cfg, kMinRedundancyTrials);
    const SourceModel source = make_source(cfg);
    LabReport rep;
    rep.records = collect(cfg, [&](std::size_t n, std::size_t t) { return run_trial(cfg, source, n, t); });
    rep.table.header = redundancy_columns();

    const bool heavy = cfg.envelope.family() == EnvelopeFamily::power;
    BoundCheck floor{"floor", true, {}};
    BoundCheck mixture{"mixture", true, {}};
    BoundCheck per_symbol{"R/n decreasing", true, {}};
    BoundCheck upper{heavy ? "R<=3.0*m*log2n" : "R<=2.5*m*log2n*log2m", true, {}};
    BoundCheck spread{"ratio spread<=4", true, {}};
    double prev_rate = INFINITY;
    double ratio_min = INFINITY;
    double ratio_max = 0.0;

    const auto fail = [](BoundCheck& c, std::string detail) {
        if (c.pass) {
            c.pass = false;
            c.detail = std::move(detail);
        }
    };

    for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
        const auto& recs = rep.records[g];
        const double n = static_cast<double>(cfg.n_grid[g]);
        const auto red = summarize_field(recs, [](const TrialRecord& r) { return r.redundancy(); });
        const auto mix = summarize_field(recs, [](const TrialRecord& r) { return r.mixture_redundancy(); });
        const auto total = summarize_field(recs, [](const TrialRecord& r) { return r.total_bits; });
        const auto mbits = summarize_field(recs, [](const TrialRecord& r) { return r.mixture_bits; });
        const auto ebits = summarize_field(recs, [](const TrialRecord& r) { return r.elias_bits; });
        const auto nll = summarize_field(recs, [](const TrialRecord& r) { return r.neg_log2_likelihood; });
        const auto cens = summarize_field(recs, [](const TrialRecord& r) { return r.censored; });
        const auto mm = summarize_field(recs, [](const TrialRecord& r) { return r.m; });
        const auto kk = summarize_field(recs, [](const TrialRecord& r) { return r.k; });
        const double m = source_threshold(cfg, cfg.n_grid[g]);
        const double mlog = heavy_tail_bound(m, n, 1.0);
        const double light = light_tail_bound(m, n, 1.0);

        rep.table.rows.push_back({n, static_cast<double>(cfg.trials), red.mean, red.se, red.ci_low(), red.ci_high(),
                                  mix.mean, total.mean, mbits.mean, ebits.mean, nll.mean, cens.mean, mm.mean,
                                  kk.mean, kk.se, m, mlog, 2.5 * mlog, 0.5 * mlog, light});

        if (!(red.mean >= -1.0)) {
            fail(floor, fmt::format("n={} mean R={}", n, fmt_num(red.mean)));
        }
        const double mix_bound = 0.8 * mlog + 2.0 * (cens.mean + 1.0);
        if (!(mix.mean <= mix_bound)) {
            fail(mixture, fmt::format("n={} mixture R={} bound={}", n, fmt_num(mix.mean), fmt_num(mix_bound)));
        }
        const double rate = red.mean / n;
        if (!(rate < prev_rate)) {
            fail(per_symbol, fmt::format("n={} R/n={} previous={}", n, fmt_num(rate), fmt_num(prev_rate)));
        }
        prev_rate = rate;
        const double bound = heavy ? 3.0 * mlog : 2.5 * light;
        if (!(red.mean <= bound)) {
            fail(upper, fmt::format("n={} R={} bound={}", n, fmt_num(red.mean), fmt_num(bound)));
        }
        const double ratio = red.mean / mlog;
        ratio_min = std::min(ratio_min, ratio);
        ratio_max = std::max(ratio_max, ratio);
    }
    if (heavy && !(ratio_min > 0.0 && ratio_max / ratio_min <= 4.0)) {
        fail(spread, fmt::format("min={} max={}", fmt_num(ratio_min), fmt_num(ratio_max)));
    }

    rep.checks = {floor, mixture, per_symbol, upper};
    if (heavy) {
        if (spread.pass) {
            spread.detail = fmt::format("max/min={}", fmt_num(ratio_max / ratio_min));
        }
        rep.checks.push_back(spread);
    }
    rep.checks.push_back(k_vs_m_check(cfg, rep.records));
    return rep;
}

LabReport threshold_stats(const ExperimentConfig& cfg) {
    require_trials(cfg, kMinThresholdTrials);
    const SourceModel source = make_source(cfg);
    LabReport rep;
    rep.records = collect(cfg, [&](std::size_t n, std::size_t t) { return observe_trial(cfg, source, n, t); });
    rep.table.header = threshold_columns();

    BoundCheck var{"var<=mean", true, {}};
    BoundCheck mean_check{"mean<=m+3sqrt(m)+3", true, {}};
    BoundCheck tail{"tail<=bernstein", true, {}};
    const double slack = 1.0 + 4.0 / std::sqrt(static_cast<double>(cfg.trials));
    const double trials = static_cast<double>(cfg.trials);

    for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
        const auto& recs = rep.records[g];
        const double n = static_cast<double>(cfg.n_grid[g]);
        const auto mm = summarize_field(recs, [](const TrialRecord& r) { return r.m; });
        const auto kk = summarize_field(recs, [](const TrialRecord& r) { return r.k; });
        const double m = source_threshold(cfg, cfg.n_grid[g]);
        const double bound = threshold_mean_bound(m);

        std::vector<double> row{n, trials, mm.mean, mm.variance, mm.se, m, bound, kk.mean, kk.se};
        for (double mult : {1.0, 2.0}) {
            const double t = mult * std::sqrt(mm.mean);
            const auto exceed = static_cast<double>(std::count_if(recs.begin(), recs.end(), [&](const TrialRecord& r) {
                                    return static_cast<double>(r.m) - mm.mean >= t;
                                })) / trials;
            const double b = bernstein_tail(mm.mean, t);
            row.push_back(exceed);
            row.push_back(b);
            const double allowed = b + 3.0 * std::sqrt(b * (1.0 - b) / trials) + 1.0 / trials;
            if (tail.pass && !(exceed <= allowed)) {
                tail.pass = false;
                tail.detail = fmt::format("n={} t={} rate={} bound={}", n, fmt_num(t), fmt_num(exceed), fmt_num(b));
            }
        }
        rep.table.rows.push_back(std::move(row));

        if (var.pass && !(mm.variance <= mm.mean * slack)) {
            var.pass = false;
            var.detail = fmt::format("n={} var={} mean={}", n, fmt_num(mm.variance), fmt_num(mm.mean));
        }
        if (mean_check.pass && !(mm.mean <= bound + 3.0 * mm.se)) {
            mean_check.pass = false;
            mean_check.detail = fmt::format("n={} mean={} bound={}", n, fmt_num(mm.mean), fmt_num(bound));
        }
    }
    rep.checks = {var, mean_check, tail, k_vs_m_check(cfg, rep.records)};
    return rep;
}

LabReport distinct_symbol_stats(const ExperimentConfig& cfg) {
    require_trials(cfg, kMinThresholdTrials);
    if (cfg.source == SourceKind::custom) {
        throw std::invalid_argument("lab: distinct-symbol stats need an envelope or bayes source");
    }
    const SourceModel source = make_source(cfg);
    LabReport rep;
    rep.records = collect(cfg, [&](std::size_t n, std::size_t t) { return observe_trial(cfg, source, n, t); });
    rep.table.header = distinct_columns();

    double ratio_min = INFINITY;
    double ratio_max = 0.0;
    for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
        const auto& recs = rep.records[g];
        const double n = static_cast<double>(cfg.n_grid[g]);
        const auto kk = summarize_field(recs, [](const TrialRecord& r) { return r.k; });
        const auto mm = summarize_field(recs, [](const TrialRecord& r) { return r.m; });
        const double mprime = static_cast<double>(source.integer_threshold(n));
        const double ratio = kk.mean / mprime;
        ratio_min = std::min(ratio_min, ratio);
        ratio_max = std::max(ratio_max, ratio);
        rep.table.rows.push_back({n, static_cast<double>(cfg.trials), kk.mean, kk.se, mm.mean, mm.se, 2.0 * mm.mean,
                                  mprime, ratio});
    }
    rep.checks.push_back(k_vs_m_check(cfg, rep.records));
    if (cfg.envelope.family() == EnvelopeFamily::power) {
        BoundCheck band{"K/m' spread<=3", ratio_min > 0.0 && ratio_max / ratio_min <= 3.0,
                        fmt::format("min={} max={}", fmt_num(ratio_min), fmt_num(ratio_max))};
        rep.checks.push_back(band);
    }
    return rep;
}

std::string format_csv(const CsvTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        out += i == 0 ? "" : ",";
        out += table.header[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += i == 0 ? "" : ",";
            out += fmt::format("{:.17g}", row[i]);
        }
        out += '\n';
    }
    return out;
}

void emit_csv(const CsvTable& table, const std::string& path) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw std::runtime_error(fmt::format("{}: cannot open for writing", tmp.string()));
        }
        os << format_csv(table);
        os.flush();
        if (!os) {
            throw std::runtime_error(fmt::format("{}: write failed", tmp.string()));
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error(fmt::format("{}: {}", path, ec.message()));
    }
}

}  // namespace etac
