#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "etac/codec.hpp"
#include "etac/envelope.hpp"

namespace etac {

enum class SourceKind { envelope, bayes, custom };

[[nodiscard]] std::string_view to_string(SourceKind kind) noexcept;
[[nodiscard]] SourceKind parse_source_kind(std::string_view text);

struct ExperimentConfig {
    EnvelopeSpec envelope = EnvelopeSpec::power(2.0);
    SourceKind source = SourceKind::envelope;
    std::vector<std::size_t> n_grid{1024, 2048, 4096, 8192, 16384, 32768, 65536};
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    CensorRule rule = CensorRule::rank;
    unsigned threads = 0;  // 0: one per hardware thread
    // Used when source == custom.
    std::shared_ptr<const SourceModel> custom;
};

// Minimum trials per grid point for each bound-checking experiment.
inline constexpr std::size_t kMinRedundancyTrials = 30;
inline constexpr std::size_t kMinThresholdTrials = 200;

struct TrialRecord {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t trial = 0;
    std::size_t total_bits = 0;
    std::size_t mixture_bits = 0;
    std::size_t elias_bits = 0;
    double ideal_mixture_bits = 0.0;
    std::size_t censored = 0;
    std::size_t m = 0;  // M_n
    std::size_t k = 0;  // K_n, distinct symbols
    double neg_log2_likelihood = 0.0;

    [[nodiscard]] double redundancy() const noexcept {
        return static_cast<double>(total_bits) - neg_log2_likelihood;
    }
    [[nodiscard]] double mixture_redundancy() const noexcept {
        return static_cast<double>(mixture_bits) - neg_log2_likelihood;
    }
    bool operator==(const TrialRecord&) const = default;
};

// Sampling source selected by the config (Bayes uses cfg.seed for theta).
[[nodiscard]] SourceModel make_source(const ExperimentConfig& cfg);

// Generator for one trial, keyed by (seed, n, trial).
[[nodiscard]] std::mt19937_64 trial_rng(std::uint64_t seed, std::size_t n, std::size_t trial);

// Samples x_1..x_n, encodes them and records every field.
[[nodiscard]] TrialRecord run_trial(const ExperimentConfig& cfg, const SourceModel& source, std::size_t n,
                                    std::size_t trial);
[[nodiscard]] TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t n, std::size_t trial);
// Same sample, threshold and distinct count only (no coding, no likelihood).
[[nodiscard]] TrialRecord observe_trial(const ExperimentConfig& cfg, const SourceModel& source, std::size_t n,
                                        std::size_t trial);

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double se = 0.0;
    [[nodiscard]] double ci_low() const noexcept { return mean - 1.96 * se; }
    [[nodiscard]] double ci_high() const noexcept { return mean + 1.96 * se; }
};

[[nodiscard]] Summary summarize(std::span<const double> values);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

struct BoundCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct LabReport {
    CsvTable table;
    std::vector<BoundCheck> checks;
    std::vector<std::vector<TrialRecord>> records;  // per grid point, by trial index

    [[nodiscard]] bool all_pass() const noexcept;
};

// Bound curves evaluated at the exact threshold m = m(n).
[[nodiscard]] double heavy_tail_bound(double m, double n, double factor);        // factor * m * log2 n
[[nodiscard]] double light_tail_bound(double m, double n, double factor);     // factor * m * log2 n * log2 max(m, 2)
[[nodiscard]] double threshold_mean_bound(double m);                           // m + 3 sqrt(m) + 3
[[nodiscard]] double bernstein_tail(double mean, double t);                    // exp(-t^2 / (2 (mean + t / 3)))

// Throw std::invalid_argument for too few trials or an empty/decreasing grid.
[[nodiscard]] LabReport redundancy_curve(const ExperimentConfig& cfg);
[[nodiscard]] LabReport threshold_stats(const ExperimentConfig& cfg);
[[nodiscard]] LabReport distinct_symbol_stats(const ExperimentConfig& cfg);

[[nodiscard]] const std::vector<std::string>& redundancy_columns();
[[nodiscard]] const std::vector<std::string>& threshold_columns();
[[nodiscard]] const std::vector<std::string>& distinct_columns();

// Header row plus one row per entry; 17 significant digits, '.' separator.
[[nodiscard]] std::string format_csv(const CsvTable& table);
// Writes through a temporary file and rename; std::runtime_error names the path.
void emit_csv(const CsvTable& table, const std::string& path);

}  // namespace etac
