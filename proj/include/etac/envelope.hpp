#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "etac/symbol.hpp"

namespace etac {

enum class EnvelopeFamily { power, geometric };

// Envelope function f: N+ -> (0, 1] with 1 < sum f < infinity.
//   power:     f(j) = min(1, C j^-alpha), alpha > 1, extreme value index 1/(alpha-1)
//   geometric: f(j) = min(1, C q^j),      0 < q < 1, extreme value index 0
// Also provides the envelope distribution F(k) = 1 - sum_{j>k} f(j) (clipped
// at 0), its survival function, and a smoothed survival function that agrees
// with it on the integers.
class EnvelopeSpec {
public:
    // Throw std::invalid_argument on out-of-range parameters or sum f <= 1.
    static EnvelopeSpec power(double alpha, double scale = 1.0);
    static EnvelopeSpec geometric(double ratio, double scale = 1.0);
    // "power:alpha=2", "power:alpha=1.5,C=3", "geometric:q=0.8", "geometric:q=0.5,C=2".
    static EnvelopeSpec parse(std::string_view text);
    [[nodiscard]] std::string to_string() const;

    [[nodiscard]] EnvelopeFamily family() const noexcept { return family_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }
    [[nodiscard]] double shape() const noexcept { return shape_; }  // alpha or q
    [[nodiscard]] double extreme_value_index() const noexcept;

    [[nodiscard]] double f(std::uint64_t j) const;
    // sum_{k>=0} f(start + stride * k), start >= 1. Valid for non-increasing f,
    // which both families are.
    [[nodiscard]] double progression_sum(std::uint64_t start, std::uint64_t stride) const;
    // sum_{j>k} f(j), unclipped.
    [[nodiscard]] double raw_tail(std::uint64_t k) const;
    // log of the envelope survival function min(1, raw_tail(k)); exact even
    // where the value underflows a double.
    [[nodiscard]] double log_survival(std::uint64_t k) const;
    [[nodiscard]] double survival(std::uint64_t k) const;
    // Smoothed survival: equal to survival() on integers, monotone C1
    // (Hermite with Fritsch-Butland slopes) in log space between them.
    [[nodiscard]] double smoothed_survival(double x) const;
    [[nodiscard]] double log_smoothed_survival(double x) const;

    // k0 = max{k : sum_{j>=k} f(j) >= 1}: where the envelope distribution
    // places its first (reduced) mass.
    [[nodiscard]] std::uint64_t first_support() const noexcept { return first_support_; }

private:
    EnvelopeSpec(EnvelopeFamily family, double shape, double scale);
    [[nodiscard]] double clip_end() const noexcept;
    [[nodiscard]] double knot_slope(std::uint64_t k) const;
    [[nodiscard]] double log_raw_tail(std::uint64_t k) const;

    EnvelopeFamily family_;
    double shape_;
    double scale_;
    std::uint64_t first_support_ = 1;
    std::shared_ptr<const std::vector<double>> tail_table_;  // raw_tail(k) for small k
};

// Quantile of the smoothed envelope distribution, U(t) = Fc^{-1}(1 - 1/t).
// Throws std::invalid_argument for t <= 1.
[[nodiscard]] double quantile_u(const EnvelopeSpec& spec, double t);

// Root of Fc_bar(x) = x / t on [0, t]. Returns 0 for t <= 0.
[[nodiscard]] double exact_threshold_m(const EnvelopeSpec& spec, double t);

// Memoryless source over N+. Sampling draws an index from the tail function
// by inverse CDF and maps it through an optional relabelling (identity for
// all sources except the Bayes construction).
class SourceModel {
public:
    using Function = std::function<double(Symbol)>;
    using Relabel = std::function<Symbol(Symbol)>;

    // pmf gives the probability of each emitted symbol; draw_tail(j) is
    // P(draw > j) for the index distribution that sampling inverts.
    SourceModel(std::string provenance, Function pmf, Function draw_tail, Relabel relabel = {});

    [[nodiscard]] double pmf(Symbol j) const { return pmf_(j); }
    [[nodiscard]] double draw_tail(Symbol j) const;
    [[nodiscard]] const std::string& provenance() const noexcept { return provenance_; }

    [[nodiscard]] Symbol sample_one(std::mt19937_64& rng) const;
    [[nodiscard]] Message sample(std::size_t n, std::mt19937_64& rng) const;
    // Deterministic stream keyed by the seed words.
    [[nodiscard]] Message sample(std::size_t n, std::initializer_list<std::uint32_t> seed) const;

    // m'_n = min{k >= 1 : P(draw > k) <= k / n}.
    [[nodiscard]] std::uint64_t integer_threshold(double n) const;

private:
    static constexpr std::size_t kHeadSize = std::size_t{1} << 16;

    std::string provenance_;
    Function pmf_;
    Function tail_;
    Relabel relabel_;
    std::shared_ptr<const std::vector<double>> head_;  // draw_tail(j), j = 0..kHeadSize
};

// Seeds a generator from explicit 32-bit words through std::seed_seq.
[[nodiscard]] std::mt19937_64 make_rng(std::initializer_list<std::uint32_t> words);

// The envelope distribution itself as a sampling source.
[[nodiscard]] SourceModel envelope_source(const EnvelopeSpec& spec);

// Worst-case Bayes construction: keep f(j)/Z below j0, then split the rest
// of the alphabet into pairs {j0 + 2k, j0 + 2k + 1} and put the smaller
// envelope value of the pair on the member selected by theta_k.
class BayesConstruction {
public:
    // Throws std::invalid_argument if the pair masses sum to 1 or more.
    explicit BayesConstruction(EnvelopeSpec spec);

    [[nodiscard]] std::uint64_t j0() const noexcept { return j0_; }
    [[nodiscard]] double normalizer() const noexcept { return z_; }
    [[nodiscard]] double pair_mass_total() const noexcept { return pair_mass_; }

    // Reindexed pmf g and its tail: the law of the draw index.
    [[nodiscard]] double g(std::uint64_t j) const;
    [[nodiscard]] double g_tail(std::uint64_t j) const;
    // theta_k for a given seed; i.i.d. fair bits.
    [[nodiscard]] static bool theta(std::uint64_t seed, std::uint64_t block) noexcept;
    [[nodiscard]] double p_theta(std::uint64_t seed, Symbol x) const;

    [[nodiscard]] const EnvelopeSpec& spec() const noexcept { return spec_; }

private:
    EnvelopeSpec spec_;
    std::uint64_t j0_ = 1;
    double head_mass_ = 0.0;  // sum_{j<j0} f(j)
    double pair_mass_ = 0.0;  // sum_k min(f(j0+2k), f(j0+2k+1))
    double z_ = 1.0;
    std::vector<double> head_tail_;  // sum_{j0 > j' > J} f(j') for J < j0
};

[[nodiscard]] SourceModel bayes_source(const EnvelopeSpec& spec, std::uint64_t theta_seed);

// Sources dominated by power / geometric envelopes, used as test inputs.
[[nodiscard]] SourceModel zipf_source(double alpha);      // j^-alpha / zeta(alpha)
[[nodiscard]] SourceModel geometric_source(double q);     // (1 - q) q^(j-1)
[[nodiscard]] SourceModel point_source(Symbol value);     // always `value`
// Finite pmf: probs[i] is the probability of symbol i + 1.
[[nodiscard]] SourceModel finite_source(std::vector<double> probs);

}  // namespace etac
