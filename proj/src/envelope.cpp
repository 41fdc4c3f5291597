#include "etac/envelope.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace etac {

namespace {

constexpr std::uint64_t kMinTable = 4096;
constexpr double kMaxClip = 1e6;
constexpr std::uint64_t kDirectTerms = 1000;

// log sum_{k>=0} (z + k)^-alpha for z >= kDirectTerms / 2 (Euler-Maclaurin).
double log_hurwitz_tail(double alpha, double z) {
    const double a = alpha;
    const double z2 = z * z;
    const double corr = 1.0 / (2.0 * z) + a / (12.0 * z2) -
                        a * (a + 1) * (a + 2) / (720.0 * z2 * z2) +
                        a * (a + 1) * (a + 2) * (a + 3) * (a + 4) / (30240.0 * z2 * z2 * z2);
    return (1.0 - a) * std::log(z) - std::log(a - 1.0) + std::log1p((a - 1.0) * corr);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double parse_number(std::string_view text, std::string_view key) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw std::invalid_argument(fmt::format("envelope: bad value for {}: '{}'", key, text));
    }
    return value;
}

}  // namespace

EnvelopeSpec EnvelopeSpec::power(double alpha, double scale) {
    if (!(alpha > 1.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("envelope: power family needs alpha > 1");
    }
    return EnvelopeSpec(EnvelopeFamily::power, alpha, scale);
}

EnvelopeSpec EnvelopeSpec::geometric(double ratio, double scale) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw std::invalid_argument("envelope: geometric family needs 0 < q < 1");
    }
    return EnvelopeSpec(EnvelopeFamily::geometric, ratio, scale);
}

EnvelopeSpec::EnvelopeSpec(EnvelopeFamily family, double shape, double scale)
    : family_(family), shape_(shape), scale_(scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("envelope: scale C must be positive");
    }
    const double clip = clip_end();
    if (clip > kMaxClip) {
        throw std::invalid_argument("envelope: scale C too large");
    }
    const auto size = std::max<std::uint64_t>(kMinTable, static_cast<std::uint64_t>(clip) + 2);
    auto table = std::make_shared<std::vector<double>>(size);
    long double acc = progression_sum(size, 1);
    for (std::uint64_t k = size; k-- > 0;) {
        (*table)[k] = static_cast<double>(acc);
        acc += f(k);
    }
    tail_table_ = std::move(table);
    if (!(raw_tail(0) > 1.0)) {
        throw std::invalid_argument("envelope: sum of f must exceed 1");
    }

    // k0 - 1 is the last k with raw_tail(k) >= 1.
    std::uint64_t lo = 0;
    std::uint64_t hi = 1;
    while (raw_tail(hi) >= 1.0) {
        lo = hi;
        if (hi >= kMaxSymbol) {
            throw std::invalid_argument("envelope: distribution exceeds the symbol range");
        }
        hi = std::min<std::uint64_t>(hi * 2, kMaxSymbol);
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (raw_tail(mid) >= 1.0 ? lo : hi) = mid;
    }
    first_support_ = lo + 1;
}

EnvelopeSpec EnvelopeSpec::parse(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view name = text.substr(0, colon);
    std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

    const bool is_power = name == "power";
    if (!is_power && name != "geometric") {
        throw std::invalid_argument(fmt::format("envelope: unknown family '{}'", name));
    }
    double shape = is_power ? 2.0 : std::numeric_limits<double>::quiet_NaN();
    double scale = 1.0;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument(fmt::format("envelope: expected key=value, got '{}'", item));
        }
        const std::string_view key = item.substr(0, eq);
        const double value = parse_number(item.substr(eq + 1), key);
        if (key == "C") {
            scale = value;
        } else if ((is_power && key == "alpha") || (!is_power && key == "q")) {
            shape = value;
        } else {
            throw std::invalid_argument(fmt::format("envelope: unknown parameter '{}'", key));
        }
    }
    if (std::isnan(shape)) {
        throw std::invalid_argument("envelope: geometric family needs q");
    }
    return is_power ? power(shape, scale) : geometric(shape, scale);
}

std::string EnvelopeSpec::to_string() const {
    if (family_ == EnvelopeFamily::power) {
        return fmt::format("power:alpha={},C={}", shape_, scale_);
    }
    return fmt::format("geometric:q={},C={}", shape_, scale_);
}

double EnvelopeSpec::extreme_value_index() const noexcept {
    return family_ == EnvelopeFamily::power ? 1.0 / (shape_ - 1.0) : 0.0;
}

double EnvelopeSpec::clip_end() const noexcept {
    if (family_ == EnvelopeFamily::power) {
        return std::pow(scale_, 1.0 / shape_);
    }
    return std::max(0.0, std::log(scale_) / -std::log(shape_));
}

double EnvelopeSpec::f(std::uint64_t j) const {
    if (j == 0) {
        return 0.0;
    }
    const double x = static_cast<double>(j);
    const double v = family_ == EnvelopeFamily::power ? scale_ * std::pow(x, -shape_)
                                                      : scale_ * std::pow(shape_, x);
    return std::min(1.0, v);
}

double EnvelopeSpec::progression_sum(std::uint64_t start, std::uint64_t stride) const {
    if (start == 0 || stride == 0) {
        throw std::invalid_argument("envelope: progression needs start >= 1 and stride >= 1");
    }
    const double clip = clip_end();
    long double sum = 0.0L;
    std::uint64_t j = start;
    if (family_ == EnvelopeFamily::power) {
        const double direct_end = std::max(static_cast<double>(kDirectTerms * stride), clip + 1.0);
        while (static_cast<double>(j) < direct_end) {
            sum += f(j);
            j += stride;
        }
        const double z = static_cast<double>(j) / static_cast<double>(stride);
        sum += scale_ * std::exp(log_hurwitz_tail(shape_, z) - shape_ * std::log(static_cast<double>(stride)));
        return static_cast<double>(sum);
    }
    while (static_cast<double>(j) <= clip) {
        sum += f(j);
        j += stride;
    }
    sum += scale_ * std::pow(shape_, static_cast<double>(j)) /
           (1.0 - std::pow(shape_, static_cast<double>(stride)));
    return static_cast<double>(sum);
}

double EnvelopeSpec::raw_tail(std::uint64_t k) const {
    if (tail_table_ && k < tail_table_->size()) {
        return (*tail_table_)[k];
    }
    return std::exp(log_raw_tail(k));
}

double EnvelopeSpec::log_raw_tail(std::uint64_t k) const {
    const double next = static_cast<double>(k) + 1.0;
    if (family_ == EnvelopeFamily::geometric && next > clip_end()) {
        return std::log(scale_) + next * std::log(shape_) - std::log1p(-shape_);
    }
    if (tail_table_ && k < tail_table_->size()) {
        return std::log((*tail_table_)[k]);
    }
    return std::log(scale_) + log_hurwitz_tail(shape_, next);
}

double EnvelopeSpec::log_survival(std::uint64_t k) const {
    return std::min(0.0, log_raw_tail(k));
}

double EnvelopeSpec::survival(std::uint64_t k) const {
    return std::exp(log_survival(k));
}

double EnvelopeSpec::knot_slope(std::uint64_t k) const {
    if (k == 0) {
        return 0.0;
    }
    const double y = log_survival(k);
    const double da = y - log_survival(k - 1);
    const double db = log_survival(k + 1) - y;
    if (!(da * db > 0.0)) {
        return 0.0;
    }
    return 2.0 * da * db / (da + db);
}

double EnvelopeSpec::log_smoothed_survival(double x) const {
    if (!(x > 0.0)) {
        return 0.0;
    }
    const double cap = static_cast<double>(kMaxSymbol);
    if (x >= cap) {
        return log_survival(kMaxSymbol);
    }
    const auto k = static_cast<std::uint64_t>(x);
    const double r = x - static_cast<double>(k);
    const double y0 = log_survival(k);
    if (r == 0.0) {
        return y0;
    }
    const double y1 = log_survival(k + 1);
    const double d0 = knot_slope(k);
    const double d1 = knot_slope(k + 1);
    const double r2 = r * r;
    const double r3 = r2 * r;
    const double h00 = 2 * r3 - 3 * r2 + 1;
    const double h10 = r3 - 2 * r2 + r;
    const double h01 = -2 * r3 + 3 * r2;
    const double h11 = r3 - r2;
    return std::min(0.0, h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1);
}

double EnvelopeSpec::smoothed_survival(double x) const {
    return std::exp(log_smoothed_survival(x));
}

double quantile_u(const EnvelopeSpec& spec, double t) {
    if (!(t > 1.0)) {
        throw std::invalid_argument("quantile_u: t must exceed 1");
    }
    const double target = -std::log(t);
    const double cap = static_cast<double>(kMaxSymbol);
    double lo = 0.0;
    double hi = 1.0;
    while (spec.log_smoothed_survival(hi) > target) {
        lo = hi;
        if (hi >= cap) {
            return cap;
        }
        hi = std::min(cap, hi * 2.0);
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) {
            break;
        }
        (spec.log_smoothed_survival(mid) > target ? lo : hi) = mid;
    }
    return hi;
}

double exact_threshold_m(const EnvelopeSpec& spec, double t) {
    if (!(t > 0.0)) {
        return 0.0;
    }
    double lo = 0.0;
    double hi = t;
    for (int i = 0; i < 200; ++i) {
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) {
            break;
        }
        (spec.smoothed_survival(mid) > mid / t ? lo : hi) = mid;
    }
    return lo + (hi - lo) / 2.0;
}

// SourceModel

std::mt19937_64 make_rng(std::initializer_list<std::uint32_t> words) {
    std::seed_seq seq(words);
    return std::mt19937_64(seq);
}

SourceModel::SourceModel(std::string provenance, Function pmf, Function draw_tail, Relabel relabel)
    : provenance_(std::move(provenance)),
      pmf_(std::move(pmf)),
      tail_(std::move(draw_tail)),
      relabel_(std::move(relabel)) {
    auto head = std::make_shared<std::vector<double>>(kHeadSize + 1);
    (*head)[0] = 1.0;
    for (std::size_t j = 1; j <= kHeadSize; ++j) {
        (*head)[j] = tail_(j);
    }
    head_ = std::move(head);
}

double SourceModel::draw_tail(Symbol j) const {
    if (j <= kHeadSize) {
        return (*head_)[j];
    }
    return tail_(j);
}

Symbol SourceModel::sample_one(std::mt19937_64& rng) const {
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
    const double v = 1.0 - u;
    Symbol draw;
    const auto& head = *head_;
    if (head.back() < v) {
        const auto it = std::partition_point(head.begin(), head.end(), [v](double t) { return t >= v; });
        draw = static_cast<Symbol>(it - head.begin());
    } else {
        Symbol lo = kHeadSize;
        Symbol hi = kHeadSize;
        do {
            lo = hi;
            hi = std::min<Symbol>(hi * 2, kMaxSymbol);
        } while (hi < kMaxSymbol && tail_(hi) >= v);
        if (tail_(hi) >= v) {
            draw = kMaxSymbol;
        } else {
            while (hi - lo > 1) {
                const Symbol mid = lo + (hi - lo) / 2;
                (tail_(mid) >= v ? lo : hi) = mid;
            }
            draw = hi;
        }
    }
    if (relabel_) {
        draw = std::min(relabel_(draw), kMaxSymbol);
    }
    return draw;
}

Message SourceModel::sample(std::size_t n, std::mt19937_64& rng) const {
    Message out(n);
    for (auto& x : out) {
        x = sample_one(rng);
    }
    return out;
}

Message SourceModel::sample(std::size_t n, std::initializer_list<std::uint32_t> seed) const {
    auto rng = make_rng(seed);
    return sample(n, rng);
}

std::uint64_t SourceModel::integer_threshold(double n) const {
    if (!(n > 0.0)) {
        throw std::invalid_argument("integer_threshold: n must be positive");
    }
    const auto below = [&](std::uint64_t k) { return draw_tail(k) <= static_cast<double>(k) / n; };
    std::uint64_t hi = 1;
    while (!below(hi)) {
        hi *= 2;
    }
    std::uint64_t lo = hi / 2;  // below(lo) false, or lo == 0
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (below(mid) ? hi : lo) = mid;
    }
    return hi;
}

SourceModel envelope_source(const EnvelopeSpec& spec) {
    const std::uint64_t k0 = spec.first_support();
    const double head_mass = 1.0 - spec.raw_tail(k0);
    return SourceModel(
        spec.to_string(),
        [spec, k0, head_mass](Symbol j) { return j < k0 ? 0.0 : j == k0 ? head_mass : spec.f(j); },
        [spec](Symbol j) { return spec.survival(j); });
}

// Bayes construction

BayesConstruction::BayesConstruction(EnvelopeSpec spec) : spec_(std::move(spec)) {
    constexpr std::uint64_t kScanLimit = 10'000'000;
    long double acc = 0.0L;
    std::uint64_t j = 1;
    while (acc < 1.0L) {
        if (j > kScanLimit) {
            throw std::invalid_argument("bayes: envelope head too light");
        }
        acc += spec_.f(j);
        ++j;
    }
    j0_ = j;
    head_mass_ = static_cast<double>(acc);
    pair_mass_ = spec_.progression_sum(j0_ + 1, 2);
    if (!(pair_mass_ < 1.0)) {
        throw std::invalid_argument("bayes: pair masses sum to 1 or more");
    }
    z_ = head_mass_ / (1.0 - pair_mass_);

    head_tail_.assign(j0_, 0.0);
    long double tail = 0.0L;
    for (std::uint64_t J = j0_ - 1; J-- > 0;) {
        tail += spec_.f(J + 1);
        head_tail_[J] = static_cast<double>(tail);
    }
}

double BayesConstruction::g(std::uint64_t j) const {
    if (j == 0) {
        return 0.0;
    }
    if (j < j0_) {
        return spec_.f(j) / z_;
    }
    return spec_.f(2 * j - j0_ + 1);
}

double BayesConstruction::g_tail(std::uint64_t j) const {
    if (j + 1 >= j0_) {
        return spec_.progression_sum(2 * j - j0_ + 3, 2);
    }
    return head_tail_[j] / z_ + pair_mass_;
}

bool BayesConstruction::theta(std::uint64_t seed, std::uint64_t block) noexcept {
    return (splitmix64(splitmix64(seed) ^ block) & 1u) != 0;
}

double BayesConstruction::p_theta(std::uint64_t seed, Symbol x) const {
    if (x == 0) {
        return 0.0;
    }
    if (x < j0_) {
        return spec_.f(x) / z_;
    }
    const std::uint64_t k = (x - j0_) / 2;
    const bool odd = ((x - j0_) & 1u) != 0;
    return odd == theta(seed, k) ? spec_.f(j0_ + 2 * k + 1) : 0.0;
}

SourceModel bayes_source(const EnvelopeSpec& spec, std::uint64_t theta_seed) {
    auto bayes = std::make_shared<const BayesConstruction>(spec);
    const std::uint64_t j0 = bayes->j0();
    return SourceModel(
        fmt::format("bayes({},seed={})", spec.to_string(), theta_seed),
        [bayes, theta_seed](Symbol x) { return bayes->p_theta(theta_seed, x); },
        [bayes](Symbol j) { return bayes->g_tail(j); },
        [j0, theta_seed](Symbol j) -> Symbol {
            if (j < j0) {
                return j;
            }
            const std::uint64_t k = j - j0;
            return j0 + 2 * k + (BayesConstruction::theta(theta_seed, k) ? 1 : 0);
        });
}

SourceModel zipf_source(double alpha) {
    const auto spec = EnvelopeSpec::power(alpha, 1.0);
    const double zeta = spec.raw_tail(0);
    return SourceModel(
        fmt::format("zipf:alpha={}", alpha),
        [alpha, zeta](Symbol j) { return j == 0 ? 0.0 : std::pow(static_cast<double>(j), -alpha) / zeta; },
        [spec, zeta](Symbol j) { return std::min(1.0, spec.raw_tail(j) / zeta); });
}

SourceModel geometric_source(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw std::invalid_argument("geometric_source: needs 0 < q < 1");
    }
    return SourceModel(
        fmt::format("geometric_source:q={}", q),
        [q](Symbol j) { return j == 0 ? 0.0 : (1.0 - q) * std::pow(q, static_cast<double>(j - 1)); },
        [q](Symbol j) { return std::pow(q, static_cast<double>(j)); });
}

SourceModel point_source(Symbol value) {
    if (value == 0 || value > kMaxSymbol) {
        throw std::invalid_argument("point_source: symbol out of range");
    }
    return SourceModel(
        fmt::format("point:{}", value),
        [value](Symbol j) { return j == value ? 1.0 : 0.0; },
        [value](Symbol j) { return j < value ? 1.0 : 0.0; });
}

SourceModel finite_source(std::vector<double> probs) {
    long double total = 0.0L;
    for (double p : probs) {
        if (!(p >= 0.0)) {
            throw std::invalid_argument("finite_source: negative probability");
        }
        total += p;
    }
    if (probs.empty() || std::fabs(static_cast<double>(total) - 1.0) > 1e-9) {
        throw std::invalid_argument("finite_source: probabilities must sum to 1");
    }
    auto tails = std::make_shared<std::vector<double>>(probs.size() + 1, 0.0);
    long double acc = 0.0L;
    for (std::size_t j = probs.size(); j-- > 0;) {
        acc += probs[j];
        (*tails)[j] = static_cast<double>(acc);
    }
    (*tails)[0] = 1.0;
    auto pmf = std::make_shared<const std::vector<double>>(std::move(probs));
    return SourceModel(
        fmt::format("finite:{}", pmf->size()),
        [pmf](Symbol j) { return j == 0 || j > pmf->size() ? 0.0 : (*pmf)[j - 1]; },
        [tails](Symbol j) { return j >= tails->size() ? 0.0 : (*tails)[j]; });
}

}  // namespace etac
