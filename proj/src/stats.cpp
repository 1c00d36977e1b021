#include "focs/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace focs {

namespace {

constexpr double kLn10 = 2.302585092994045684;

// Cached ln k! table, grown on demand. thread_local keeps the stats surface
// pure from the caller's point of view.
double log_factorial(std::uint64_t n) {
    constexpr std::size_t kMaxTable = 1u << 21;
    if (n >= kMaxTable) return std::lgamma(static_cast<double>(n) + 1.0);
    thread_local std::vector<double> table{0.0, 0.0};
    while (table.size() <= n) {
        table.push_back(table.back() + std::log(static_cast<double>(table.size())));
    }
    return table[n];
}

}  // namespace

LogProb LogProb::from_prob(double p) {
    if (p < 0.0 || p > 1.0) throw std::domain_error("probability outside [0,1]");
    return LogProb{std::log(p)};
}

double LogProb::prob() const { return std::exp(ln); }

double LogProb::neg_log10() const { return -ln / kLn10; }

double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

double log1m_exp(double a) {
    if (a > 0.0) throw std::domain_error("log1m_exp needs a <= 0");
    if (a == 0.0) return kNegInf;
    // split at -ln2 to keep precision on both sides
    constexpr double kLn2 = 0.6931471805599453;
    return a > -kLn2 ? std::log(-std::expm1(a)) : std::log1p(-std::exp(a));
}

double log_binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) throw std::domain_error("log_binomial: k > n");
    if (k == 0 || k == n) return 0.0;
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

void HypergeomParams::validate() const {
    if (draws > successes + failures)
        throw std::domain_error("hypergeometric draws exceed the pool size");
}

LogProb hypergeom_logpmf(std::uint64_t x, const HypergeomParams& params) {
    params.validate();
    if (x < params.support_min() || x > params.support_max()) return LogProb::zero();
    const double ln = log_binomial(params.successes, x) +
                      log_binomial(params.failures, params.draws - x) -
                      log_binomial(params.successes + params.failures, params.draws);
    return LogProb::from_ln(ln < 0.0 ? ln : 0.0);
}

namespace {

// ln sum of pmf over [from, to], inclusive; caller guarantees the range is
// inside the support. Clamped to 0: accumulated rounding across a near-total
// tail can overshoot ln(1) by a few ulp.
double log_tail_sum(const HypergeomParams& p, std::uint64_t from, std::uint64_t to) {
    double acc = kNegInf;
    for (std::uint64_t y = from; y <= to; ++y) {
        acc = log_add_exp(acc, hypergeom_logpmf(y, p).ln);
    }
    return acc < 0.0 ? acc : 0.0;
}

// Complement of a log tail mass. The floor keeps the result finite (and the
// cdf monotone) when the tail rounds to exactly 1; the induced error is below
// 1e-16 in probability space.
double log_complement(double log_mass) {
    constexpr double kFloor = -1e-16;
    return log1m_exp(log_mass < kFloor ? log_mass : kFloor);
}

}  // namespace

LogProb hypergeom_logcdf(std::uint64_t x, const HypergeomParams& params) {
    params.validate();
    const std::uint64_t lo = params.support_min();
    const std::uint64_t hi = params.support_max();
    if (x < lo) return LogProb::zero();
    if (x >= hi) return LogProb::one();
    const std::uint64_t lower_terms = x - lo + 1;
    const std::uint64_t upper_terms = hi - x;
    if (lower_terms <= upper_terms) return LogProb::from_ln(log_tail_sum(params, lo, x));
    return LogProb::from_ln(log_complement(log_tail_sum(params, x + 1, hi)));
}

LogProb hypergeom_logsf(std::uint64_t x, const HypergeomParams& params) {
    params.validate();
    const std::uint64_t lo = params.support_min();
    const std::uint64_t hi = params.support_max();
    if (x >= hi) return LogProb::zero();
    if (x < lo) return LogProb::one();
    const std::uint64_t lower_terms = x - lo + 1;
    const std::uint64_t upper_terms = hi - x;
    if (upper_terms <= lower_terms) return LogProb::from_ln(log_tail_sum(params, x + 1, hi));
    return LogProb::from_ln(log_complement(log_tail_sum(params, lo, x)));
}

double randomized_cdf_draw(std::uint64_t x, const HypergeomParams& params, Rng& rng) {
    params.validate();
    if (x < params.support_min() || x > params.support_max())
        throw std::domain_error("randomized_cdf_draw: x outside the support");
    const double below = x == params.support_min() ? 0.0 : hypergeom_logcdf(x - 1, params).prob();
    const double at = hypergeom_logcdf(x, params).prob();
    return below + rng.uniform() * (at - below);
}

LogProb randomized_tail_draw_log(std::uint64_t x, const HypergeomParams& params, Rng& rng) {
    params.validate();
    if (x < params.support_min() || x > params.support_max())
        throw std::domain_error("randomized_tail_draw_log: x outside the support");
    const double u = rng.uniform();
    // ln( P(X > x) + (1-u) * P(X = x) ), each piece already in log space
    const double strict = hypergeom_logsf(x, params).ln;
    const double step = hypergeom_logpmf(x, params).ln + std::log1p(-u);
    return LogProb::from_ln(log_add_exp(strict, step));
}

LogProb min_uniform_logcdf(LogProb log_g, std::uint64_t m) {
    if (m == 0) throw std::domain_error("min_uniform_logcdf: m must be >= 1");
    if (log_g.ln > 0.0) throw std::domain_error("min_uniform_logcdf: log_g must be <= 0");
    if (m == 1) return log_g;
    if (log_g.ln == 0.0) return LogProb::one();
    if (log_g.ln == kNegInf) return LogProb::zero();
    // Tiny g: 1-(1-g)^m = m*g*(1 - (m-1)g/2 + ...); the correction is far
    // below double resolution here, and exp(log_g) would lose bits in the
    // subnormal range.
    if (log_g.ln < -600.0) return LogProb::from_ln(std::log(static_cast<double>(m)) + log_g.ln);
    const double t = static_cast<double>(m) * std::log1p(-std::exp(log_g.ln));
    return LogProb::from_ln(log1m_exp(t));
}

}  // namespace focs
