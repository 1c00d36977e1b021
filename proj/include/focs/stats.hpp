#pragma once

#include <cstdint>
#include <limits>

#include "focs/rng.hpp"

namespace focs {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Natural-log probability; value is <= 0, with -inf for probability zero.
// Scores are reported as -log10 without ever exponentiating, because raw
// scores routinely drop below double-precision underflow.
struct LogProb {
    double ln = kNegInf;

    static LogProb from_ln(double v) { return LogProb{v}; }
    static LogProb from_prob(double p);
    static LogProb zero() { return LogProb{kNegInf}; }
    static LogProb one() { return LogProb{0.0}; }

    double prob() const;          // exp(ln); may underflow to 0
    double neg_log10() const;     // -ln / ln(10), >= 0

    friend auto operator<=>(const LogProb&, const LogProb&) = default;
};

// log(exp(a) + exp(b)) without overflow/underflow.
double log_add_exp(double a, double b);
// log(1 - exp(a)) for a <= 0.
double log1m_exp(double a);

// ln C(n, k) via log-gamma. Relative error <= 1e-10 for n up to 1e6.
double log_binomial(std::uint64_t n, std::uint64_t k);

// Parameters of the conditional configuration-model null: the tested node's
// stubs are drawn without replacement from a pool of `successes` stubs
// attached to the community and `failures` stubs attached to its exterior.
struct HypergeomParams {
    std::uint64_t successes = 0;  // K
    std::uint64_t failures = 0;   // M
    std::uint64_t draws = 0;      // n, must be <= K + M

    std::uint64_t support_min() const { return draws > failures ? draws - failures : 0; }
    std::uint64_t support_max() const { return draws < successes ? draws : successes; }
    void validate() const;
};

// ln P(X = x); -inf outside the support. The pmf is exactly normalized: the
// three parameters always satisfy K + M = (pool size), so no renormalization
// pass is needed.
LogProb hypergeom_logpmf(std::uint64_t x, const HypergeomParams& params);

// ln P(X <= x), clamped to exactly 0 at the top of the support. Accumulates
// whichever tail has fewer terms and complements when that is the upper one.
LogProb hypergeom_logcdf(std::uint64_t x, const HypergeomParams& params);

// ln P(X > x); the complement of the cdf with the same shorter-tail rule.
LogProb hypergeom_logsf(std::uint64_t x, const HypergeomParams& params);

// Randomized p-value: uniform draw from the cdf step [P(X < x), P(X <= x)].
// Under the null (x ~ pmf) the output is exactly Uniform(0,1). x must lie in
// the support. Consumes one uniform from the stream.
double randomized_cdf_draw(std::uint64_t x, const HypergeomParams& params, Rng& rng);

// The complementary draw, in log space: ln of a uniform draw from
// [P(X > x), P(X >= x)]. With the same underlying uniform this is exactly
// 1 - randomized_cdf_draw, but stays meaningful when that difference is far
// below machine precision. Consumes one uniform from the stream.
LogProb randomized_tail_draw_log(std::uint64_t x, const HypergeomParams& params, Rng& rng);

// ln F_m(g) where F_m is the CDF of the minimum of m Uniform(0,1) variables:
// ln(1 - (1-g)^m). Stable at both ends; for g -> 0 this approaches ln(m*g).
LogProb min_uniform_logcdf(LogProb log_g, std::uint64_t m);

}  // namespace focs
