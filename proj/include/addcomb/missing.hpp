#pragma once

#include <cstdint>
#include <vector>

#include "addcomb/core.hpp"

namespace addcomb {

/// Number of elements of {1, ..., horizon} missed by X + X, for
/// X inside the interval [1, horizon].
std::int64_t missing_count(const GSet& x);

struct MissingBucket {
    std::int64_t s = 0;
    std::uint64_t count = 0;
    double a_hat = 0;
    double ci_lo = 0;        // 3-sigma binomial band
    double ci_hi = 0;
    double exponent_fit = 0;  // -(2/s) log2(a_hat), 0 when undefined
};

struct MissingDistribution {
    std::int64_t horizon = 0;
    std::int64_t s_max = 0;
    std::uint64_t samples = 0;
    std::vector<std::uint64_t> histogram;  // index s, 0..horizon
    std::vector<MissingBucket> buckets;    // s = 0..horizon with counts
};

/// Random subsets of [1, 10*s_max], each element kept with probability 1/2.
/// Sampling is block-parallel and deterministic in (seed); the thread count
/// does not affect the result.
MissingDistribution missing_distribution(std::int64_t s_max, std::uint64_t samples,
                                         std::uint64_t seed, int threads = 1);

/// Exact distribution of the missing count over all 2^horizon subsets.
/// probabilities[s] has denominator 2^horizon.
std::vector<Rational> exact_missing_distribution(std::int64_t horizon);

}  // namespace addcomb
