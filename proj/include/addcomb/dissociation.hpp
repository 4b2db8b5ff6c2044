#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "addcomb/core.hpp"

namespace addcomb {

/// A vanishing integer combination certifying non-dissociation:
/// sum(coefficients[i] * x_i) = 0 in the ambient, not all zero, with
/// l1 weight at most M.
struct DissociationWitness {
    std::vector<std::int64_t> coefficients;
    std::int64_t weight = 0;
};

struct DissociationResult {
    bool dissociated = false;
    std::optional<DissociationWitness> witness;
};

/// Exhaustive scan of the l1 ball of radius M. Witnesses are reported in a
/// fixed order: weight-major, then coordinatewise 0 < 1 < -1 < 2 < -2 < ...
/// Over interval ambients the relation is over Z; over Z/NZ it is mod N.
DissociationResult is_dissociated(const std::vector<std::int64_t>& xs, std::int64_t M,
                                  const Ambient& ambient, double budget = 5e7);

/// Greedy maximal M-dissociated subset: scan A in increasing order, keep an
/// element whenever the extended list stays M-dissociated. Maximal, not
/// necessarily maximum.
GSet max_dissociated_subset(const GSet& a, std::int64_t M, double budget = 5e7);

/// Exact number of integer d-tuples with sum|lambda_i| <= M (zero included).
BigInt l1_ball_count(std::int64_t d, std::int64_t M);

/// Nonnegative-orthant count: tuples with lambda_i >= 0, sum <= M. Equals
/// C(M + d, d).
BigInt l1_ball_count_nonneg(std::int64_t d, std::int64_t M);

}  // namespace addcomb
