#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "addcomb/core.hpp"

namespace addcomb {

inline constexpr std::int64_t kUnboundedSumset = std::numeric_limits<std::int64_t>::max();

/// A counting query: k-subsets of the ambient whose (plain or restricted)
/// sumset has size at most m.
struct CountQuery {
    Ambient ambient;
    std::int64_t k = 0;
    std::int64_t m = kUnboundedSumset;
    bool restricted = false;
};

struct EnumOptions {
    // Reject queries whose projected node count C(|ambient|, k) exceeds this.
    double node_ceiling = 1e9;
    int threads = 1;
};

struct CountResult {
    BigInt exact_count;
    std::map<std::int64_t, BigInt> per_m_breakdown;  // final sumset size -> count
    std::uint64_t nodes_explored = 0;
};

/// Exact count by pruned DFS over increasing elements. The result does not
/// depend on traversal order or thread count.
CountResult count_small_sumset(const CountQuery& query, const EnumOptions& opt = {});

struct ListResult {
    std::vector<GSet> sets;
    bool truncated = false;
    std::uint64_t nodes_explored = 0;
};

/// Emits each qualifying set exactly once, in lexicographic mask order,
/// stopping (with a truncation marker) once `cap` sets have been produced.
ListResult list_small_sumset(const CountQuery& query, std::uint64_t cap,
                             const EnumOptions& opt = {});

struct BoundResult {
    BigInt value;
    bool zero_warning = false;  // set when k > floor(K*k/2) empties the binomial
};

/// Exact integer evaluation of ceil(2^{delta*k}) * C(floor(K*k/2), k) * N^{floor(K+delta)}.
BoundResult theorem1_bound(std::int64_t N, double K, std::int64_t k, double delta);

/// Canonical representative of the affine orbit {lambda*A + mu} in Z/NZ,
/// N prime: the lexicographically least member mask. Constant on orbits,
/// and |A + A| is invariant across each orbit.
GSet affine_canonical(const GSet& a);

/// Exact binomial coefficient.
BigInt binomial(std::int64_t n, std::int64_t k);

}  // namespace addcomb
