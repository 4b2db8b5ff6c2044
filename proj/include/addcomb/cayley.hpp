#pragma once

#include <cstdint>
#include <vector>

#include "addcomb/core.hpp"

namespace addcomb {

/// Cayley sum graph on Z/NZ with generator set A: x ~ y iff x + y is in A
/// (x != y; the loop condition 2x in A is discarded).
struct CayleyGraph {
    std::int64_t n = 0;
    GSet generators;
    std::vector<std::vector<std::uint64_t>> adjacency;  // bit rows

    CayleyGraph() : generators(Ambient::cyclic(1)) {}
    bool adjacent(std::int64_t x, std::int64_t y) const {
        return (adjacency[x][y >> 6] >> (y & 63)) & 1;
    }
};

CayleyGraph build_cayley(const GSet& a);

/// Exact maximum clique by branch-and-bound with a greedy-coloring bound
/// and bit-parallel candidate sets. n is capped (default 4096); a node
/// budget, when given, raises a BudgetError carrying the best clique found.
int clique_number(const std::vector<std::vector<std::uint64_t>>& adjacency, int n,
                  std::uint64_t max_nodes = 0);

inline int clique_number(const CayleyGraph& g, std::uint64_t max_nodes = 0) {
    return clique_number(g.adjacency, static_cast<int>(g.n), max_nodes);
}

struct ExpectedCliqueCount {
    Rational direct;       // sum over k-subsets C of 2^{-|C +^ C|}
    Rational via_counts;   // sum over m of |S_k^m| 2^{-m}, from the enumerator
};

/// Expected number of k-cliques in the Cayley sum graph of a uniformly
/// random A, computed exactly along two independent routes which must agree.
ExpectedCliqueCount expected_clique_count(std::int64_t N, std::int64_t k,
                                          double budget = 1e8);

struct SampledCliqueCount {
    double estimate = 0;
    double ci_lo = 0;  // 3-sigma normal band
    double ci_hi = 0;
    std::uint64_t samples = 0;
};

/// Monte-Carlo estimator of the same expectation: averages
/// C(N, k) * 2^{-|C +^ C|} over random k-subsets C.
SampledCliqueCount expected_clique_count_sampled(std::int64_t N, std::int64_t k,
                                                 std::uint64_t samples, std::uint64_t seed);

struct CliqueSample {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::int64_t set_size = 0;
    int omega = 0;
    bool violated = false;
};

struct CliqueStats {
    std::int64_t n = 0;
    double epsilon = 0;
    double threshold = 0;  // (2 + eps) log2 N
    std::vector<CliqueSample> results;
    std::int64_t violations = 0;
    double mean_omega = 0;
};

/// Draws `samples` uniformly random A (each element with probability 1/2),
/// computes the exact clique number of each Cayley graph, and tallies how
/// often it exceeds (2 + eps) log2 N. Deterministic in (seed), independent
/// of the thread count.
CliqueStats clique_experiment(std::int64_t N, std::uint64_t samples, double eps,
                              std::uint64_t seed, int threads = 1);

}  // namespace addcomb
