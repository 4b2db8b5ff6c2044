#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "addcomb/core.hpp"

namespace addcomb {

/// Undirected simple graph with bit-vector adjacency rows.
class SimpleGraph {
public:
    explicit SimpleGraph(int n);

    int size() const { return n_; }
    void add_edge(int u, int v);
    bool adjacent(int u, int v) const;
    const std::vector<std::uint64_t>& row(int v) const { return adj_[v]; }

private:
    int n_;
    std::vector<std::vector<std::uint64_t>> adj_;
};

/// Cluster decomposition of a vertex set: pairwise non-adjacent blocks of
/// bounded diameter plus a small leftover, built from greedy separated
/// centers and sphere-minimizing radii.
struct ClusterPartition {
    std::vector<std::vector<int>> blocks;
    std::vector<int> leftover;
    std::vector<int> centers;
    std::vector<int> radii;
    int observed_max_diameter = 0;  // max in-block distance actually realized
};

/// Decomposes A within G. Distances are taken in the induced subgraph G[A];
/// centers form a greedy maximal D/4-separated set in vertex order, radii
/// are the integers in (D/4, D/2] minimizing the sphere size (ties: smaller
/// radius). Verifies, on the instance, that blocks are pairwise
/// non-adjacent, each has diameter at most D, and the leftover satisfies
/// |A_*| <= 32 (|A|/D)^2; a violation is an internal logic error.
ClusterPartition cluster_decompose(const SimpleGraph& g, const std::vector<int>& a, double D);

/// Simplicial order on Z_{>=0}^d: smaller degree first; ties broken by the
/// first differing coordinate being larger. Begins 0, e_1, ..., e_d, 2e_1,
/// e_1 + e_2, ...
std::strong_ordering simplicial_compare(const std::vector<int>& x, const std::vector<int>& y);

/// First n points of the simplicial order on Z_{>=0}^d.
std::vector<std::vector<int>> simplicial_initial_segment(int d, std::int64_t n);

/// Exact |S + {e_1, ..., e_d}| over hashed lattice points.
std::int64_t grid_expansion(const std::vector<std::vector<int>>& s, int d);

/// All lattice points of Z_{>=0}^d with coordinate sum <= radius.
std::vector<std::vector<int>> hamming_ball(int d, int radius);

}  // namespace addcomb
