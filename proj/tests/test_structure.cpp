#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "addcomb/core.hpp"
#include "addcomb/structure.hpp"
#include "oracles.hpp"

using namespace addcomb;

namespace {

std::vector<std::vector<bool>> dense_adj(const SimpleGraph& g) {
    std::vector<std::vector<bool>> adj(static_cast<std::size_t>(g.size()),
                                       std::vector<bool>(static_cast<std::size_t>(g.size())));
    for (int u = 0; u < g.size(); ++u)
        for (int v = 0; v < g.size(); ++v) adj[u][v] = g.adjacent(u, v);
    return adj;
}

void verify_partition(const SimpleGraph& g, const std::vector<int>& a, double D,
                      const ClusterPartition& part) {
    // Partition property.
    std::set<int> seen;
    std::size_t total = part.leftover.size();
    for (const auto& b : part.blocks) total += b.size();
    REQUIRE(total == a.size());
    for (const auto& b : part.blocks)
        for (int v : b) REQUIRE(seen.insert(v).second);
    for (int v : part.leftover) REQUIRE(seen.insert(v).second);
    for (int v : a) REQUIRE(seen.count(v));

    // (a) small leftover.
    REQUIRE(static_cast<double>(part.leftover.size()) <=
            32.0 * std::pow(static_cast<double>(a.size()) / D, 2.0));

    // (b) no edges between blocks (independent adjacency oracle).
    const auto adj = dense_adj(g);
    for (std::size_t i = 0; i < part.blocks.size(); ++i)
        for (std::size_t j = i + 1; j < part.blocks.size(); ++j)
            for (int u : part.blocks[i])
                for (int v : part.blocks[j]) REQUIRE_FALSE(adj[u][v]);

    // (c) diameter at most D inside G[A] (independent BFS oracle).
    std::vector<bool> allowed(static_cast<std::size_t>(g.size()), false);
    for (int v : a) allowed[static_cast<std::size_t>(v)] = true;
    for (const auto& b : part.blocks)
        for (int u : b) {
            const auto dist = oracles::naive_bfs(adj, allowed, u);
            for (int v : b) {
                REQUIRE(dist[static_cast<std::size_t>(v)] >= 0);
                REQUIRE(static_cast<double>(dist[static_cast<std::size_t>(v)]) <= D);
            }
        }
}

}  // namespace

TEST_CASE("cluster decomposition edge cases") {
    SimpleGraph g(8);
    const ClusterPartition empty = cluster_decompose(g, {}, 8.0);
    CHECK(empty.blocks.empty());
    CHECK(empty.leftover.empty());

    // Edgeless graph: every vertex is its own component and block.
    std::vector<int> all{0, 1, 2, 3, 4, 5, 6, 7};
    const ClusterPartition singletons = cluster_decompose(g, all, 8.0);
    CHECK(singletons.blocks.size() == 8);
    CHECK(singletons.leftover.empty());
    for (const auto& b : singletons.blocks) CHECK(b.size() == 1);

    CHECK_THROWS_AS(cluster_decompose(g, all, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(cluster_decompose(g, all, 1.5), std::invalid_argument);  // no integer radius
}

TEST_CASE("cluster decomposition on a long path") {
    const int n = 64;
    SimpleGraph g(n);
    for (int v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
    std::vector<int> a;
    for (int v = 0; v < n; ++v) a.push_back(v);
    const ClusterPartition part = cluster_decompose(g, a, 16.0);
    verify_partition(g, a, 16.0, part);
    CHECK(part.blocks.size() >= 2);
    CHECK(part.observed_max_diameter <= 14);  // 2(r-1) <= D - 2
}

TEST_CASE("cluster decomposition over a seeded random corpus") {
    int instance = 0;
    for (const int n : {40, 96}) {
        for (const double p : {0.05, 0.2}) {
            for (const double D : {8.0, 16.0, 32.0}) {
                for (int rep = 0; rep < 4; ++rep) {
                    SeededSource src(instance++, 100);
                    SimpleGraph g(n);
                    for (int u = 0; u < n; ++u)
                        for (int v = u + 1; v < n; ++v)
                            if (src.unit() < p) g.add_edge(u, v);
                    std::vector<int> a;
                    for (int v = 0; v < n; ++v)
                        if (src.coin()) a.push_back(v);
                    const ClusterPartition part = cluster_decompose(g, a, D);
                    verify_partition(g, a, D, part);
                }
            }
        }
    }
}

TEST_CASE("simplicial order basics") {
    const int d = 5;
    std::vector<std::vector<int>> pts;
    pts.push_back(std::vector<int>(d, 0));
    for (int i = 0; i < d; ++i) {
        std::vector<int> e(d, 0);
        e[i] = 1;
        pts.push_back(e);
    }
    // 0 < e_1 < e_2 < ... < e_d
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        CHECK(simplicial_compare(pts[i], pts[i + 1]) == std::strong_ordering::less);

    // 2e_1 < e_1 + e_2 (equal degree; first coordinate 2 > 1).
    std::vector<int> two_e1(d, 0), e1_e2(d, 0);
    two_e1[0] = 2;
    e1_e2[0] = 1;
    e1_e2[1] = 1;
    CHECK(simplicial_compare(two_e1, e1_e2) == std::strong_ordering::less);
    CHECK(simplicial_compare(e1_e2, e1_e2) == std::strong_ordering::equal);
    CHECK_THROWS_AS(simplicial_compare({0, 1}, {0, 1, 2}), std::invalid_argument);

    // The first d + 2 elements of the generated segment match.
    const auto seg = simplicial_initial_segment(d, d + 2);
    CHECK(seg[0] == std::vector<int>(d, 0));
    for (int i = 0; i < d; ++i) CHECK(seg[static_cast<std::size_t>(i + 1)] == pts[i + 1]);
    CHECK(seg[static_cast<std::size_t>(d + 1)] == two_e1);
}

TEST_CASE("simplicial order is total and the generator respects it") {
    SeededSource src(5, 0);
    const int d = 6;
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<int> x(d), y(d), z(d);
        for (int i = 0; i < d; ++i) {
            x[i] = static_cast<int>(src.below(3));
            y[i] = static_cast<int>(src.below(3));
            z[i] = static_cast<int>(src.below(3));
        }
        // Antisymmetry.
        const auto xy = simplicial_compare(x, y);
        const auto yx = simplicial_compare(y, x);
        if (xy == std::strong_ordering::less) CHECK(yx == std::strong_ordering::greater);
        if (xy == std::strong_ordering::equal) CHECK(x == y);
        // Transitivity on sorted triple.
        std::vector<std::vector<int>> triple{x, y, z};
        std::sort(triple.begin(), triple.end(), [](const auto& a, const auto& b) {
            return simplicial_compare(a, b) == std::strong_ordering::less;
        });
        CHECK(simplicial_compare(triple[0], triple[2]) != std::strong_ordering::greater);
    }

    const auto seg = simplicial_initial_segment(4, 60);
    for (std::size_t i = 0; i + 1 < seg.size(); ++i)
        CHECK(simplicial_compare(seg[i], seg[i + 1]) == std::strong_ordering::less);
}

TEST_CASE("grid expansion values") {
    // S = {0}: the d unit vectors.
    CHECK(grid_expansion({std::vector<int>(7, 0)}, 7) == 7);

    // Hamming ball of radius 2 in dimension 10: 10 + 55 + 220.
    const auto ball = hamming_ball(10, 2);
    CHECK(static_cast<std::int64_t>(ball.size()) == 66);
    CHECK(grid_expansion(ball, 10) == 285);

    // Initial segments meet the (1/2 - eps) d |S| bound at desk scale.
    for (int d = 10; d <= 14; ++d) {
        const std::int64_t size = static_cast<std::int64_t>(2.5 * d);
        const auto seg = simplicial_initial_segment(d, size);
        const std::int64_t expansion = grid_expansion(seg, d);
        CHECK(static_cast<double>(expansion) >=
              (0.5 - 0.15) * static_cast<double>(d) * static_cast<double>(size));
    }
}

TEST_CASE("initial segments have near-minimal expansion among sampled sets") {
    SeededSource src(6, 0);
    for (const int d : {5, 8}) {
        for (const std::int64_t size : {2 * d, 3 * d}) {
            const auto seg = simplicial_initial_segment(d, size);
            const std::int64_t seg_exp = grid_expansion(seg, d);
            const auto pool = hamming_ball(d, 3);
            int not_worse = 0;
            const int trials = 1000;
            for (int t = 0; t < trials; ++t) {
                // Random same-size subset of the degree <= 3 ball.
                std::set<std::size_t> pick;
                while (pick.size() < static_cast<std::size_t>(size))
                    pick.insert(static_cast<std::size_t>(src.below(pool.size())));
                std::vector<std::vector<int>> s;
                for (auto i : pick) s.push_back(pool[i]);
                if (grid_expansion(s, d) >= seg_exp) ++not_worse;
            }
            CHECK(not_worse == trials);
        }
    }
}
