#include "addcomb/structure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_set>

namespace addcomb {

SimpleGraph::SimpleGraph(int n)
    : n_(n), adj_(static_cast<std::size_t>(n),
                  std::vector<std::uint64_t>((static_cast<std::size_t>(n) + 63) / 64, 0)) {
    if (n < 0) throw std::invalid_argument("SimpleGraph: negative size");
}

void SimpleGraph::add_edge(int u, int v) {
    if (u == v) throw std::invalid_argument("SimpleGraph::add_edge: loops not allowed");
    if (u < 0 || v < 0 || u >= n_ || v >= n_)
        throw std::out_of_range("SimpleGraph::add_edge: vertex out of range");
    adj_[u][v >> 6] |= std::uint64_t{1} << (v & 63);
    adj_[v][u >> 6] |= std::uint64_t{1} << (u & 63);
}

bool SimpleGraph::adjacent(int u, int v) const {
    return (adj_[u][v >> 6] >> (v & 63)) & 1;
}

namespace {

constexpr int kUnreached = std::numeric_limits<int>::max();

// BFS distances from src inside the induced subgraph on `mask` vertices.
std::vector<int> bfs_induced(const SimpleGraph& g, const std::vector<bool>& in_a, int src) {
    std::vector<int> dist(static_cast<std::size_t>(g.size()), kUnreached);
    std::deque<int> queue;
    dist[src] = 0;
    queue.push_back(src);
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        const auto& row = g.row(u);
        for (std::size_t wi = 0; wi < row.size(); ++wi) {
            std::uint64_t w = row[wi];
            while (w) {
                const int v = static_cast<int>(wi * 64) + std::countr_zero(w);
                w &= w - 1;
                if (!in_a[v] || dist[v] != kUnreached) continue;
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

}  // namespace

ClusterPartition cluster_decompose(const SimpleGraph& g, const std::vector<int>& a, double D) {
    if (D <= 1) throw std::invalid_argument("cluster_decompose: D > 1 required");
    const std::int64_t r_lo = static_cast<std::int64_t>(std::floor(D / 4)) + 1;
    const std::int64_t r_hi = static_cast<std::int64_t>(std::floor(D / 2));
    if (r_lo > r_hi)
        throw std::invalid_argument("cluster_decompose: no integer radius in (D/4, D/2]");

    std::vector<bool> in_a(static_cast<std::size_t>(g.size()), false);
    for (int v : a) {
        if (v < 0 || v >= g.size()) throw std::out_of_range("cluster_decompose: vertex out of range");
        in_a[v] = true;
    }
    std::vector<int> sorted_a = a;
    std::sort(sorted_a.begin(), sorted_a.end());
    sorted_a.erase(std::unique(sorted_a.begin(), sorted_a.end()), sorted_a.end());

    ClusterPartition part;

    // Connected components of G[A], in vertex order.
    std::vector<bool> seen(static_cast<std::size_t>(g.size()), false);
    std::vector<std::vector<int>> components;
    for (int v : sorted_a) {
        if (seen[v]) continue;
        auto dist = bfs_induced(g, in_a, v);
        std::vector<int> comp;
        for (int u : sorted_a)
            if (dist[u] != kUnreached) {
                comp.push_back(u);
                seen[u] = true;
            }
        components.push_back(std::move(comp));
    }

    for (const auto& comp : components) {
        // Greedy maximal D/4-separated centers, vertex order.
        std::vector<int> centers;
        std::vector<std::vector<int>> center_dist;
        for (int v : comp) {
            bool separated = true;
            for (const auto& cd : center_dist) {
                if (4.0 * static_cast<double>(cd[v]) < D) {
                    separated = false;
                    break;
                }
            }
            if (separated) {
                centers.push_back(v);
                center_dist.push_back(bfs_induced(g, in_a, v));
            }
        }

        // Radius per center: integer in (D/4, D/2] minimizing the sphere
        // { dist = r }, smaller radius on ties.
        std::vector<int> radii;
        for (std::size_t j = 0; j < centers.size(); ++j) {
            std::int64_t best_r = r_lo;
            std::int64_t best_size = std::numeric_limits<std::int64_t>::max();
            for (std::int64_t r = r_lo; r <= r_hi; ++r) {
                std::int64_t size = 0;
                for (int u : comp)
                    if (center_dist[j][u] == r) ++size;
                if (size < best_size) {
                    best_size = size;
                    best_r = r;
                }
            }
            radii.push_back(static_cast<int>(best_r));
        }

        // Blocks in center order; each subtracts the closed balls of the
        // earlier centers.
        std::vector<bool> taken(static_cast<std::size_t>(g.size()), false);
        std::vector<bool> in_block(static_cast<std::size_t>(g.size()), false);
        for (std::size_t j = 0; j < centers.size(); ++j) {
            std::vector<int> block;
            for (int u : comp)
                if (!taken[u] && center_dist[j][u] <= radii[j] - 1) block.push_back(u);
            for (int u : comp)
                if (center_dist[j][u] <= radii[j]) taken[u] = true;
            for (int u : block) in_block[u] = true;
            part.centers.push_back(centers[j]);
            part.radii.push_back(radii[j]);
            part.blocks.push_back(std::move(block));
        }
        for (int u : comp)
            if (!in_block[u]) part.leftover.push_back(u);
    }

    // Drop blocks emptied by earlier balls; keep center bookkeeping aligned.
    {
        std::vector<std::vector<int>> blocks;
        std::vector<int> centers, radii;
        for (std::size_t j = 0; j < part.blocks.size(); ++j) {
            if (part.blocks[j].empty()) continue;
            blocks.push_back(std::move(part.blocks[j]));
            centers.push_back(part.centers[j]);
            radii.push_back(part.radii[j]);
        }
        part.blocks = std::move(blocks);
        part.centers = std::move(centers);
        part.radii = std::move(radii);
    }

    // Instance verification. The construction is supposed to guarantee all
    // three; a failure here is a bug, not bad input.
    const double bound = 32.0 * std::pow(static_cast<double>(sorted_a.size()) / D, 2.0);
    if (static_cast<double>(part.leftover.size()) > bound)
        throw std::logic_error("cluster_decompose: leftover exceeds 32(|A|/D)^2");

    for (std::size_t i = 0; i < part.blocks.size(); ++i)
        for (std::size_t j = i + 1; j < part.blocks.size(); ++j)
            for (int u : part.blocks[i])
                for (int v : part.blocks[j])
                    if (g.adjacent(u, v))
                        throw std::logic_error("cluster_decompose: edge between distinct blocks");

    for (const auto& block : part.blocks) {
        for (int u : block) {
            auto dist = bfs_induced(g, in_a, u);
            for (int v : block) {
                if (dist[v] == kUnreached || static_cast<double>(dist[v]) > D)
                    throw std::logic_error("cluster_decompose: block diameter exceeds D");
                part.observed_max_diameter = std::max(part.observed_max_diameter, dist[v]);
            }
        }
    }
    return part;
}

std::strong_ordering simplicial_compare(const std::vector<int>& x, const std::vector<int>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("simplicial_compare: dimension mismatch");
    std::int64_t dx = 0, dy = 0;
    for (int v : x) dx += v;
    for (int v : y) dy += v;
    if (dx != dy) return dx <=> dy;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != y[i]) return y[i] <=> x[i];  // larger coordinate first
    return std::strong_ordering::equal;
}

namespace {

// Points of degree exactly `deg`, already in simplicial order: the first
// coordinate descends, remaining weight recurses.
void level_points(int d, int deg, std::vector<int>& prefix,
                  std::vector<std::vector<int>>& out, std::int64_t limit) {
    if (static_cast<std::int64_t>(out.size()) >= limit) return;
    const int idx = static_cast<int>(prefix.size());
    if (idx == d - 1) {
        prefix.push_back(deg);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int v = deg; v >= 0; --v) {
        prefix.push_back(v);
        level_points(d, deg - v, prefix, out, limit);
        prefix.pop_back();
        if (static_cast<std::int64_t>(out.size()) >= limit) return;
    }
}

struct PointHash {
    std::size_t operator()(const std::vector<int>& p) const {
        std::size_t h = 0x9E3779B97F4A7C15ULL;
        for (int v : p) h = (h ^ static_cast<std::size_t>(v + 7)) * 0x100000001B3ULL;
        return h;
    }
};

}  // namespace

std::vector<std::vector<int>> simplicial_initial_segment(int d, std::int64_t n) {
    if (d < 1) throw std::invalid_argument("simplicial_initial_segment: d >= 1 required");
    std::vector<std::vector<int>> out;
    std::vector<int> prefix;
    for (int deg = 0; static_cast<std::int64_t>(out.size()) < n; ++deg)
        level_points(d, deg, prefix, out, n);
    return out;
}

std::int64_t grid_expansion(const std::vector<std::vector<int>>& s, int d) {
    std::unordered_set<std::vector<int>, PointHash> image;
    image.reserve(s.size() * static_cast<std::size_t>(d));
    for (const auto& p : s) {
        if (static_cast<int>(p.size()) != d)
            throw std::invalid_argument("grid_expansion: dimension mismatch");
        std::vector<int> q = p;
        for (int i = 0; i < d; ++i) {
            ++q[i];
            image.insert(q);
            --q[i];
        }
    }
    return static_cast<std::int64_t>(image.size());
}

std::vector<std::vector<int>> hamming_ball(int d, int radius) {
    std::vector<std::vector<int>> out;
    std::vector<int> prefix;
    for (int deg = 0; deg <= radius; ++deg)
        level_points(d, deg, prefix, out, std::numeric_limits<std::int64_t>::max());
    return out;
}

}  // namespace addcomb
