#include "addcomb/cayley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "addcomb/enumerate.hpp"
#include "addcomb/sumset.hpp"

namespace addcomb {

CayleyGraph build_cayley(const GSet& a) {
    const Ambient& amb = a.ambient();
    if (!amb.is_cyclic()) throw std::invalid_argument("build_cayley: cyclic ambient required");
    const std::int64_t n = amb.modulus();

    CayleyGraph g;
    g.n = n;
    g.generators = a;
    const std::size_t words = static_cast<std::size_t>((n + 63) / 64);
    g.adjacency.assign(static_cast<std::size_t>(n), std::vector<std::uint64_t>(words, 0));

    // Row x is (A - x) with the vertex itself removed.
    const auto elems = a.elements();
    for (std::int64_t x = 0; x < n; ++x) {
        auto& row = g.adjacency[static_cast<std::size_t>(x)];
        for (std::int64_t s : elems) {
            const std::int64_t y = mod_reduce(s - x, n);
            if (y == x) continue;
            row[y >> 6] |= std::uint64_t{1} << (y & 63);
        }
    }
    return g;
}

namespace {

struct CliqueSolver {
    const std::vector<std::vector<std::uint64_t>>* adj;
    int n;
    std::size_t words;
    int best = 0;
    std::uint64_t nodes = 0;
    std::uint64_t max_nodes = 0;

    std::vector<int> color_order;
    std::vector<int> color_bound;
    std::vector<std::vector<std::uint64_t>> scratch;  // per-depth candidate masks

    bool any(const std::vector<std::uint64_t>& m) const {
        for (auto w : m)
            if (w) return true;
        return false;
    }

    // Greedy coloring of the candidate set; emits vertices in color order
    // with their color index as the bound.
    void color(const std::vector<std::uint64_t>& cand, std::vector<int>& order,
               std::vector<int>& bound, std::vector<std::uint64_t>& uncolored,
               std::vector<std::uint64_t>& cls) {
        order.clear();
        bound.clear();
        uncolored = cand;
        int c = 0;
        while (any(uncolored)) {
            ++c;
            cls = uncolored;
            while (true) {
                int v = -1;
                for (std::size_t wi = 0; wi < words; ++wi) {
                    if (cls[wi]) {
                        v = static_cast<int>(wi * 64 + std::countr_zero(cls[wi]));
                        break;
                    }
                }
                if (v < 0) break;
                // Remove v and its neighbours from the current colour class.
                cls[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
                uncolored[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
                const auto& row = (*adj)[static_cast<std::size_t>(v)];
                for (std::size_t wi = 0; wi < words; ++wi) cls[wi] &= ~row[wi];
                order.push_back(v);
                bound.push_back(c);
            }
        }
    }

    void expand(const std::vector<std::uint64_t>& cand, int depth) {
        ++nodes;
        if (max_nodes && nodes > max_nodes)
            throw BudgetError("clique_number: node budget exceeded", std::to_string(best));
        std::vector<int> order, bound;
        std::vector<std::uint64_t> uncolored(words), cls(words);
        color(cand, order, bound, uncolored, cls);
        std::vector<std::uint64_t> local = cand;
        std::vector<std::uint64_t> next(words);
        for (int i = static_cast<int>(order.size()) - 1; i >= 0; --i) {
            if (depth + bound[static_cast<std::size_t>(i)] <= best) return;
            const int v = order[static_cast<std::size_t>(i)];
            const auto& row = (*adj)[static_cast<std::size_t>(v)];
            bool nonempty = false;
            for (std::size_t wi = 0; wi < words; ++wi) {
                next[wi] = local[wi] & row[wi];
                nonempty = nonempty || next[wi];
            }
            if (!nonempty) {
                best = std::max(best, depth + 1);
            } else {
                expand(next, depth + 1);
            }
            local[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
        }
    }
};

}  // namespace

int clique_number(const std::vector<std::vector<std::uint64_t>>& adjacency, int n,
                  std::uint64_t max_nodes) {
    if (n <= 0) return 0;
    if (n > 4096) throw BudgetError("clique_number: n exceeds the exact-solver cap",
                                    std::to_string(n));
    CliqueSolver solver;
    solver.adj = &adjacency;
    solver.n = n;
    solver.words = static_cast<std::size_t>((n + 63) / 64);
    solver.max_nodes = max_nodes;
    std::vector<std::uint64_t> all(solver.words, 0);
    for (int v = 0; v < n; ++v) all[v >> 6] |= std::uint64_t{1} << (v & 63);
    solver.expand(all, 0);
    return solver.best;
}

ExpectedCliqueCount expected_clique_count(std::int64_t N, std::int64_t k, double budget) {
    if (!is_prime(N)) throw std::invalid_argument("expected_clique_count: N must be prime");
    if (k < 1 || k > N) throw std::invalid_argument("expected_clique_count: k out of range");
    const BigInt subsets = binomial(N, k);
    if (subsets > BigInt(budget))
        throw BudgetError("expected_clique_count: C(N, k) exceeds the enumeration budget",
                          subsets.get_str());

    ExpectedCliqueCount out;
    out.direct = 0;

    // Direct route: iterate all k-subsets, compute the restricted sumset
    // size with plain arithmetic.
    std::vector<std::int64_t> idx(static_cast<std::size_t>(k));
    for (std::int64_t i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::vector<std::uint64_t> mask(static_cast<std::size_t>((N + 63) / 64));
    Rational half = make_rational(1, 2);
    for (;;) {
        std::fill(mask.begin(), mask.end(), 0);
        for (std::int64_t i = 0; i < k; ++i)
            for (std::int64_t j = i + 1; j < k; ++j) {
                const std::int64_t s = (idx[i] + idx[j]) % N;
                mask[s >> 6] |= std::uint64_t{1} << (s & 63);
            }
        std::int64_t m = 0;
        for (auto w : mask) m += std::popcount(w);
        Rational term(1);
        mpq_div_2exp(term.get_mpq_t(), term.get_mpq_t(), static_cast<unsigned long>(m));
        out.direct += term;

        // next combination
        std::int64_t pos = k - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == N - k + pos) --pos;
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (std::int64_t i = pos + 1; i < k; ++i)
            idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
    }

    // Independent route: per-size counts from the DFS enumerator.
    CountQuery q{Ambient::cyclic(N), k, kUnboundedSumset, /*restricted=*/true};
    const CountResult counts = count_small_sumset(q);
    out.via_counts = 0;
    for (const auto& [m, c] : counts.per_m_breakdown) {
        Rational term = make_rational(c, 1);
        mpq_div_2exp(term.get_mpq_t(), term.get_mpq_t(), static_cast<unsigned long>(m));
        out.via_counts += term;
    }

    if (out.direct != out.via_counts)
        throw std::logic_error("expected_clique_count: the two routes disagree");
    return out;
}

SampledCliqueCount expected_clique_count_sampled(std::int64_t N, std::int64_t k,
                                                 std::uint64_t samples, std::uint64_t seed) {
    if (!is_prime(N)) throw std::invalid_argument("expected_clique_count_sampled: N must be prime");
    if (k < 1 || k > N || samples == 0)
        throw std::invalid_argument("expected_clique_count_sampled: bad arguments");

    SeededSource src(seed, 0);
    const double total = binomial(N, k).get_d();
    double sum = 0, sum_sq = 0;
    std::vector<std::int64_t> pick(static_cast<std::size_t>(k));
    std::vector<std::uint64_t> mask(static_cast<std::size_t>((N + 63) / 64));
    for (std::uint64_t it = 0; it < samples; ++it) {
        // Floyd's algorithm for a uniform k-subset.
        std::vector<std::int64_t> chosen;
        for (std::int64_t j = N - k; j < N; ++j) {
            const std::int64_t t = static_cast<std::int64_t>(src.below(static_cast<std::uint64_t>(j + 1)));
            if (std::find(chosen.begin(), chosen.end(), t) == chosen.end())
                chosen.push_back(t);
            else
                chosen.push_back(j);
        }
        std::fill(mask.begin(), mask.end(), 0);
        for (std::size_t i = 0; i < chosen.size(); ++i)
            for (std::size_t j = i + 1; j < chosen.size(); ++j) {
                const std::int64_t s = (chosen[i] + chosen[j]) % N;
                mask[s >> 6] |= std::uint64_t{1} << (s & 63);
            }
        std::int64_t m = 0;
        for (auto w : mask) m += std::popcount(w);
        const double val = total * std::exp2(-static_cast<double>(m));
        sum += val;
        sum_sq += val * val;
    }
    SampledCliqueCount out;
    out.samples = samples;
    out.estimate = sum / static_cast<double>(samples);
    const double var =
        std::max(0.0, sum_sq / static_cast<double>(samples) - out.estimate * out.estimate);
    const double sigma = std::sqrt(var / static_cast<double>(samples));
    out.ci_lo = out.estimate - 3 * sigma;
    out.ci_hi = out.estimate + 3 * sigma;
    return out;
}

CliqueStats clique_experiment(std::int64_t N, std::uint64_t samples, double eps,
                              std::uint64_t seed, int threads) {
    if (N < 1) throw std::invalid_argument("clique_experiment: N >= 1 required");
    CliqueStats stats;
    stats.n = N;
    stats.epsilon = eps;
    stats.threshold = (2.0 + eps) * std::log2(static_cast<double>(N));
    stats.results.assign(samples, CliqueSample{});

    const int nthreads = std::max(1, threads);
    auto worker = [&](int tid) {
        for (std::uint64_t i = static_cast<std::uint64_t>(tid); i < samples;
             i += static_cast<std::uint64_t>(nthreads)) {
            SeededSource src(seed, i);
            GSet a(Ambient::cyclic(N));
            for (std::int64_t x = 0; x < N; ++x)
                if (src.coin()) a.insert(x);
            const CayleyGraph g = build_cayley(a);
            CliqueSample& s = stats.results[i];
            s.seed = seed;
            s.stream = i;
            s.set_size = a.size();
            s.omega = clique_number(g);
            s.violated = static_cast<double>(s.omega) > stats.threshold;
        }
    };
    if (nthreads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    double total = 0;
    for (const auto& s : stats.results) {
        total += s.omega;
        if (s.violated) ++stats.violations;
    }
    stats.mean_omega = samples ? total / static_cast<double>(samples) : 0.0;
    return stats;
}

}  // namespace addcomb
