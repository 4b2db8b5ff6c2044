#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "addcomb/core.hpp"
#include "addcomb/enumerate.hpp"
#include "addcomb/sumset.hpp"
#include "oracles.hpp"

using namespace addcomb;

namespace {

// Full-enumeration oracle: per-sumset-size counts over all C(n, k) subsets.
std::map<std::int64_t, BigInt> oracle_breakdown(const Ambient& amb, std::int64_t k,
                                                bool restricted) {
    std::map<std::int64_t, BigInt> out;
    const std::int64_t mod = amb.is_cyclic() ? amb.modulus() : 0;
    oracles::for_each_subset(amb.size(), k, [&](const std::vector<std::int64_t>& idx) {
        std::vector<std::int64_t> elems;
        for (auto i : idx) elems.push_back(amb.value_at(i));
        const auto ss = oracles::naive_sumset(elems, restricted, mod);
        out[static_cast<std::int64_t>(ss.size())] += 1;
    });
    return out;
}

}  // namespace

TEST_CASE("count examples") {
    CHECK(count_small_sumset({Ambient::interval(1, 10), 3, 5, false}).exact_count == 20);
    // |A+A| >= 2k-1 over Z: budget 2k-2 is infeasible.
    CHECK(count_small_sumset({Ambient::interval(1, 14), 4, 6, false}).exact_count == 0);
    // Every 4-subset of [1,8] has |A+A| <= 15.
    CHECK(count_small_sumset({Ambient::interval(1, 8), 4, 15, false}).exact_count == 70);
}

TEST_CASE("enumerator equals the subset oracle (both ambients, both kernels)") {
    for (std::int64_t n : {6, 9, 13}) {
        for (std::int64_t k = 1; k <= std::min<std::int64_t>(4, n); ++k) {
            for (const bool cyclic : {false, true}) {
                const Ambient amb = cyclic ? Ambient::cyclic(n) : Ambient::interval(1, n);
                for (const bool restricted : {false, true}) {
                    const auto expect = oracle_breakdown(amb, k, restricted);
                    const auto got =
                        count_small_sumset({amb, k, kUnboundedSumset, restricted});
                    REQUIRE(got.per_m_breakdown == expect);
                    // Pruned counts agree with prefix sums of the breakdown
                    // at every budget.
                    BigInt prefix = 0;
                    std::int64_t max_m = expect.empty() ? 0 : expect.rbegin()->first;
                    std::map<std::int64_t, BigInt> running;
                    for (std::int64_t m = 0; m <= max_m; ++m) {
                        auto it = expect.find(m);
                        if (it != expect.end()) prefix += it->second;
                        if (m % 3 == 0 || m == max_m) {
                            const auto pruned = count_small_sumset({amb, k, m, restricted});
                            REQUIRE(pruned.exact_count == prefix);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("every k-subset of an AP of length Kk/2 has |A+A| <= Kk - 1") {
    // Exhaustive over every integer K >= 2 and k with Kk/2 integral and at
    // most 12; the containment A+A inside P+P caps the sumset at 2|P| - 1.
    for (std::int64_t K = 2; K <= 6; ++K) {
        for (std::int64_t k = 1; k <= 12; ++k) {
            if ((K * k) % 2 != 0) continue;
            const std::int64_t plen = K * k / 2;
            if (plen > 12 || k > plen) continue;
            oracles::for_each_subset(plen, k, [&](const std::vector<std::int64_t>& idx) {
                GSet a(Ambient::interval(0, plen - 1), idx);
                REQUIRE(sumset(a, false).size() <= K * k - 1);
            });
        }
    }
}

TEST_CASE("count is monotone in m and in N for interval ambients") {
    const std::int64_t k = 3;
    BigInt prev_n = -1;
    for (std::int64_t n = 4; n <= 12; ++n) {
        const BigInt full =
            count_small_sumset({Ambient::interval(1, n), k, 9, false}).exact_count;
        CHECK(full >= prev_n);
        prev_n = full;
        BigInt prev_m = -1;
        for (std::int64_t m = 0; m <= 2 * n; ++m) {
            const BigInt c =
                count_small_sumset({Ambient::interval(1, n), k, m, false}).exact_count;
            CHECK(c >= prev_m);
            prev_m = c;
        }
    }
}

TEST_CASE("threaded counting is deterministic") {
    const CountQuery q{Ambient::interval(1, 16), 5, 14, false};
    EnumOptions seq, par;
    par.threads = 4;
    const auto a = count_small_sumset(q, seq);
    const auto b = count_small_sumset(q, par);
    CHECK(a.exact_count == b.exact_count);
    CHECK(a.per_m_breakdown == b.per_m_breakdown);
    CHECK(a.nodes_explored == b.nodes_explored);
}

TEST_CASE("budget error carries the projection") {
    CountQuery q{Ambient::interval(1, 200), 30, 100, false};
    EnumOptions opt;
    opt.node_ceiling = 1e6;
    CHECK_THROWS_AS(count_small_sumset(q, opt), BudgetError);
}

TEST_CASE("list: every pair of [1,6] has |A+A| = 3") {
    const auto res = list_small_sumset({Ambient::interval(1, 6), 2, 3, false}, 100);
    CHECK(res.sets.size() == 15);
    CHECK_FALSE(res.truncated);
}

TEST_CASE("list emits qualifying sets in lexicographic order with cap") {
    const auto res = list_small_sumset({Ambient::interval(1, 10), 3, 5, false}, 1000);
    CHECK(res.sets.size() == 20);
    CHECK_FALSE(res.truncated);
    for (std::size_t i = 1; i < res.sets.size(); ++i)
        CHECK(GSet::lex_less(res.sets[i - 1], res.sets[i]));
    // All are 3-term APs.
    for (const auto& s : res.sets) {
        const auto e = s.elements();
        CHECK(e[1] - e[0] == e[2] - e[1]);
    }
    const auto capped = list_small_sumset({Ambient::interval(1, 10), 3, 5, false}, 7);
    CHECK(capped.sets.size() == 7);
    CHECK(capped.truncated);
    for (std::size_t i = 0; i < 7; ++i) CHECK(capped.sets[i] == res.sets[i]);
}

TEST_CASE("list: whole cyclic group is the only k = N solution") {
    const auto res = list_small_sumset({Ambient::cyclic(5), 5, 5, false}, 10);
    REQUIRE(res.sets.size() == 1);
    CHECK(res.sets[0].size() == 5);
}

TEST_CASE("theorem1_bound exact values") {
    CHECK(theorem1_bound(100, 2.0, 10, 0.1).value == BigInt(2) * 1 * 10000);
    CHECK(theorem1_bound(10, 4.0, 4, 0.5).value == BigInt(4) * 70 * 10000);
    {
        // ceil(2^5) * C(30, 20) * 50^3, cross-checked against logarithms.
        const BoundResult b = theorem1_bound(50, 3.0, 20, 0.25);
        const BigInt expect = BigInt(32) * binomial(30, 20) * 125000;
        CHECK(b.value == expect);
        const double log2v = mpz_sizeinbase(b.value.get_mpz_t(), 2) - 1.0;
        const double approx = 5.0 + std::log2(binomial(30, 20).get_d()) + 3 * std::log2(50.0);
        CHECK(std::abs(log2v - approx) <= 1.5);
    }
    {
        const BoundResult b = theorem1_bound(10, 1.0, 8, 0.2);  // k > floor(Kk/2) = 4
        CHECK(b.value == 0);
        CHECK(b.zero_warning);
    }
}

TEST_CASE("affine canonical forms") {
    const Ambient amb = Ambient::cyclic(7);
    CHECK(affine_canonical(GSet(amb, {3})) == GSet(amb, {0}));
    CHECK(affine_canonical(GSet(amb, {0, 1})) == GSet(amb, {0, 1}));
    CHECK(affine_canonical(GSet(amb, {2, 5})) == GSet(amb, {0, 1}));
    // {3,5,6} = -1 * {1,2,4}: same orbit.
    CHECK(affine_canonical(GSet(amb, {1, 2, 4})) == affine_canonical(GSet(amb, {3, 5, 6})));
}

TEST_CASE("affine orbits partition, orbit sizes divide N(N-1), |A+A| constant") {
    for (const std::int64_t n : {5, 7, 11, 13}) {
        const Ambient amb = Ambient::cyclic(n);
        for (std::int64_t k = 1; k <= 3; ++k) {
            std::map<std::vector<std::int64_t>, std::int64_t> orbit_sizes;
            std::map<std::vector<std::int64_t>, std::int64_t> orbit_sumset;
            oracles::for_each_subset(n, k, [&](const std::vector<std::int64_t>& idx) {
                GSet a(amb, idx);
                const GSet canon = affine_canonical(a);
                const auto key = canon.elements();
                orbit_sizes[key] += 1;
                const std::int64_t ss = sumset(a, false).size();
                auto it = orbit_sumset.find(key);
                if (it == orbit_sumset.end())
                    orbit_sumset[key] = ss;
                else
                    REQUIRE(it->second == ss);
            });
            BigInt total = 0;
            for (const auto& [key, size] : orbit_sizes) {
                total += size;
                CHECK((n * (n - 1)) % size == 0);
            }
            CHECK(total == binomial(n, k));
        }
    }
}

TEST_CASE("orbit size times stabilizer size equals N(N-1)") {
    // Verified through the affine stabilizer in the freiman module at the
    // level of mask scans here: the orbit of A has size N(N-1)/|stab|.
    const std::int64_t n = 11;
    const Ambient amb = Ambient::cyclic(n);
    GSet a(amb, {1, 3, 9});  // multiplicative coset, nontrivial stabilizer
    std::set<std::vector<std::int64_t>> orbit;
    std::int64_t stab = 0;
    for (std::int64_t lam = 1; lam < n; ++lam)
        for (std::int64_t mu = 0; mu < n; ++mu) {
            GSet img(amb);
            for (auto x : a.elements()) img.insert(lam * x + mu);
            orbit.insert(img.elements());
            if (img == a) ++stab;
        }
    CHECK(static_cast<std::int64_t>(orbit.size()) * stab == n * (n - 1));
}
