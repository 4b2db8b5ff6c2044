#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "addcomb/core.hpp"
#include "addcomb/sumset.hpp"
#include "oracles.hpp"

using namespace addcomb;

namespace {

std::set<std::int64_t> as_set(const GSet& g) {
    const auto v = g.elements();
    return {v.begin(), v.end()};
}

GSet random_subset(const Ambient& amb, SeededSource& src) {
    GSet g(amb);
    for (std::int64_t i = 0; i < amb.size(); ++i)
        if (src.coin()) g.insert(amb.value_at(i));
    return g;
}

}  // namespace

TEST_CASE("sumset examples") {
    GSet ap(Ambient::interval(1, 10), {1, 2, 3});
    CHECK(as_set(sumset(ap, false)) == std::set<std::int64_t>{2, 3, 4, 5, 6});
    CHECK(as_set(sumset(ap, true)) == std::set<std::int64_t>{3, 4, 5});

    // Powers of two form a Sidon set: all C(5,2) + 5 = 15 sums distinct.
    GSet sidon(Ambient::interval(1, 32), {1, 2, 4, 8, 16});
    CHECK(sumset(sidon, false).size() == 15);

    GSet zero(Ambient::cyclic(5), {0});
    CHECK(sumset(zero, false).size() == 1);
    CHECK(sumset(zero, true).empty());

    GSet empty(Ambient::interval(1, 4));
    CHECK(sumset(empty, true).empty());
    CHECK(sumset(empty, false).empty());
}

TEST_CASE("sumset result ambient") {
    GSet a(Ambient::interval(3, 9), {3, 9});
    const GSet s = sumset(a, false);
    CHECK(s.ambient().lo() == 6);
    CHECK(s.ambient().hi() == 18);
    CHECK(as_set(s) == std::set<std::int64_t>{6, 12, 18});

    GSet c(Ambient::cyclic(11), {9, 10});
    const GSet sc = sumset(c, false);
    CHECK(sc.ambient().modulus() == 11);
    CHECK(as_set(sc) == std::set<std::int64_t>{7, 8, 9});  // 18, 19, 20 mod 11
}

TEST_CASE("kernel agrees with the pairwise oracle") {
    SeededSource src(2024, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const bool cyclic = src.coin();
        const std::int64_t n = 2 + static_cast<std::int64_t>(src.below(60));
        const Ambient amb =
            cyclic ? Ambient::cyclic(n) : Ambient::interval(-(n / 2), n - 1 - n / 2);
        const GSet a = random_subset(amb, src);
        for (bool restricted : {false, true}) {
            const auto fast = as_set(sumset(a, restricted));
            const auto slow =
                oracles::naive_sumset(a.elements(), restricted, cyclic ? n : 0);
            REQUIRE(fast == slow);
        }
    }
}

TEST_CASE("restricted/plain sandwich and diagonal") {
    SeededSource src(5, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::int64_t n = 2 + static_cast<std::int64_t>(src.below(40));
        const Ambient amb = src.coin() ? Ambient::cyclic(n) : Ambient::interval(0, n - 1);
        const GSet a = random_subset(amb, src);
        const auto plain = as_set(sumset(a, false));
        const auto restr = as_set(sumset(a, true));
        for (auto v : restr) CHECK(plain.count(v));
        // plain \ restricted is contained in the diagonal {2a}.
        for (auto v : plain) {
            if (restr.count(v)) continue;
            bool diagonal = false;
            for (auto x : a.elements()) {
                std::int64_t d = 2 * x;
                if (amb.is_cyclic()) d = mod_reduce(d, n);
                if (d == v) diagonal = true;
            }
            CHECK(diagonal);
        }
    }
}

TEST_CASE("doubling statistics") {
    // An AP of length k doubles to exactly 2k - 1.
    for (std::int64_t k : {1, 2, 5, 9}) {
        std::vector<std::int64_t> elems;
        for (std::int64_t i = 0; i < k; ++i) elems.push_back(7 + 3 * i);
        GSet ap(Ambient::interval(0, 7 + 3 * k), elems);
        const DoublingStats st = doubling_stats(ap);
        CHECK(st.sumset_size == 2 * k - 1);
        CHECK(st.doubling == make_rational(2 * k - 1, k));
        CHECK(st.restricted_size <= st.sumset_size);
        CHECK(st.sumset_size <= st.restricted_size + k);
    }

    GSet zero(Ambient::cyclic(5), {0});
    const DoublingStats st = doubling_stats(zero);
    CHECK(st.sumset_size == 1);
    CHECK(st.doubling == 1);
}

TEST_CASE("doubling below K for the AP-plus-points family") {
    // P an AP of length k - K + 2 together with K - 2 spread-out points has
    // |A+A| <= 2|P| + (K-2)|P| + (K-2)(K-1)/2 and doubling below K.
    SeededSource src(77, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::int64_t K = 3 + static_cast<std::int64_t>(src.below(4));   // 3..6
        const std::int64_t k = K + 6 + static_cast<std::int64_t>(src.below(20));
        const std::int64_t plen = k - K + 2;
        const std::int64_t N = 40 * k;
        GSet a(Ambient::interval(0, 2 * N));
        for (std::int64_t i = 0; i < plen; ++i) a.insert(i);
        std::int64_t placed = 0;
        while (placed < K - 2) {
            const std::int64_t x =
                plen + 1 + static_cast<std::int64_t>(src.below(static_cast<std::uint64_t>(N)));
            if (!a.contains(x)) {
                a.insert(x);
                ++placed;
            }
        }
        REQUIRE(a.size() == k);
        const DoublingStats st = doubling_stats(a);
        CHECK(st.sumset_size <= 2 * plen + (K - 2) * plen + (K - 2) * (K - 1) / 2);
        CHECK(st.doubling < Rational(static_cast<long>(K)));
    }
}

TEST_CASE("dilation invariance of |A+A| in prime cyclic groups") {
    SeededSource src(31337, 0);
    for (std::int64_t p : {5, 7, 11, 13, 31}) {
        for (int trial = 0; trial < 20; ++trial) {
            const GSet a = random_subset(Ambient::cyclic(p), src);
            if (a.empty()) continue;
            const std::int64_t base = sumset(a, false).size();
            for (std::int64_t lambda = 1; lambda < p; ++lambda) {
                GSet d(Ambient::cyclic(p));
                for (auto x : a.elements()) d.insert(lambda * x);
                CHECK(sumset(d, false).size() == base);
            }
        }
    }
}

TEST_CASE("rep_histogram examples and invariants") {
    {
        GSet s(Ambient::cyclic(5), {0, 1, 2, 3, 4});
        const RepHistogram h = rep_histogram(s);
        for (std::int64_t t = 1; t <= 5; ++t) CHECK(h.N(t) == 5);
        CHECK(h.N(6) == 0);
    }
    {
        GSet s(Ambient::cyclic(7), {0, 1, 3});
        const RepHistogram h = rep_histogram(s);
        CHECK(h.N(1) == 6);
        CHECK(h.N(2) == 3);
        CHECK(h.N(3) == 0);
    }
    {
        GSet s(Ambient::cyclic(7));
        const RepHistogram h = rep_histogram(s);
        CHECK(h.N(1) == 0);
    }
    CHECK_THROWS_AS(rep_histogram(GSet(Ambient::cyclic(6), {1})), std::domain_error);
    CHECK_THROWS_AS(rep_histogram(GSet(Ambient::interval(0, 5), {1})), std::domain_error);

    // Mass: sum of representation counts is |S|^2; N_t nonincreasing.
    SeededSource src(99, 0);
    for (std::int64_t q : {5, 7, 13, 31}) {
        for (int trial = 0; trial < 30; ++trial) {
            const GSet s = random_subset(Ambient::cyclic(q), src);
            const RepHistogram h = rep_histogram(s);
            std::int64_t mass = 0;
            for (auto r : h.reps) mass += r;
            CHECK(mass == s.size() * s.size());
            for (std::size_t t = 1; t < h.n_t.size(); ++t) CHECK(h.n_t[t] <= h.n_t[t - 1]);
            CHECK(h.reps == oracles::naive_rep_counts(s.elements(), q));
        }
    }
}

TEST_CASE("pollard report") {
    {
        GSet s(Ambient::cyclic(7), {0, 1, 3});
        // t = 2 corresponds to beta with floor(beta*7/2) = 2, e.g. beta = 4/7.
        const PollardReport rep = pollard_report(s, make_rational(4, 7));
        CHECK(rep.t_used == 2);
        CHECK(rep.averaged_lhs == make_rational(9, 2));  // (6 + 3) / 2
        CHECK(rep.averaged_rhs == 4);                    // min(6,7) - 2
        CHECK(rep.inequality_holds);
    }
    {
        const std::int64_t q = 13;
        GSet s(Ambient::cyclic(q));
        for (std::int64_t x = 0; x < q; ++x) s.insert(x);
        const PollardReport rep = pollard_report(s, make_rational(1, 2));
        CHECK(rep.inequality_holds);
        CHECK(rep.conclusion_holds);
    }
    CHECK_THROWS_AS(pollard_report(GSet(Ambient::cyclic(7), {1}), make_rational(3, 2)),
                    std::domain_error);
    CHECK_THROWS_AS(pollard_report(GSet(Ambient::cyclic(7), {1}), make_rational(0, 1)),
                    std::domain_error);
}

TEST_CASE("pollard averaged inequality: exhaustive for q <= 13, sampled to 31") {
    for (std::int64_t q : {2, 3, 5, 7, 11, 13}) {
        const std::uint64_t total = std::uint64_t{1} << q;
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            GSet s(Ambient::cyclic(q));
            for (std::int64_t x = 0; x < q; ++x)
                if ((mask >> x) & 1) s.insert(x);
            const RepHistogram h = rep_histogram(s);
            const std::int64_t k = s.size();
            std::int64_t prefix = 0;
            for (std::int64_t t = 1; t <= q; ++t) {
                prefix += h.N(t);
                REQUIRE(prefix >= t * (std::min(2 * k, q) - t));
            }
        }
    }
    SeededSource src(4242, 0);
    for (std::int64_t q : {17, 19, 23, 29, 31}) {
        for (int trial = 0; trial < 400; ++trial) {
            GSet s(Ambient::cyclic(q));
            for (std::int64_t x = 0; x < q; ++x)
                if (src.coin()) s.insert(x);
            const RepHistogram h = rep_histogram(s);
            const std::int64_t k = s.size();
            std::int64_t prefix = 0;
            for (std::int64_t t = 1; t <= q; ++t) {
                prefix += h.N(t);
                REQUIRE(prefix >= t * (std::min(2 * k, q) - t));
            }
        }
    }
}

TEST_CASE("extremal sumset sizes over intervals, exhaustive k <= 5, N <= 20") {
    // 2k-1 <= |A+A| <= k(k+1)/2, the lower bound exactly on APs.
    const std::int64_t N = 20;
    for (std::int64_t k = 1; k <= 5; ++k) {
        oracles::for_each_subset(N, k, [&](const std::vector<std::int64_t>& idx) {
            GSet a(Ambient::interval(0, N - 1), idx);
            const std::int64_t size = sumset(a, false).size();
            REQUIRE(size >= 2 * k - 1);
            REQUIRE(size <= k * (k + 1) / 2);
            if (size == 2 * k - 1 && k >= 2) {
                // must be an AP
                const std::int64_t d = idx[1] - idx[0];
                for (std::size_t i = 1; i < idx.size(); ++i)
                    REQUIRE(idx[i] - idx[i - 1] == d);
            }
        });
    }
}
