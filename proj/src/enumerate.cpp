#include "addcomb/enumerate.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <thread>

#include "addcomb/sumset.hpp"

namespace addcomb {

BigInt binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) return 0;
    BigInt out;
    mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return out;
}

namespace {

// Incremental DFS state: the partial set's sumset mask is copied per level
// (k is small), so backtracking is a pop.
struct DfsContext {
    const Ambient* amb;
    std::int64_t n = 0;           // ambient size
    std::int64_t k = 0;
    std::int64_t m = 0;
    bool restricted = false;
    bool cyclic = false;
    std::int64_t sum_bits = 0;    // bits in the sumset accumulator

    std::uint64_t nodes = 0;
    std::map<std::int64_t, BigInt> breakdown;
    BigInt count = 0;

    // Optional set emission (list mode).
    std::uint64_t cap = 0;
    bool listing = false;
    bool truncated = false;
    std::vector<GSet>* out_sets = nullptr;

    std::vector<std::int64_t> chosen;
    std::vector<std::vector<std::uint64_t>> set_stack;   // membership mask per depth
    std::vector<std::vector<std::uint64_t>> sum_stack;   // sumset mask per depth
    std::vector<std::int64_t> size_stack;                // |sumset| per depth
};

// Guaranteed growth of the final sumset when `rem` more elements, all larger
// than everything chosen so far, are still to be added (integer ambient).
std::int64_t growth_lower_bound(bool cyclic, bool restricted, std::int64_t rem,
                                std::int64_t chosen_so_far) {
    if (cyclic || rem <= 0) return 0;
    if (!restricted) return 2 * rem - 1;
    if (rem >= 2) return 2 * rem - 3;
    return chosen_so_far >= 1 ? 1 : 0;
}

void dfs(DfsContext& ctx, std::int64_t next_index, std::int64_t depth) {
    ++ctx.nodes;
    const std::int64_t rem = ctx.k - depth;
    if (rem == 0) {
        const std::int64_t final_size = ctx.size_stack[depth];
        if (final_size <= ctx.m) {
            ctx.count += 1;
            ctx.breakdown[final_size] += 1;
            if (ctx.listing) {
                if (static_cast<std::uint64_t>(ctx.out_sets->size()) < ctx.cap) {
                    GSet g(*ctx.amb);
                    g.words() = ctx.set_stack[depth];
                    ctx.out_sets->push_back(std::move(g));
                } else {
                    ctx.truncated = true;
                }
            }
        }
        return;
    }
    if (ctx.truncated) return;

    const std::int64_t bound =
        ctx.size_stack[depth] + growth_lower_bound(ctx.cyclic, ctx.restricted, rem, depth);
    if (bound > ctx.m) return;

    for (std::int64_t e = next_index; e <= ctx.n - rem; ++e) {
        // Push e: new sums are (P << e), plus the diagonal 2e unless restricted.
        auto& set_mask = ctx.set_stack[depth + 1];
        auto& sum_mask = ctx.sum_stack[depth + 1];
        set_mask = ctx.set_stack[depth];
        sum_mask = ctx.sum_stack[depth];
        detail::or_shifted(sum_mask, set_mask, e, ctx.sum_bits);
        set_mask[e >> 6] |= std::uint64_t{1} << (e & 63);
        if (!ctx.restricted) {
            // The accumulator is double width, so the diagonal always fits.
            const std::int64_t diag = ctx.cyclic ? (2 * e) % ctx.n : 2 * e;
            sum_mask[diag >> 6] |= std::uint64_t{1} << (diag & 63);
        }
        if (ctx.cyclic) detail::fold_mod(sum_mask, ctx.n);
        std::int64_t sz = 0;
        for (auto w : sum_mask) sz += std::popcount(w);
        ctx.size_stack[depth + 1] = sz;

        dfs(ctx, e + 1, depth + 1);
        if (ctx.truncated) return;
    }
}

void check_query(const CountQuery& q, const EnumOptions& opt) {
    const std::int64_t n = q.ambient.size();
    if (q.k < 1 || q.k > n) throw std::invalid_argument("count_small_sumset: k out of range");
    if (q.m < 0) throw std::invalid_argument("count_small_sumset: negative m");
    const BigInt projected = binomial(n, q.k);
    if (projected > BigInt(opt.node_ceiling)) {
        throw BudgetError("count_small_sumset: projected node count exceeds ceiling",
                          projected.get_str());
    }
}

DfsContext make_context(const CountQuery& q) {
    DfsContext ctx;
    ctx.amb = &q.ambient;
    ctx.n = q.ambient.size();
    ctx.k = q.k;
    ctx.m = q.m;
    ctx.restricted = q.restricted;
    ctx.cyclic = q.ambient.is_cyclic();
    // Cyclic accumulators need double width for the fold; interval sums of
    // indices reach 2(n-1).
    ctx.sum_bits = ctx.cyclic ? 2 * ctx.n : 2 * ctx.n - 1;
    const std::size_t words = static_cast<std::size_t>((ctx.sum_bits + 63) / 64);
    const std::size_t set_words = static_cast<std::size_t>((ctx.n + 63) / 64);
    ctx.set_stack.assign(ctx.k + 1, std::vector<std::uint64_t>(set_words, 0));
    ctx.sum_stack.assign(ctx.k + 1, std::vector<std::uint64_t>(words, 0));
    ctx.size_stack.assign(ctx.k + 1, 0);
    return ctx;
}

}  // namespace

CountResult count_small_sumset(const CountQuery& query, const EnumOptions& opt) {
    check_query(query, opt);
    const std::int64_t n = query.ambient.size();

    // Subtrees rooted at each least element are independent; merging is
    // associative addition, so totals do not depend on the schedule.
    const int threads = std::max(1, std::min<int>(opt.threads, static_cast<int>(n)));
    std::vector<CountResult> partial(static_cast<std::size_t>(n));
    std::atomic<std::int64_t> next_root{0};

    auto worker = [&]() {
        for (;;) {
            const std::int64_t root = next_root.fetch_add(1);
            if (root > n - query.k) break;
            DfsContext ctx = make_context(query);
            // Seed depth 1 with the root element.
            auto& set_mask = ctx.set_stack[1];
            auto& sum_mask = ctx.sum_stack[1];
            set_mask[root >> 6] |= std::uint64_t{1} << (root & 63);
            if (!query.restricted) {
                const std::int64_t diag = ctx.cyclic ? (2 * root) % ctx.n : 2 * root;
                sum_mask[diag >> 6] |= std::uint64_t{1} << (diag & 63);
            }
            std::int64_t sz = 0;
            for (auto w : sum_mask) sz += std::popcount(w);
            ctx.size_stack[1] = sz;
            dfs(ctx, root + 1, 1);
            CountResult& pr = partial[static_cast<std::size_t>(root)];
            pr.exact_count = std::move(ctx.count);
            pr.per_m_breakdown = std::move(ctx.breakdown);
            pr.nodes_explored = ctx.nodes;
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    CountResult total;
    total.nodes_explored = 1;  // root
    for (auto& pr : partial) {
        total.exact_count += pr.exact_count;
        total.nodes_explored += pr.nodes_explored;
        for (auto& [sz, c] : pr.per_m_breakdown) total.per_m_breakdown[sz] += c;
    }
    return total;
}

ListResult list_small_sumset(const CountQuery& query, std::uint64_t cap,
                             const EnumOptions& opt) {
    check_query(query, opt);
    ListResult out;
    DfsContext ctx = make_context(query);
    ctx.listing = true;
    ctx.cap = cap;
    ctx.out_sets = &out.sets;
    dfs(ctx, 0, 0);
    out.truncated = ctx.truncated;
    out.nodes_explored = ctx.nodes;
    return out;
}

BoundResult theorem1_bound(std::int64_t N, double K, std::int64_t k, double delta) {
    if (K <= 0 || delta <= 0 || k < 1 || N < 1)
        throw std::invalid_argument("theorem1_bound: require K > 0, delta > 0, k >= 1, N >= 1");
    BoundResult res;

    const auto top = static_cast<std::int64_t>(std::floor(K * static_cast<double>(k) / 2.0));
    const BigInt binom = binomial(top, k);
    if (binom == 0) {
        res.value = 0;
        res.zero_warning = true;
        return res;
    }

    // ceil(2^{delta k}) computed at 256-bit float precision, then exact.
    mpf_class pow2(0, 256);
    {
        // 2^x = exp2: split into integer and fractional parts.
        const double dx = delta * static_cast<double>(k);
        const auto ipart = static_cast<long>(std::floor(dx));
        const double fpart = dx - static_cast<double>(ipart);
        mpf_class frac(std::exp2(fpart), 256);
        mpf_class base(1, 256);
        mpf_mul_2exp(base.get_mpf_t(), base.get_mpf_t(), static_cast<unsigned long>(ipart));
        pow2 = base * frac;
    }
    BigInt lead;
    mpz_set_f(lead.get_mpz_t(), pow2.get_mpf_t());
    if (mpf_class(lead) < pow2) lead += 1;  // ceiling

    BigInt npow;
    const auto expo = static_cast<unsigned long>(std::floor(K + delta));
    mpz_ui_pow_ui(npow.get_mpz_t(), static_cast<unsigned long>(N), expo);

    res.value = lead * binom * npow;
    return res;
}

GSet affine_canonical(const GSet& a) {
    const Ambient& amb = a.ambient();
    if (!amb.is_cyclic()) throw std::invalid_argument("affine_canonical: cyclic ambient required");
    const std::int64_t n = amb.modulus();
    if (!is_prime(n)) throw std::invalid_argument("affine_canonical: modulus must be prime");
    if (a.empty()) throw std::invalid_argument("affine_canonical: empty set");

    const auto elems = a.elements();
    GSet best = a;
    GSet image(amb);
    for (std::int64_t lambda = 1; lambda < n; ++lambda) {
        for (std::int64_t mu = 0; mu < n; ++mu) {
            std::fill(image.words().begin(), image.words().end(), 0);
            for (std::int64_t x : elems) image.insert((lambda * x + mu) % n);
            if (GSet::lex_less(image, best)) best = image;
        }
    }
    return best;
}

}  // namespace addcomb
