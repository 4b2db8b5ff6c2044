#include "addcomb/missing.hpp"

#include <bit>
#include <cmath>
#include <thread>

#include "addcomb/sumset.hpp"

namespace addcomb {

std::int64_t missing_count(const GSet& x) {
    const Ambient& amb = x.ambient();
    if (amb.is_cyclic() || amb.lo() != 1)
        throw std::invalid_argument("missing_count: X must live in an interval [1, horizon]");
    const std::int64_t horizon = amb.hi();
    if (horizon < 2) throw std::invalid_argument("missing_count: horizon >= 2 required");
    const GSet ss = sumset(x, /*restricted=*/false);
    std::int64_t present = 0;
    for (std::int64_t v = 1; v <= horizon; ++v)
        if (ss.contains(v)) ++present;
    return horizon - present;
}

namespace {

// Specialized sampler: X subset of [1, horizon] as a word mask (bit v-1 for
// value v); the truncated sumset mask is built by shift-or.
std::int64_t sampled_missing(SeededSource& src, std::int64_t horizon,
                             std::vector<std::uint64_t>& xbuf,
                             std::vector<std::uint64_t>& sbuf) {
    const std::size_t words = xbuf.size();
    for (std::size_t i = 0; i < words; ++i) xbuf[i] = src.next_u64();
    if (horizon & 63) xbuf[words - 1] &= (std::uint64_t{1} << (horizon & 63)) - 1;

    for (auto& w : sbuf) w = 0;
    for (std::size_t wi = 0; wi < words; ++wi) {
        std::uint64_t w = xbuf[wi];
        while (w) {
            const int b = std::countr_zero(w);
            w &= w - 1;
            const std::int64_t value = static_cast<std::int64_t>(wi * 64 + b) + 1;
            // Sum v + u occupies bit (v + u - 1) = (value bit index) + u.
            detail::or_shifted(sbuf, xbuf, value, horizon);
        }
    }
    std::int64_t present = 0;
    for (std::size_t i = 0; i < words; ++i) present += std::popcount(sbuf[i]);
    return horizon - present;
}

}  // namespace

MissingDistribution missing_distribution(std::int64_t s_max, std::uint64_t samples,
                                         std::uint64_t seed, int threads) {
    if (s_max < 1) throw std::invalid_argument("missing_distribution: s_max >= 1 required");
    const std::int64_t horizon = 10 * s_max;

    MissingDistribution dist;
    dist.horizon = horizon;
    dist.s_max = s_max;
    dist.samples = samples;
    dist.histogram.assign(static_cast<std::size_t>(horizon) + 1, 0);

    const int nthreads = std::max(1, threads);
    constexpr std::uint64_t kBlock = 1 << 14;
    const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
    std::vector<std::vector<std::uint64_t>> partial(
        static_cast<std::size_t>(nthreads),
        std::vector<std::uint64_t>(static_cast<std::size_t>(horizon) + 1, 0));

    auto worker = [&](int tid) {
        const std::size_t words = static_cast<std::size_t>((horizon + 63) / 64);
        std::vector<std::uint64_t> xbuf(words), sbuf(words);
        auto& hist = partial[static_cast<std::size_t>(tid)];
        for (std::uint64_t blk = static_cast<std::uint64_t>(tid); blk < blocks;
             blk += static_cast<std::uint64_t>(nthreads)) {
            SeededSource src(seed, blk);
            const std::uint64_t begin = blk * kBlock;
            const std::uint64_t end = std::min<std::uint64_t>(samples, begin + kBlock);
            for (std::uint64_t i = begin; i < end; ++i)
                ++hist[static_cast<std::size_t>(sampled_missing(src, horizon, xbuf, sbuf))];
        }
    };
    if (nthreads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    for (const auto& hist : partial)
        for (std::size_t s = 0; s < hist.size(); ++s) dist.histogram[s] += hist[s];

    for (std::size_t s = 0; s < dist.histogram.size(); ++s) {
        if (dist.histogram[s] == 0) continue;
        MissingBucket b;
        b.s = static_cast<std::int64_t>(s);
        b.count = dist.histogram[s];
        b.a_hat = static_cast<double>(b.count) / static_cast<double>(samples);
        const double sigma =
            std::sqrt(b.a_hat * (1.0 - b.a_hat) / static_cast<double>(samples));
        b.ci_lo = std::max(0.0, b.a_hat - 3 * sigma);
        b.ci_hi = std::min(1.0, b.a_hat + 3 * sigma);
        b.exponent_fit = s > 0 ? -(2.0 / static_cast<double>(s)) * std::log2(b.a_hat) : 0.0;
        dist.buckets.push_back(b);
    }
    return dist;
}

std::vector<Rational> exact_missing_distribution(std::int64_t horizon) {
    if (horizon < 2 || horizon > 24)
        throw std::invalid_argument("exact_missing_distribution: horizon in [2, 24] required");
    std::vector<BigInt> counts(static_cast<std::size_t>(horizon) + 1, 0);
    const std::uint64_t total = std::uint64_t{1} << horizon;
    const std::uint64_t full = (std::uint64_t{1} << horizon) - 1;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        // bit i of mask = membership of value i+1
        std::uint64_t ss = 0;
        std::uint64_t m = mask;
        while (m) {
            const int b = std::countr_zero(m);
            m &= m - 1;
            // value (b+1): sums (b+1) + (j+1) at bit (b+j+1)
            ss |= (mask << (b + 1));
        }
        ss &= full;
        const int s = static_cast<int>(horizon) - std::popcount(ss);
        counts[static_cast<std::size_t>(s)] += 1;
    }
    std::vector<Rational> probs;
    probs.reserve(counts.size());
    BigInt denom = 1;
    mpz_mul_2exp(denom.get_mpz_t(), denom.get_mpz_t(), static_cast<unsigned long>(horizon));
    for (const auto& c : counts) probs.push_back(make_rational(c, denom));
    return probs;
}

}  // namespace addcomb
