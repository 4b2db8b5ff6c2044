#include "addcomb/sumset.hpp"

#include <algorithm>
#include <bit>

namespace addcomb {

namespace detail {

void or_shifted(std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src,
                std::int64_t shift, std::int64_t dst_bits) {
    const std::int64_t word_shift = shift >> 6;
    const int bit_shift = static_cast<int>(shift & 63);
    const std::int64_t dst_words = static_cast<std::int64_t>(dst.size());
    for (std::int64_t i = static_cast<std::int64_t>(src.size()) - 1; i >= 0; --i) {
        const std::uint64_t w = src[i];
        if (!w) continue;
        const std::int64_t lo_word = i + word_shift;
        if (lo_word < dst_words) dst[lo_word] |= w << bit_shift;
        if (bit_shift && lo_word + 1 < dst_words) dst[lo_word + 1] |= w >> (64 - bit_shift);
    }
    // Clear anything past dst_bits so callers can rely on a clean tail.
    const std::int64_t last = (dst_bits + 63) / 64;
    for (std::int64_t i = last; i < dst_words; ++i) dst[i] = 0;
    if (dst_bits & 63) dst[last - 1] &= (std::uint64_t{1} << (dst_bits & 63)) - 1;
}

void fold_mod(std::vector<std::uint64_t>& acc, std::int64_t n) {
    // acc holds 2n bits; OR bit n+j into bit j, then truncate.
    const std::int64_t total_words = static_cast<std::int64_t>(acc.size());
    const std::int64_t word_shift = n >> 6;
    const int bit_shift = static_cast<int>(n & 63);
    for (std::int64_t j = word_shift; j < total_words; ++j) {
        std::uint64_t w = acc[j] >> bit_shift;
        if (bit_shift && j + 1 < total_words) w |= acc[j + 1] << (64 - bit_shift);
        if (w) acc[j - word_shift] |= w;
    }
    const std::int64_t keep_words = (n + 63) / 64;
    for (std::int64_t i = keep_words; i < total_words; ++i) acc[i] = 0;
    if (n & 63) acc[keep_words - 1] &= (std::uint64_t{1} << (n & 63)) - 1;
}

}  // namespace detail

GSet sumset(const GSet& a, bool restricted) {
    const Ambient& amb = a.ambient();
    const auto elems = a.elements();
    if (elems.empty()) {
        // Empty input: empty result in the natural result ambient.
        if (amb.is_cyclic()) return GSet(amb);
        return GSet(Ambient::interval(2 * amb.lo(), 2 * amb.hi()));
    }

    if (amb.is_cyclic()) {
        const std::int64_t n = amb.modulus();
        std::vector<std::uint64_t> acc(((2 * n) + 63) / 64, 0);
        std::vector<std::uint64_t> tmp;
        for (std::int64_t v : elems) {
            const std::int64_t idx = amb.index_of(v);
            if (restricted) {
                tmp = a.words();
                tmp[idx >> 6] &= ~(std::uint64_t{1} << (idx & 63));
                detail::or_shifted(acc, tmp, idx, 2 * n);
            } else {
                detail::or_shifted(acc, a.words(), idx, 2 * n);
            }
        }
        detail::fold_mod(acc, n);
        GSet out(amb);
        out.words() = std::move(acc);
        return out;
    }

    const std::int64_t lo = amb.lo(), hi = amb.hi();
    const std::int64_t out_bits = 2 * hi - 2 * lo + 1;
    GSet out(Ambient::interval(2 * lo, 2 * hi));
    std::vector<std::uint64_t> acc((out_bits + 63) / 64, 0);
    std::vector<std::uint64_t> tmp;
    for (std::int64_t v : elems) {
        const std::int64_t idx = v - lo;
        if (restricted) {
            tmp = a.words();
            tmp[idx >> 6] &= ~(std::uint64_t{1} << (idx & 63));
            detail::or_shifted(acc, tmp, idx, out_bits);
        } else {
            detail::or_shifted(acc, a.words(), idx, out_bits);
        }
    }
    out.words() = std::move(acc);
    return out;
}

GSet sumset_pair(const GSet& a, const GSet& b) {
    if (a.ambient().kind() != b.ambient().kind())
        throw std::invalid_argument("sumset_pair: ambient kind mismatch");
    if (a.ambient().is_cyclic()) {
        if (a.ambient().modulus() != b.ambient().modulus())
            throw std::invalid_argument("sumset_pair: modulus mismatch");
        const std::int64_t n = a.ambient().modulus();
        std::vector<std::uint64_t> acc(((2 * n) + 63) / 64, 0);
        for (std::int64_t v : a.elements())
            detail::or_shifted(acc, b.words(), a.ambient().index_of(v), 2 * n);
        detail::fold_mod(acc, n);
        GSet out(a.ambient());
        out.words() = std::move(acc);
        return out;
    }
    const std::int64_t lo = a.ambient().lo() + b.ambient().lo();
    const std::int64_t hi = a.ambient().hi() + b.ambient().hi();
    const std::int64_t out_bits = hi - lo + 1;
    GSet out(Ambient::interval(lo, hi));
    std::vector<std::uint64_t> acc((out_bits + 63) / 64, 0);
    for (std::int64_t v : a.elements())
        detail::or_shifted(acc, b.words(), v - a.ambient().lo(), out_bits);
    out.words() = std::move(acc);
    return out;
}

DoublingStats doubling_stats(const GSet& a) {
    const std::int64_t k = a.size();
    if (k < 1) throw std::invalid_argument("doubling_stats: empty set");
    DoublingStats st;
    st.k = k;
    st.sumset_size = sumset(a, /*restricted=*/false).size();
    st.restricted_size = sumset(a, /*restricted=*/true).size();
    st.doubling = make_rational(BigInt(static_cast<long>(st.sumset_size)),
                                BigInt(static_cast<long>(k)));
    return st;
}

RepHistogram rep_histogram(const GSet& s) {
    const Ambient& amb = s.ambient();
    if (!amb.is_cyclic()) throw std::domain_error("rep_histogram: cyclic ambient required");
    const std::int64_t q = amb.modulus();
    if (!is_prime(q)) throw std::domain_error("rep_histogram: modulus must be prime");

    RepHistogram h;
    h.q = q;
    h.reps.assign(q, 0);
    const auto elems = s.elements();
    for (std::int64_t i : elems)
        for (std::int64_t j : elems) ++h.reps[(i + j) % q];

    std::int64_t max_rep = 0;
    for (auto r : h.reps) max_rep = std::max(max_rep, r);
    // N_t by suffix-summing the histogram of representation counts.
    std::vector<std::int64_t> freq(max_rep + 1, 0);
    for (auto r : h.reps) ++freq[r];
    h.n_t.assign(max_rep, 0);
    std::int64_t running = 0;
    for (std::int64_t t = max_rep; t >= 1; --t) {
        running += freq[t];
        h.n_t[t - 1] = running;
    }
    return h;
}

PollardReport pollard_report(const GSet& s, const Rational& beta) {
    if (beta <= 0 || beta > 1) throw std::domain_error("pollard_report: beta must be in (0, 1]");
    RepHistogram h = rep_histogram(s);
    const std::int64_t q = h.q;
    const std::int64_t k = s.size();

    PollardReport rep;
    rep.q = q;
    rep.set_size = k;
    rep.beta = beta;
    rep.q_large_enough = (Rational(q) * beta * beta > 16);

    const Rational bq2 = beta * Rational(q) / 2;
    BigInt t_floor;
    mpz_fdiv_q(t_floor.get_mpz_t(), bq2.get_num().get_mpz_t(), bq2.get_den().get_mpz_t());
    rep.t_used = std::max<std::int64_t>(1, t_floor.get_si());

    BigInt prefix = 0;
    for (std::int64_t t = 1; t <= rep.t_used; ++t) prefix += h.N(t);
    rep.averaged_lhs = make_rational(prefix, BigInt(static_cast<long>(rep.t_used)));
    rep.averaged_rhs = std::min(2 * k, q) - rep.t_used;
    rep.inequality_holds = rep.averaged_lhs >= rep.averaged_rhs;

    // ceil(beta^2 q / 8)
    const Rational b2q8 = beta * beta * Rational(q) / 8;
    BigInt thr_ceil;
    mpz_cdiv_q(thr_ceil.get_mpz_t(), b2q8.get_num().get_mpz_t(), b2q8.get_den().get_mpz_t());
    rep.threshold = thr_ceil.get_si();

    // floor(beta/2 * floor(beta*q/2))
    const Rational nested = beta * Rational(static_cast<long>(t_floor.get_si())) / 2;
    BigInt thr_nested;
    mpz_fdiv_q(thr_nested.get_mpz_t(), nested.get_num().get_mpz_t(), nested.get_den().get_mpz_t());
    rep.threshold_nested = thr_nested.get_si();

    auto count_at = [&](std::int64_t thr) -> std::int64_t {
        if (thr <= 0) return q;  // every residue has >= 0 representations
        return h.N(thr);
    };
    rep.popular_count = count_at(rep.threshold);
    rep.popular_count_nested = count_at(rep.threshold_nested);

    // Conclusion at the nested-floor threshold: count >= min(2|S|, q) - beta*q.
    const Rational rhs = Rational(std::min(2 * k, q)) - beta * Rational(q);
    rep.conclusion_holds = Rational(static_cast<long>(rep.popular_count_nested)) >= rhs;
    return rep;
}

}  // namespace addcomb
