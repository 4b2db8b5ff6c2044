#pragma once

#include <cstdint>
#include <vector>

#include "addcomb/core.hpp"

namespace addcomb {

/// Exact doubling statistics of a set: |A+A|, |A +^ A| and the rational
/// doubling constant |A+A|/|A|. Both sumset sizes are reported so the
/// restricted/plain ratio can be tracked empirically.
struct DoublingStats {
    std::int64_t k = 0;
    std::int64_t sumset_size = 0;
    std::int64_t restricted_size = 0;
    Rational doubling;
};

/// Pollard's representation counts for S in Z/qZ: counts.at(t-1) is N_t,
/// the number of residues with at least t ordered representations i + j,
/// (i, j) in S x S.
struct RepHistogram {
    std::int64_t q = 0;
    std::vector<std::int64_t> reps;  // reps[x] for x in [0, q)
    std::vector<std::int64_t> n_t;   // n_t[t-1] = N_t, t = 1..max reps

    std::int64_t N(std::int64_t t) const {
        if (t < 1) throw std::invalid_argument("RepHistogram::N: t >= 1 required");
        return t <= static_cast<std::int64_t>(n_t.size()) ? n_t[t - 1] : 0;
    }
};

struct PollardReport {
    std::int64_t q = 0;
    std::int64_t set_size = 0;
    Rational beta;
    bool q_large_enough = false;  // q > 16 / beta^2

    // Averaged form at t = floor(beta*q/2): (N_1+...+N_t)/t >= min(2|S|,q) - t.
    std::int64_t t_used = 0;
    Rational averaged_lhs;
    std::int64_t averaged_rhs = 0;
    bool inequality_holds = false;

    // Two readings of the popularity threshold: the displayed ceil(beta^2 q/8)
    // and the nested-floor m from the proof. The conclusion is checked at the
    // weaker (nested-floor) threshold.
    std::int64_t threshold = 0;         // ceil(beta^2 q / 8)
    std::int64_t threshold_nested = 0;  // floor(beta/2 * floor(beta*q/2))
    std::int64_t popular_count = 0;         // elements with >= threshold reps
    std::int64_t popular_count_nested = 0;  // elements with >= threshold_nested reps
    bool conclusion_holds = false;  // popular_count_nested >= min(2|S|,q) - beta*q
};

/// Plain or restricted sumset. Interval results live on [2*lo, 2*hi];
/// cyclic results stay in Z/NZ. Computed by word-parallel shift-or.
GSet sumset(const GSet& a, bool restricted);

/// Sumset of two sets over the same kind of ambient (A + B).
GSet sumset_pair(const GSet& a, const GSet& b);

DoublingStats doubling_stats(const GSet& a);

/// Requires a cyclic prime ambient.
RepHistogram rep_histogram(const GSet& s);

/// beta in (0, 1]. Evaluates both the averaged Pollard inequality and the
/// popular-element conclusion on this instance.
PollardReport pollard_report(const GSet& s, const Rational& beta);

namespace detail {
/// dst |= src << shift, bit-level, within dst's capacity.
void or_shifted(std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src,
                std::int64_t shift, std::int64_t dst_bits);
/// Folds bits [n, 2n) of a double-width accumulator onto [0, n).
void fold_mod(std::vector<std::uint64_t>& acc, std::int64_t n);
}  // namespace detail

}  // namespace addcomb
