#include "addcomb/dissociation.hpp"

#include <cmath>

#include "addcomb/enumerate.hpp"

namespace addcomb {

namespace {

// Enumerates coefficient vectors of exact weight `w` in the fixed order
// (per coordinate: 0, 1, -1, 2, -2, ...), stopping at the first vanishing
// combination. Returns true if a witness was found.
bool scan_weight(const std::vector<std::int64_t>& xs, std::int64_t w, bool cyclic,
                 std::int64_t mod, std::vector<std::int64_t>& coeff, std::size_t idx,
                 std::int64_t rem, std::int64_t partial) {
    const std::size_t d = xs.size();
    if (idx == d - 1) {
        // Last coordinate must burn the remaining weight exactly.
        for (const std::int64_t lam : {rem, -rem}) {
            coeff[idx] = lam;
            std::int64_t total = partial + lam * xs[idx];
            if (cyclic) total = mod_reduce(total, mod);
            if (total == 0) return true;
            if (rem == 0) break;  // 0 and -0 coincide
        }
        coeff[idx] = 0;
        return false;
    }
    for (std::int64_t mag = 0; mag <= rem; ++mag) {
        for (const std::int64_t lam : {mag, -mag}) {
            coeff[idx] = lam;
            if (scan_weight(xs, w, cyclic, mod, coeff, idx + 1, rem - mag,
                            partial + lam * xs[idx]))
                return true;
            if (mag == 0) break;
        }
    }
    coeff[idx] = 0;
    return false;
}

}  // namespace

DissociationResult is_dissociated(const std::vector<std::int64_t>& xs, std::int64_t M,
                                  const Ambient& ambient, double budget) {
    if (M < 0) throw std::invalid_argument("is_dissociated: M >= 0 required");
    DissociationResult res;
    if (xs.empty() || M == 0) {
        res.dissociated = true;
        return res;
    }
    const std::int64_t d = static_cast<std::int64_t>(xs.size());
    const double projection = std::pow(4.0 * static_cast<double>(d), static_cast<double>(M));
    const BigInt ball = l1_ball_count(d, M);
    if (ball > BigInt(budget))
        throw BudgetError("is_dissociated: l1 ball too large", std::to_string(projection));

    const bool cyclic = ambient.is_cyclic();
    const std::int64_t mod = cyclic ? ambient.modulus() : 0;
    std::vector<std::int64_t> coeff(xs.size(), 0);

    if (xs.size() == 1) {
        for (std::int64_t w = 1; w <= M; ++w) {
            for (const std::int64_t lam : {w, -w}) {
                std::int64_t total = lam * xs[0];
                if (cyclic) total = mod_reduce(total, mod);
                if (total == 0) {
                    res.dissociated = false;
                    res.witness = DissociationWitness{{lam}, w};
                    return res;
                }
            }
        }
        res.dissociated = true;
        return res;
    }

    for (std::int64_t w = 1; w <= M; ++w) {
        if (scan_weight(xs, w, cyclic, mod, coeff, 0, w, 0)) {
            res.dissociated = false;
            res.witness = DissociationWitness{coeff, w};
            return res;
        }
    }
    res.dissociated = true;
    return res;
}

GSet max_dissociated_subset(const GSet& a, std::int64_t M, double budget) {
    GSet out(a.ambient());
    std::vector<std::int64_t> picked;
    for (std::int64_t v : a.elements()) {
        picked.push_back(v);
        if (is_dissociated(picked, M, a.ambient(), budget).dissociated) {
            out.insert(v);
        } else {
            picked.pop_back();
        }
    }
    return out;
}

BigInt l1_ball_count(std::int64_t d, std::int64_t M) {
    if (d < 0 || M < 0) throw std::invalid_argument("l1_ball_count: nonnegative arguments required");
    // Sum over the number j of nonzero coordinates:
    // C(d, j) placements, 2^j signs, C(M, j) positive magnitude patterns.
    BigInt total = 0;
    for (std::int64_t j = 0; j <= std::min(d, M); ++j) {
        BigInt term = binomial(d, j) * binomial(M, j);
        mpz_mul_2exp(term.get_mpz_t(), term.get_mpz_t(), static_cast<unsigned long>(j));
        total += term;
    }
    return total;
}

BigInt l1_ball_count_nonneg(std::int64_t d, std::int64_t M) {
    return binomial(M + d, d);
}

}  // namespace addcomb
