#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "addcomb/core.hpp"

namespace addcomb {

struct Interval {
    std::int64_t lo = 0;
    std::int64_t hi = -1;
    std::int64_t len() const { return hi - lo + 1; }
};

/// A set inside an explicit interval of integers (or of residue
/// representatives); index x - lo into the bit mask.
class IntervalSet {
public:
    IntervalSet(Interval iv, const std::vector<std::int64_t>& elems);
    static IntervalSet from_gset(const GSet& a, Interval iv);

    const Interval& interval() const { return iv_; }
    std::int64_t len() const { return iv_.len(); }
    std::int64_t count() const { return count_; }
    double alpha() const { return static_cast<double>(count_) / static_cast<double>(len()); }
    bool contains(std::int64_t value) const;
    const std::vector<std::uint64_t>& bits() const { return bits_; }
    std::vector<std::int64_t> elements() const;

private:
    explicit IntervalSet(Interval iv);
    Interval iv_;
    std::vector<std::uint64_t> bits_;
    std::int64_t count_ = 0;
};

/// Balanced Fourier transform sum_{x in I} (1_A(x) - alpha) e(x theta),
/// alpha = |A|/|I|, e(t) = exp(2 pi i t). Compensated summation; the
/// accumulated error at theta = 0 stays below 2^-40 |I|.
std::complex<double> balanced_ft(const GSet& a, Interval iv, double theta);
std::complex<double> balanced_ft(const IntervalSet& a, double theta);

enum class RegStatus { Regular, Irregular, Undecided };

struct RegularityVerdict {
    RegStatus status = RegStatus::Undecided;
    double epsilon = 0;
    std::int64_t grid_m = 0;         // granularity used (0: flat shortcut)
    // Irregular: exact grid point where a clause demonstrably fails.
    double witness_theta = 0;
    int failed_clause = 0;           // 1: sup clause, 2: low-frequency clause
    // Undecided: how far inside the uncertified band the worst point sits.
    double margin = 0;
};

struct PairTestOptions {
    std::int64_t full_grid_budget = std::int64_t{1} << 22;
    int probe_count = 256;  // coarse violation probes when over budget
};

/// Certified epsilon-regularity test. Regular means both clauses hold for
/// every theta in R/Z (grid scan at the M-th roots of unity, M =
/// ceil(100 max(|I|,|I'|)/eps), plus a Lipschitz bound on the transform
/// between grid points). Irregular carries an exact grid witness.
/// Undecided is a legitimate outcome when the certified margin straddles
/// the threshold (or the grid exceeds the budget).
RegularityVerdict regular_pair_test(const IntervalSet& a, const IntervalSet& b, double eps,
                                    const PairTestOptions& opt = {});

struct CountingTerms {
    std::int64_t incidences = 0;  // #{(x,x') in A x A' : x + x' in S}
    Rational main_term;           // alpha alpha' sum_{I x I'} 1_S(x+x')
    Rational e1, e2, e3;
};

/// Exact decomposition of the incidence count through 1_A = alpha 1_I + f_A;
/// incidences = main + e1 + e2 + e3 holds as an identity of rationals.
CountingTerms counting_terms(const IntervalSet& a, const IntervalSet& b, const GSet& s);

struct CountingLemmaReport {
    bool vacuous = true;
    std::string reason;           // which precondition failed, if any
    RegularityVerdict verdict;    // pair test at eps^7
    std::int64_t sumset_size = 0;
    double L = 0;
    double threshold = 0;         // (2 - 8 eps) L
    bool holds = false;
};

/// Checks |A + A'| >= (2 - 8 eps) L for an eps^7-certified-regular pair of
/// dense sets. Unmet preconditions yield a vacuous report, no assertion.
CountingLemmaReport counting_lemma_check(const IntervalSet& a, const IntervalSet& b,
                                         double eps, const PairTestOptions& opt = {});

/// Mean squared cell density of the dilate lambda*A over the q-cell
/// interval partition of Z/pZ, as an exact rational.
Rational energy(const GSet& a, std::int64_t lambda, std::int64_t q);

/// Least d in [1, Q] with ||theta d|| <= 1/Q; always exists. Computed both
/// by direct scan and by continued-fraction convergents, cross-checked.
std::int64_t dirichlet_approx(const Rational& theta, std::int64_t Q);
std::int64_t dirichlet_approx(double theta, std::int64_t Q);

struct DecomposeOptions {
    std::optional<std::int64_t> q_min_override;  // default: ceil(1/eps^10)
    std::optional<double> l_floor;               // default: 16/eps
    std::optional<int> max_steps;                // default: ceil(4/eps^6)
    std::int64_t full_grid_budget = std::int64_t{1} << 22;
    int threads = 1;
};

struct DecompositionStep {
    int t = 0;
    std::int64_t lambda = 1;
    std::int64_t q = 0;
    double cell_length = 0;               // p/q
    Rational step_energy;
    double regular_fraction = 0;          // of ordered pairs
    std::int64_t regular_pairs = 0;
    std::int64_t irregular_pairs = 0;
    std::int64_t undecided_pairs = 0;
    // Witness bookkeeping on irregular steps:
    std::optional<double> witness_theta;  // popular grid point
    std::optional<std::int64_t> witness_numerator;
    std::optional<std::int64_t> witness_grid_m;
    std::optional<std::int64_t> popular_cells;   // |Omega|
    std::optional<std::int64_t> dirichlet_d;
    std::int64_t sigma_cap_max = 0;       // max |Sigma_i| observed
    double edge_tolerance = 0;            // allowed energy dip entering this step
    double predicted_increment = 0;       // (|Omega|/q) (eps/2)^2 from the previous step
};

enum class DecomposeOutcome { Success, Saturated, MaxSteps, Stalled };

struct RegularityDecomposition {
    std::int64_t p = 0;
    double eps = 0;
    double alpha = 0;
    DecomposeOutcome outcome = DecomposeOutcome::Stalled;
    std::vector<DecompositionStep> steps;
    // Final-step artifacts (for Success: the certified partition).
    std::vector<Rational> final_cell_density;
    std::vector<std::int8_t> final_verdicts;  // q*q row-major; 0 reg, 1 irreg, 2 und
    bool paper_q_regime = false;  // ran with the q >= 1/eps^10 lower bound
};

/// The energy-increment decomposition loop: test all cell pairs at eps,
/// stop when at least (1 - eps) q^2 are regular; otherwise pick the popular
/// witness frequency across cells, approximate it by a small denominator d
/// (Dirichlet), dilate by d^{-1}, refine q towards p^{3/4} q^{1/4}, repeat.
/// Stops on success, on cells shrinking below l_floor, or on max_steps.
RegularityDecomposition regularity_decompose(const GSet& a, double eps,
                                             const DecomposeOptions& opt = {});

struct PairConclusionCheck {
    std::int64_t satisfied = 0;
    std::int64_t total = 0;
    double fraction = 0;
    bool holds = false;  // satisfied >= (1 - eps) q^2
};

/// Direct check of the structural conclusion on a dilate/partition pair:
/// for at least (1-eps) q^2 ordered pairs, min(|A*_i|, |A*_j|) <= eps p/q
/// or |A*_i + A*_j| >= (2 - eps) p/q.
PairConclusionCheck pair_structure_check(const GSet& a, std::int64_t lambda, std::int64_t q,
                                         double eps);

/// Internal helpers exposed for the self-test battery.
namespace regdetail {
std::vector<std::int64_t> cell_boundaries(std::int64_t p, std::int64_t q);
std::vector<double> grid_magnitudes(const IntervalSet& cell, std::int64_t M);
}  // namespace regdetail

}  // namespace addcomb
