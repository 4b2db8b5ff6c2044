#include "addcomb/regularity.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include <fftw3.h>

#include "addcomb/sumset.hpp"

namespace addcomb {

IntervalSet::IntervalSet(Interval iv)
    : iv_(iv), bits_(static_cast<std::size_t>((iv.len() + 63) / 64), 0) {
    if (iv.len() < 1) throw std::invalid_argument("IntervalSet: empty interval");
}

IntervalSet::IntervalSet(Interval iv, const std::vector<std::int64_t>& elems) : IntervalSet(iv) {
    for (std::int64_t v : elems) {
        if (v < iv.lo || v > iv.hi)
            throw std::invalid_argument("IntervalSet: element outside interval");
        const std::int64_t i = v - iv.lo;
        const std::uint64_t bit = std::uint64_t{1} << (i & 63);
        if (!(bits_[i >> 6] & bit)) {
            bits_[i >> 6] |= bit;
            ++count_;
        }
    }
}

IntervalSet IntervalSet::from_gset(const GSet& a, Interval iv) {
    return IntervalSet(iv, a.elements());
}

bool IntervalSet::contains(std::int64_t value) const {
    if (value < iv_.lo || value > iv_.hi) return false;
    const std::int64_t i = value - iv_.lo;
    return (bits_[i >> 6] >> (i & 63)) & 1;
}

std::vector<std::int64_t> IntervalSet::elements() const {
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(count_));
    for (std::size_t wi = 0; wi < bits_.size(); ++wi) {
        std::uint64_t w = bits_[wi];
        while (w) {
            out.push_back(iv_.lo + static_cast<std::int64_t>(wi * 64 + std::countr_zero(w)));
            w &= w - 1;
        }
    }
    return out;
}

std::complex<double> balanced_ft(const IntervalSet& a, double theta) {
    constexpr long double kTau = 6.283185307179586476925286766559L;
    const double alpha = a.alpha();
    // Kahan-compensated accumulation of both components.
    double re = 0, im = 0, cre = 0, cim = 0;
    for (std::int64_t x = a.interval().lo; x <= a.interval().hi; ++x) {
        const double f = (a.contains(x) ? 1.0 : 0.0) - alpha;
        const long double arg = kTau * std::fmod(static_cast<long double>(x) * theta, 1.0L);
        const double tr = f * static_cast<double>(std::cos(arg));
        const double ti = f * static_cast<double>(std::sin(arg));
        double y = tr - cre;
        double t = re + y;
        cre = (t - re) - y;
        re = t;
        y = ti - cim;
        t = im + y;
        cim = (t - im) - y;
        im = t;
    }
    return {re, im};
}

std::complex<double> balanced_ft(const GSet& a, Interval iv, double theta) {
    for (std::int64_t v : a.elements())
        if (v < iv.lo || v > iv.hi)
            throw std::invalid_argument("balanced_ft: A not contained in I");
    return balanced_ft(IntervalSet::from_gset(a, iv), theta);
}

namespace regdetail {

std::vector<std::int64_t> cell_boundaries(std::int64_t p, std::int64_t q) {
    // Cell i covers residues x with x*q/p in [i, i+1); for prime p only x=0
    // sits on a boundary, and it belongs to cell 0 (the least admissible
    // index). boundaries[i] is the first residue of cell i; a sentinel p
    // closes the last cell.
    std::vector<std::int64_t> bounds(static_cast<std::size_t>(q) + 1, 0);
    for (std::int64_t i = 1; i <= q; ++i) {
        // ceil(i*p/q)
        bounds[static_cast<std::size_t>(i)] = (i * p + q - 1) / q;
    }
    return bounds;
}

namespace {

std::mutex g_fftw_mutex;
std::map<std::int64_t, fftw_plan> g_plans;

struct FftBuffers {
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    std::int64_t m = 0;
    ~FftBuffers() {
        if (in) fftw_free(in);
        if (out) fftw_free(out);
    }
    void ensure(std::int64_t M) {
        if (m == M) return;
        if (in) fftw_free(in);
        if (out) fftw_free(out);
        in = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * M));
        out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * M));
        m = M;
    }
};

fftw_plan plan_for(std::int64_t M, fftw_complex* in, fftw_complex* out) {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    auto it = g_plans.find(M);
    if (it != g_plans.end()) return it->second;
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(M), in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
    g_plans.emplace(M, plan);
    return plan;
}

}  // namespace

std::vector<double> grid_magnitudes(const IntervalSet& cell, std::int64_t M) {
    // |f_hat(r/M)| for r in [0, M): the transform of the recentred balanced
    // indicator (a phase shift, so magnitudes are unchanged), zero-padded.
    static thread_local FftBuffers buf;
    buf.ensure(M);
    const double alpha = cell.alpha();
    const std::int64_t len = cell.len();
    for (std::int64_t j = 0; j < M; ++j) {
        buf.in[j][0] = 0;
        buf.in[j][1] = 0;
    }
    for (std::int64_t j = 0; j < len; ++j)
        buf.in[j][0] = (cell.contains(cell.interval().lo + j) ? 1.0 : 0.0) - alpha;
    fftw_plan plan = plan_for(M, buf.in, buf.out);
    fftw_execute_dft(plan, buf.in, buf.out);
    std::vector<double> mags(static_cast<std::size_t>(M));
    for (std::int64_t r = 0; r < M; ++r)
        mags[static_cast<std::size_t>(r)] = std::hypot(buf.out[r][0], buf.out[r][1]);
    return mags;
}

}  // namespace regdetail

namespace {

constexpr std::int64_t kNoIndex = std::numeric_limits<std::int64_t>::max();

std::int64_t grid_granularity(double eps, std::int64_t max_len) {
    return static_cast<std::int64_t>(std::ceil(100.0 * static_cast<double>(max_len) / eps));
}

// Per-cell certification data on one grid.
struct CellAnalysis {
    const IntervalSet* cell = nullptr;
    double eps = 0;
    std::int64_t M = 0;          // 0 when the flat shortcut applies
    bool flat = false;           // l1 bound certifies both clauses outright
    double l1 = 0;
    double slack = 0;            // Lipschitz + numerical allowance at grid spacing
    double guard = 0;
    std::vector<std::uint64_t> big;   // not certified small at grid point
    std::vector<std::uint64_t> viol;  // definitely above threshold
    std::int64_t first_big_low = kNoIndex;
    std::int64_t first_viol_low = kNoIndex;
    bool has_viol = false;
    double worst_margin = 0;     // max(mag + slack - eps*len) over uncertified points
};

double l1_norm(const IntervalSet& s) {
    const double len = static_cast<double>(s.len());
    const double cnt = static_cast<double>(s.count());
    return 2.0 * cnt * (len - cnt) / len;
}

CellAnalysis analyze_cell(const IntervalSet& cell, double eps, std::int64_t M,
                          std::int64_t window_scan_limit) {
    CellAnalysis a;
    a.cell = &cell;
    a.eps = eps;
    const double len = static_cast<double>(cell.len());
    const double threshold = eps * len;
    a.l1 = l1_norm(cell);
    a.guard = 1e-9 * len;
    if (a.l1 + a.guard <= threshold) {
        a.flat = true;
        return a;
    }

    a.M = M;
    // |d/dtheta f_hat| <= 2*pi*l1*len after recentring; grid spacing 1/M.
    a.slack = M_PI * a.l1 * len / static_cast<double>(M) + a.guard;
    const auto mags = regdetail::grid_magnitudes(cell, M);
    const std::size_t words = static_cast<std::size_t>((M + 63) / 64);
    a.big.assign(words, 0);
    a.viol.assign(words, 0);
    for (std::int64_t g = 0; g < M; ++g) {
        const double mag = mags[static_cast<std::size_t>(g)];
        if (mag + a.slack > threshold) {
            a.big[g >> 6] |= std::uint64_t{1} << (g & 63);
            a.worst_margin = std::max(a.worst_margin, mag + a.slack - threshold);
        }
        if (mag - a.guard > threshold) {
            a.viol[g >> 6] |= std::uint64_t{1} << (g & 63);
            a.has_viol = true;
        }
    }
    const std::int64_t scan_to = std::min(window_scan_limit, M / 2 + 1);
    for (std::int64_t g = 0; g <= scan_to; ++g) {
        const bool b = (a.big[g >> 6] >> (g & 63)) & 1;
        const bool v = (a.viol[g >> 6] >> (g & 63)) & 1;
        if (b && a.first_big_low == kNoIndex) a.first_big_low = g;
        if (v && a.first_viol_low == kNoIndex) {
            a.first_viol_low = g;
            break;
        }
    }
    return a;
}

bool masks_intersect(const std::vector<std::uint64_t>& x, const std::vector<std::uint64_t>& y,
                     std::int64_t* where) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::uint64_t w = x[i] & y[i];
        if (w) {
            if (where) *where = static_cast<std::int64_t>(i * 64 + std::countr_zero(w));
            return true;
        }
    }
    return false;
}

RegularityVerdict pair_verdict(const CellAnalysis& a, const CellAnalysis& b, double eps) {
    RegularityVerdict v;
    v.epsilon = eps;
    v.grid_m = std::max(a.M, b.M);

    const double maxlen = static_cast<double>(std::max(a.cell->len(), b.cell->len()));
    // Low-frequency window ||theta|| <= 1/(eps * max len).
    const double theta0 = 1.0 / (eps * maxlen);

    // Clause 1 (sup): for every theta, one of the two transforms is small.
    bool clause1_cert = true;
    bool clause1_viol = false;
    std::int64_t viol_at = 0;
    if (!a.flat && !b.flat) {
        std::int64_t where = 0;
        if (masks_intersect(a.big, b.big, &where)) clause1_cert = false;
        if (masks_intersect(a.viol, b.viol, &where)) {
            clause1_viol = true;
            viol_at = where;
        }
    }

    // Clause 2 (low frequency): both transforms small on the window.
    bool clause2_cert = true;
    bool clause2_viol = false;
    std::int64_t viol2_at = 0;
    for (const CellAnalysis* c : {&a, &b}) {
        if (c->flat) continue;
        const double m = static_cast<double>(c->M);
        const std::int64_t w_strict =
            std::min<std::int64_t>(static_cast<std::int64_t>(theta0 * m), c->M / 2);
        const std::int64_t w_cert =
            std::min<std::int64_t>(static_cast<std::int64_t>(theta0 * m + 0.5), c->M / 2);
        if (c->first_big_low != kNoIndex && c->first_big_low <= w_cert) clause2_cert = false;
        if (c->first_viol_low != kNoIndex && c->first_viol_low <= w_strict) {
            clause2_viol = true;
            viol2_at = c->first_viol_low;
            v.grid_m = c->M;
        }
    }

    if (clause2_viol) {
        v.status = RegStatus::Irregular;
        v.failed_clause = 2;
        v.witness_theta = static_cast<double>(viol2_at) / static_cast<double>(v.grid_m);
        return v;
    }
    if (clause1_viol) {
        v.status = RegStatus::Irregular;
        v.failed_clause = 1;
        v.witness_theta = static_cast<double>(viol_at) / static_cast<double>(v.grid_m);
        return v;
    }
    if (clause1_cert && clause2_cert) {
        v.status = RegStatus::Regular;
        return v;
    }
    v.status = RegStatus::Undecided;
    v.margin = std::max(a.worst_margin, b.worst_margin);
    return v;
}

std::int64_t window_scan_limit(double eps) {
    return static_cast<std::int64_t>(std::ceil(100.0 / (eps * eps))) + 3;
}

}  // namespace

RegularityVerdict regular_pair_test(const IntervalSet& a, const IntervalSet& b, double eps,
                                    const PairTestOptions& opt) {
    if (eps <= 0) throw std::invalid_argument("regular_pair_test: eps > 0 required");
    if (a.len() < 2 || b.len() < 2)
        throw std::invalid_argument("regular_pair_test: intervals of length >= 2 required");

    const std::int64_t M = grid_granularity(eps, std::max(a.len(), b.len()));

    // Flat shortcut first: if the l1 mass already certifies a side, no grid
    // is needed for it.
    const double l1a = l1_norm(a), l1b = l1_norm(b);
    const bool flat_a = l1a + 1e-9 * static_cast<double>(a.len()) <= eps * static_cast<double>(a.len());
    const bool flat_b = l1b + 1e-9 * static_cast<double>(b.len()) <= eps * static_cast<double>(b.len());
    if (flat_a && flat_b) {
        RegularityVerdict v;
        v.status = RegStatus::Regular;
        v.epsilon = eps;
        v.grid_m = 0;
        return v;
    }

    if (M > opt.full_grid_budget) {
        // Too fine to certify; probe a spread of exact grid points for an
        // outright violation of the sup clause.
        RegularityVerdict v;
        v.epsilon = eps;
        v.grid_m = M;
        for (int t = 0; t < opt.probe_count; ++t) {
            const std::int64_t g =
                static_cast<std::int64_t>((static_cast<double>(t) + 0.5) *
                                          static_cast<double>(M) / opt.probe_count);
            const double theta = static_cast<double>(g) / static_cast<double>(M);
            const double ma = std::abs(balanced_ft(a, theta));
            const double mb = std::abs(balanced_ft(b, theta));
            const double ga = 1e-7 * static_cast<double>(a.len());
            const double gb = 1e-7 * static_cast<double>(b.len());
            if (ma - ga > eps * static_cast<double>(a.len()) &&
                mb - gb > eps * static_cast<double>(b.len())) {
                v.status = RegStatus::Irregular;
                v.failed_clause = 1;
                v.witness_theta = theta;
                return v;
            }
        }
        v.status = RegStatus::Undecided;
        v.margin = std::numeric_limits<double>::infinity();  // grid over budget
        return v;
    }

    const std::int64_t scan = window_scan_limit(eps);
    CellAnalysis ca = analyze_cell(a, eps, M, scan);
    CellAnalysis cb = analyze_cell(b, eps, M, scan);
    return pair_verdict(ca, cb, eps);
}

CountingTerms counting_terms(const IntervalSet& a, const IntervalSet& b, const GSet& s) {
    CountingTerms out;
    std::int64_t t_count = 0, u_count = 0, v_count = 0, w_count = 0;
    for (std::int64_t x = a.interval().lo; x <= a.interval().hi; ++x) {
        const bool in_a = a.contains(x);
        for (std::int64_t y = b.interval().lo; y <= b.interval().hi; ++y) {
            if (!s.contains(x + y)) continue;
            const bool in_b = b.contains(y);
            ++t_count;
            if (in_a) ++u_count;
            if (in_b) ++v_count;
            if (in_a && in_b) ++w_count;
        }
    }
    const Rational alpha = make_rational(a.count(), a.len());
    const Rational alpha_p = make_rational(b.count(), b.len());
    const Rational t_r(static_cast<long>(t_count)), u_r(static_cast<long>(u_count)),
        v_r(static_cast<long>(v_count)), w_r(static_cast<long>(w_count));

    out.incidences = w_count;
    out.main_term = alpha * alpha_p * t_r;
    out.e1 = alpha * (v_r - alpha_p * t_r);
    out.e2 = alpha_p * (u_r - alpha * t_r);
    out.e3 = w_r - alpha_p * u_r - alpha * v_r + alpha * alpha_p * t_r;
    return out;
}

CountingLemmaReport counting_lemma_check(const IntervalSet& a, const IntervalSet& b,
                                         double eps, const PairTestOptions& opt) {
    CountingLemmaReport rep;
    rep.L = static_cast<double>(std::max(a.len(), b.len()));
    rep.threshold = (2.0 - 8.0 * eps) * rep.L;

    if (!(rep.L > 16.0 / eps)) {
        rep.reason = "L <= 16/eps";
        return rep;
    }
    if (static_cast<double>(a.count()) < eps * rep.L ||
        static_cast<double>(b.count()) < eps * rep.L) {
        rep.reason = "density below eps L";
        return rep;
    }
    rep.verdict = regular_pair_test(a, b, std::pow(eps, 7.0), opt);
    if (rep.verdict.status != RegStatus::Regular) {
        rep.reason = "pair not certified eps^7-regular";
        return rep;
    }

    // Exact |A + A'| via the interval kernel.
    GSet ga(Ambient::interval(a.interval().lo, a.interval().hi), a.elements());
    GSet gb(Ambient::interval(b.interval().lo, b.interval().hi), b.elements());
    rep.sumset_size = sumset_pair(ga, gb).size();
    rep.vacuous = false;
    rep.holds = static_cast<double>(rep.sumset_size) >= rep.threshold;
    return rep;
}

Rational energy(const GSet& a, std::int64_t lambda, std::int64_t q) {
    const Ambient& amb = a.ambient();
    if (!amb.is_cyclic()) throw std::invalid_argument("energy: cyclic ambient required");
    const std::int64_t p = amb.modulus();
    if (!is_prime(p)) throw std::invalid_argument("energy: prime modulus required");
    if (q < 1 || q >= p) throw std::invalid_argument("energy: 1 <= q < p required");

    const auto bounds = regdetail::cell_boundaries(p, q);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(q), 0);
    for (std::int64_t x : a.elements()) {
        const std::int64_t y = mod_reduce(lambda * x, p);
        ++counts[static_cast<std::size_t>((y * q) / p)];
    }
    Rational total(0);
    for (std::int64_t i = 0; i < q; ++i) {
        const std::int64_t size = bounds[i + 1] - bounds[i];
        const Rational d = make_rational(counts[static_cast<std::size_t>(i)], size);
        total += d * d;
    }
    return total / Rational(static_cast<long>(q));
}

namespace {

// Exact predicate ||theta * d|| <= 1/Q for theta = num/den in [0, 1).
bool dirichlet_ok_mpz(const BigInt& num, const BigInt& den, std::int64_t d, std::int64_t Q) {
    const BigInt r = (num * d) % den;
    const BigInt wrap = den - r;
    const BigInt m = r < wrap ? r : wrap;
    return m * Q <= den;
}

std::int64_t dirichlet_scan(const BigInt& num, const BigInt& den, std::int64_t Q) {
    if (num == 0) return 1;
    if (den < (BigInt(1) << 62)) {
        const auto n64 = static_cast<unsigned __int128>(num.get_ui());
        const auto d64 = static_cast<unsigned __int128>(den.get_ui());
        for (std::int64_t d = 1; d <= Q; ++d) {
            const unsigned __int128 r = (n64 * static_cast<unsigned>(d)) % d64;
            const unsigned __int128 m = std::min(r, d64 - r);
            if (m * static_cast<unsigned __int128>(Q) <= d64) return d;
        }
    } else {
        for (std::int64_t d = 1; d <= Q; ++d)
            if (dirichlet_ok_mpz(num, den, d, Q)) return d;
    }
    throw std::logic_error("dirichlet_approx: scan found no approximant");
}

std::int64_t dirichlet_cf(const BigInt& num, const BigInt& den, std::int64_t Q) {
    // Walk convergent denominators of num/den in (0,1); the least
    // admissible d is a best approximation of the second kind, hence a
    // convergent denominator. q_0 = 1 (the a_0 = 0 convergent) is checked
    // first; the Euclid loop then produces q_1, q_2, ...
    if (dirichlet_ok_mpz(num, den, 1, Q)) return 1;
    BigInt a = den, b = num % den;
    BigInt k_prev = 0, k_cur = 1;
    while (b != 0) {
        const BigInt quot = a / b;
        const BigInt rem = a % b;
        a = b;
        b = rem;
        const BigInt k_next = quot * k_cur + k_prev;
        k_prev = k_cur;
        k_cur = k_next;
        if (k_cur > Q) break;
        if (dirichlet_ok_mpz(num, den, k_cur.get_si(), Q)) return k_cur.get_si();
    }
    throw std::logic_error("dirichlet_approx: no convergent denominator admissible");
}

}  // namespace

std::int64_t dirichlet_approx(const Rational& theta, std::int64_t Q) {
    if (Q < 1) throw std::invalid_argument("dirichlet_approx: Q >= 1 required");
    Rational t = theta;
    // Reduce mod 1 into [0, 1).
    BigInt fl;
    mpz_fdiv_q(fl.get_mpz_t(), t.get_num().get_mpz_t(), t.get_den().get_mpz_t());
    t -= Rational(fl);
    const BigInt num = t.get_num();
    const BigInt den = t.get_den();
    const std::int64_t by_scan = dirichlet_scan(num, den, Q);
    const std::int64_t by_cf = dirichlet_cf(num, den, Q);
    if (by_scan != by_cf)
        throw std::logic_error("dirichlet_approx: scan and convergent methods disagree");
    return by_scan;
}

std::int64_t dirichlet_approx(double theta, std::int64_t Q) {
    return dirichlet_approx(Rational(theta), Q);
}

namespace {

std::vector<IntervalSet> build_cells(const GSet& a, std::int64_t lambda, std::int64_t p,
                                     std::int64_t q) {
    const auto bounds = regdetail::cell_boundaries(p, q);
    std::vector<std::vector<std::int64_t>> members(static_cast<std::size_t>(q));
    for (std::int64_t x : a.elements()) {
        const std::int64_t y = mod_reduce(lambda * x, p);
        members[static_cast<std::size_t>((y * q) / p)].push_back(y);
    }
    std::vector<IntervalSet> cells;
    cells.reserve(static_cast<std::size_t>(q));
    for (std::int64_t i = 0; i < q; ++i) {
        Interval iv{bounds[i], bounds[i + 1] - 1};
        cells.emplace_back(iv, members[static_cast<std::size_t>(i)]);
    }
    return cells;
}

}  // namespace

PairConclusionCheck pair_structure_check(const GSet& a, std::int64_t lambda, std::int64_t q,
                                         double eps) {
    const std::int64_t p = a.ambient().modulus();
    // With q >= 2 two cells span fewer than p integers, so integer sumset
    // sizes equal residue sumset sizes.
    if (q < 2) throw std::invalid_argument("pair_structure_check: q >= 2 required");
    const auto cells = build_cells(a, lambda, p, q);
    const double cell_len = static_cast<double>(p) / static_cast<double>(q);

    PairConclusionCheck out;
    out.total = q * q;
    for (std::int64_t i = 0; i < q; ++i) {
        for (std::int64_t j = i; j < q; ++j) {
            const auto& ci = cells[static_cast<std::size_t>(i)];
            const auto& cj = cells[static_cast<std::size_t>(j)];
            bool ok = false;
            if (static_cast<double>(std::min(ci.count(), cj.count())) <= eps * cell_len) {
                ok = true;
            } else {
                GSet gi(Ambient::interval(ci.interval().lo, ci.interval().hi), ci.elements());
                GSet gj(Ambient::interval(cj.interval().lo, cj.interval().hi), cj.elements());
                const std::int64_t sz = sumset_pair(gi, gj).size();
                ok = static_cast<double>(sz) >= (2.0 - eps) * cell_len;
            }
            if (ok) out.satisfied += (i == j) ? 1 : 2;
        }
    }
    out.fraction = static_cast<double>(out.satisfied) / static_cast<double>(out.total);
    out.holds = static_cast<double>(out.satisfied) >= (1.0 - eps) * static_cast<double>(out.total);
    return out;
}

RegularityDecomposition regularity_decompose(const GSet& a, double eps,
                                             const DecomposeOptions& opt) {
    const Ambient& amb = a.ambient();
    if (!amb.is_cyclic()) throw std::invalid_argument("regularity_decompose: cyclic ambient required");
    const std::int64_t p = amb.modulus();
    if (!is_prime(p)) throw std::invalid_argument("regularity_decompose: prime modulus required");
    if (eps <= 0 || eps >= 0.5)
        throw std::invalid_argument("regularity_decompose: eps in (0, 1/2) required");

    RegularityDecomposition dec;
    dec.p = p;
    dec.eps = eps;
    dec.alpha = static_cast<double>(a.size()) / static_cast<double>(p);
    dec.paper_q_regime = !opt.q_min_override.has_value();

    const std::int64_t q_min = opt.q_min_override.value_or(
        static_cast<std::int64_t>(std::ceil(std::pow(eps, -10.0))));
    const double l_floor = opt.l_floor.value_or(16.0 / eps);
    const int max_steps = opt.max_steps.value_or(
        static_cast<int>(std::ceil(4.0 * std::pow(eps, -6.0))));

    std::int64_t q = next_prime(q_min - 1);
    if (q >= p || static_cast<double>(p) / static_cast<double>(q) < l_floor) {
        const std::int64_t min_p =
            next_prime(static_cast<std::int64_t>(std::ceil(static_cast<double>(q) * l_floor)));
        throw ScaleError("regularity_decompose: p too small for the first step", min_p);
    }

    std::int64_t lambda = 1;
    double pending_tolerance = 0;
    double pending_increment = 0;
    const std::int64_t scan = window_scan_limit(eps);
    const int threads = std::max(1, opt.threads);

    for (int t = 1; t <= max_steps; ++t) {
        const double cell_len = static_cast<double>(p) / static_cast<double>(q);
        const auto cells = build_cells(a, lambda, p, q);

        DecompositionStep step;
        step.t = t;
        step.lambda = lambda;
        step.q = q;
        step.cell_length = cell_len;
        step.step_energy = energy(a, lambda, q);
        step.edge_tolerance = pending_tolerance;
        step.predicted_increment = pending_increment;

        // Cells of two adjacent lengths need grids at up to two
        // granularities: every pair uses M(max of the two lengths).
        std::int64_t len_lo = cells[0].len(), len_hi = cells[0].len();
        for (const auto& c : cells) {
            len_lo = std::min(len_lo, c.len());
            len_hi = std::max(len_hi, c.len());
        }
        const std::int64_t m_lo = grid_granularity(eps, len_lo);
        const std::int64_t m_hi = grid_granularity(eps, len_hi);

        std::vector<CellAnalysis> at_lo(cells.size()), at_hi(cells.size());
        {
            std::vector<std::thread> pool;
            std::atomic<std::size_t> next{0};
            auto work = [&]() {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cells.size()) break;
                    at_hi[i] = analyze_cell(cells[i], eps, m_hi, scan);
                    if (m_lo != m_hi && cells[i].len() == len_lo)
                        at_lo[i] = analyze_cell(cells[i], eps, m_lo, scan);
                    else
                        at_lo[i] = at_hi[i];
                }
            };
            if (threads == 1) {
                work();
            } else {
                for (int w = 0; w < threads; ++w) pool.emplace_back(work);
                for (auto& th : pool) th.join();
            }
        }

        // Verdicts for ordered pairs; symmetric, so compute i <= j.
        std::vector<std::int8_t> verdicts(static_cast<std::size_t>(q) * static_cast<std::size_t>(q), 2);
        std::int64_t regular = 0, irregular = 0, undecided = 0;
        for (std::int64_t i = 0; i < q; ++i) {
            for (std::int64_t j = i; j < q; ++j) {
                const std::int64_t pair_len =
                    std::max(cells[static_cast<std::size_t>(i)].len(),
                             cells[static_cast<std::size_t>(j)].len());
                const bool use_hi = (pair_len == len_hi && m_lo != m_hi);
                const CellAnalysis& ai =
                    use_hi ? at_hi[static_cast<std::size_t>(i)] : at_lo[static_cast<std::size_t>(i)];
                const CellAnalysis& aj =
                    use_hi ? at_hi[static_cast<std::size_t>(j)] : at_lo[static_cast<std::size_t>(j)];
                const RegularityVerdict v = pair_verdict(ai, aj, eps);
                std::int8_t code = v.status == RegStatus::Regular    ? 0
                                   : v.status == RegStatus::Irregular ? 1
                                                                      : 2;
                verdicts[static_cast<std::size_t>(i * q + j)] = code;
                verdicts[static_cast<std::size_t>(j * q + i)] = code;
                const std::int64_t mult = (i == j) ? 1 : 2;
                if (code == 0) regular += mult;
                if (code == 1) irregular += mult;
                if (code == 2) undecided += mult;
            }
        }
        step.regular_pairs = regular;
        step.irregular_pairs = irregular;
        step.undecided_pairs = undecided;
        step.regular_fraction =
            static_cast<double>(regular) / static_cast<double>(q * q);

        const bool success =
            static_cast<double>(regular) >= (1.0 - eps) * static_cast<double>(q * q);

        if (success) {
            dec.steps.push_back(std::move(step));
            dec.outcome = DecomposeOutcome::Success;
            dec.final_verdicts = std::move(verdicts);
            dec.final_cell_density.clear();
            for (const auto& c : cells)
                dec.final_cell_density.push_back(make_rational(c.count(), c.len()));
            return dec;
        }

        // Witness frequencies: Sigma_i = grid points where cell i's
        // transform reaches eps * len / 2; count cell hits per point.
        const std::size_t words = static_cast<std::size_t>((m_hi + 63) / 64);
        std::vector<std::uint64_t> sigma(words);
        std::vector<std::int32_t> hits(static_cast<std::size_t>(m_hi), 0);
        std::int64_t sigma_max = 0;
        for (const auto& cell : cells) {
            const double half_threshold = eps * static_cast<double>(cell.len()) / 2.0;
            if (l1_norm(cell) < half_threshold) continue;  // Sigma_i empty
            const auto mags = regdetail::grid_magnitudes(cell, m_hi);
            std::int64_t size_i = 0;
            for (std::int64_t g = 0; g < m_hi; ++g) {
                if (mags[static_cast<std::size_t>(g)] >= half_threshold) {
                    ++hits[static_cast<std::size_t>(g)];
                    ++size_i;
                }
            }
            sigma_max = std::max(sigma_max, size_i);
        }
        step.sigma_cap_max = sigma_max;

        std::int64_t best_g = -1, best_count = 0;
        for (std::int64_t g = 0; g < m_hi; ++g) {
            const std::int64_t c = hits[static_cast<std::size_t>(g)];
            if (c == 0) continue;
            if (c > best_count) {
                best_count = c;
                best_g = g;
            } else if (c == best_count && best_g >= 0) {
                const std::int64_t cur_dist = std::min(best_g, m_hi - best_g);
                const std::int64_t new_dist = std::min(g, m_hi - g);
                if (new_dist < cur_dist || (new_dist == cur_dist && g < best_g)) best_g = g;
            }
        }
        if (best_g < 0) {
            dec.steps.push_back(std::move(step));
            dec.outcome = DecomposeOutcome::Stalled;
            dec.final_verdicts = std::move(verdicts);
            return dec;
        }

        step.witness_theta = static_cast<double>(best_g) / static_cast<double>(m_hi);
        step.witness_numerator = best_g;
        step.witness_grid_m = m_hi;
        step.popular_cells = best_count;

        const std::int64_t dirichlet_q =
            std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(std::cbrt(cell_len))));
        const std::int64_t d =
            dirichlet_approx(make_rational(best_g, m_hi), dirichlet_q);
        step.dirichlet_d = d;

        const std::int64_t lambda_next = mod_reduce(mod_inverse(d, p) * lambda, p);
        const std::int64_t q_next = next_prime(static_cast<std::int64_t>(
            std::ceil(std::pow(static_cast<double>(p), 0.75) *
                      std::pow(static_cast<double>(q), 0.25))) - 1);
        const double next_len = static_cast<double>(p) / static_cast<double>(q_next);

        pending_tolerance = 8.0 * (static_cast<double>(d) * next_len / cell_len +
                                   static_cast<double>(d * q) / static_cast<double>(q_next) +
                                   1.0 / next_len + std::pow(cell_len, -1.0 / 12.0));
        pending_increment = (static_cast<double>(best_count) / static_cast<double>(q)) *
                            (eps / 2.0) * (eps / 2.0);

        dec.steps.push_back(std::move(step));

        if (q_next >= p || next_len < l_floor) {
            // Record the prospective dilate's energy before saturating.
            if (q_next < p) {
                DecompositionStep trunc;
                trunc.t = t + 1;
                trunc.lambda = lambda_next;
                trunc.q = q_next;
                trunc.cell_length = next_len;
                trunc.step_energy = energy(a, lambda_next, q_next);
                trunc.edge_tolerance = pending_tolerance;
                trunc.predicted_increment = pending_increment;
                dec.steps.push_back(std::move(trunc));
            }
            dec.outcome = DecomposeOutcome::Saturated;
            dec.final_verdicts = std::move(verdicts);
            return dec;
        }
        lambda = lambda_next;
        q = q_next;
    }
    dec.outcome = DecomposeOutcome::MaxSteps;
    return dec;
}

}  // namespace addcomb
