#include "addcomb/freiman.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "addcomb/enumerate.hpp"

namespace addcomb {

QuadrupleSystem quadruple_system(const GSet& a) {
    QuadrupleSystem sys;
    sys.base = a.elements();
    const int n = static_cast<int>(sys.base.size());
    const bool cyclic = a.ambient().is_cyclic();
    const std::int64_t mod = cyclic ? a.ambient().modulus() : 0;

    // Group unordered pairs (i <= j) by their sum; every additive quadruple
    // is a pair of pairs in one group.
    std::map<std::int64_t, std::vector<std::pair<int, int>>> by_sum;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            std::int64_t s = sys.base[i] + sys.base[j];
            if (cyclic) s = mod_reduce(s, mod);
            by_sum[s].emplace_back(i, j);
        }
    }
    for (const auto& [sum, pairs] : by_sum) {
        for (std::size_t u = 0; u < pairs.size(); ++u)
            for (std::size_t v = u + 1; v < pairs.size(); ++v)
                sys.quadruples.push_back({pairs[u].first, pairs[u].second,
                                          pairs[v].first, pairs[v].second});
    }
    return sys;
}

int integer_matrix_rank(std::vector<std::vector<BigInt>> rows, int cols) {
    // Fraction-free (Bareiss-style) elimination; all arithmetic exact.
    int rank = 0;
    BigInt prev_pivot = 1;
    for (int col = 0; col < cols && rank < static_cast<int>(rows.size()); ++col) {
        int pivot_row = -1;
        for (int r = rank; r < static_cast<int>(rows.size()); ++r) {
            if (rows[r][col] != 0) {
                pivot_row = r;
                break;
            }
        }
        if (pivot_row < 0) continue;
        std::swap(rows[rank], rows[pivot_row]);
        const BigInt pivot = rows[rank][col];
        for (int r = rank + 1; r < static_cast<int>(rows.size()); ++r) {
            const BigInt factor = rows[r][col];
            for (int c = col; c < cols; ++c) {
                rows[r][c] = (rows[r][c] * pivot - factor * rows[rank][c]) / prev_pivot;
            }
        }
        prev_pivot = pivot;
        ++rank;
    }
    return rank;
}

namespace {

// Reduced row echelon form over rationals; returns pivot columns.
std::vector<int> rational_rref(std::vector<std::vector<Rational>>& m, int cols) {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < cols && row < static_cast<int>(m.size()); ++col) {
        int pr = -1;
        for (int r = row; r < static_cast<int>(m.size()); ++r) {
            if (m[r][col] != 0) {
                pr = r;
                break;
            }
        }
        if (pr < 0) continue;
        std::swap(m[row], m[pr]);
        const Rational inv = 1 / m[row][col];
        for (int c = col; c < cols; ++c) m[row][c] *= inv;
        for (int r = 0; r < static_cast<int>(m.size()); ++r) {
            if (r == row || m[r][col] == 0) continue;
            const Rational f = m[r][col];
            for (int c = col; c < cols; ++c) m[r][c] -= f * m[row][c];
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

std::vector<std::vector<Rational>> constraint_rows(const QuadrupleSystem& sys, int n) {
    std::vector<std::vector<Rational>> rows;
    rows.reserve(sys.quadruples.size());
    for (const auto& q : sys.quadruples) {
        std::vector<Rational> row(n, Rational(0));
        row[q[0]] += 1;
        row[q[1]] += 1;
        row[q[2]] -= 1;
        row[q[3]] -= 1;
        bool nonzero = false;
        for (const auto& v : row) {
            if (v != 0) {
                nonzero = true;
                break;
            }
        }
        if (nonzero) rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

FreimanDim freiman_dimension(const GSet& a, int cap) {
    const int n = static_cast<int>(a.size());
    if (n < 1) throw std::invalid_argument("freiman_dimension: empty set");
    if (n > cap)
        throw BudgetError("freiman_dimension: set larger than configured cap",
                          std::to_string(n));

    const QuadrupleSystem sys = quadruple_system(a);
    auto rows = constraint_rows(sys, n);
    const std::vector<int> pivots = rational_rref(rows, n);
    const int rank = static_cast<int>(pivots.size());

    FreimanDim out;
    out.r = (n - rank) - 1;

    // Kernel basis: one vector per free column.
    std::vector<bool> is_pivot(n, false);
    for (int c : pivots) is_pivot[c] = true;
    for (int free_col = 0; free_col < n; ++free_col) {
        if (is_pivot[free_col]) continue;
        std::vector<Rational> vec(n, Rational(0));
        vec[free_col] = 1;
        for (int r = 0; r < rank; ++r) {
            // row r has leading 1 at pivots[r]
            vec[pivots[r]] = -rows[r][free_col];
        }
        out.kernel_basis.push_back(std::move(vec));
    }
    return out;
}

namespace {

bool satisfies_quadruples(const QuadrupleSystem& sys, const std::vector<std::int64_t>& img) {
    for (const auto& q : sys.quadruples)
        if (img[q[0]] + img[q[1]] != img[q[2]] + img[q[3]]) return false;
    return true;
}

BigInt brute_force_homs(const QuadrupleSystem& sys, int n, std::int64_t N) {
    std::vector<std::int64_t> img(n, 1);
    BigInt count = 0;
    for (;;) {
        if (satisfies_quadruples(sys, img)) count += 1;
        int pos = n - 1;
        while (pos >= 0 && img[pos] == N) {
            img[pos] = 1;
            --pos;
        }
        if (pos < 0) break;
        ++img[pos];
    }
    return count;
}

}  // namespace

HomCount count_freiman_homs(const GSet& a, std::int64_t N, double budget) {
    if (N < 1) throw std::invalid_argument("count_freiman_homs: N >= 1 required");
    const int n = static_cast<int>(a.size());
    if (n < 1) throw std::invalid_argument("count_freiman_homs: empty set");

    const FreimanDim dim = freiman_dimension(a);
    const int basis_size = dim.r + 1;

    HomCount out;
    out.r = dim.r;
    mpz_ui_pow_ui(out.bound.get_mpz_t(), static_cast<unsigned long>(N),
                  static_cast<unsigned long>(basis_size));

    const QuadrupleSystem sys = quadruple_system(a);
    const double direct_cost = std::pow(static_cast<double>(N), n);
    const double kernel_cost = std::pow(static_cast<double>(N), basis_size) * n;

    if (direct_cost <= budget && n <= 12) {
        out.count = brute_force_homs(sys, n, N);
    } else if (kernel_cost <= budget) {
        // Determining rows: r+1 coordinates whose projection is injective on
        // the kernel, i.e. rows of the basis matrix forming an invertible
        // square block. Greedy row-selection by rational elimination.
        std::vector<std::vector<Rational>> basis_t;  // (r+1) x n, rows = basis vectors
        for (const auto& v : dim.kernel_basis) basis_t.push_back(v);
        std::vector<int> det_rows;
        {
            std::vector<std::vector<Rational>> work = basis_t;  // rows x n
            // Column-pivot search: work as (r+1) x n, find pivot columns.
            std::vector<std::vector<Rational>> m = work;
            std::vector<int> pivots = rational_rref(m, n);
            det_rows = pivots;  // columns of the basis matrix = elements of A
        }
        if (static_cast<int>(det_rows.size()) != basis_size)
            throw std::logic_error("count_freiman_homs: degenerate kernel basis");

        // Extension matrix E (n x (r+1)): full image vector from the images of
        // the determining elements, x = E * v, with E rows at det_rows = I.
        // Solve B_R^T c = v for each v; precompute E = B^T * (B_R^T)^{-1}.
        // B^T is n x (r+1) with columns = basis vectors.
        std::vector<std::vector<Rational>> bt(n, std::vector<Rational>(basis_size));
        for (int j = 0; j < basis_size; ++j)
            for (int i = 0; i < n; ++i) bt[i][j] = dim.kernel_basis[j][i];
        // Invert the square block via RREF on [B_R | I].
        std::vector<std::vector<Rational>> aug(basis_size,
                                               std::vector<Rational>(2 * basis_size, Rational(0)));
        for (int i = 0; i < basis_size; ++i) {
            for (int j = 0; j < basis_size; ++j) aug[i][j] = bt[det_rows[i]][j];
            aug[i][basis_size + i] = 1;
        }
        rational_rref(aug, 2 * basis_size);
        std::vector<std::vector<Rational>> inv(basis_size, std::vector<Rational>(basis_size));
        for (int i = 0; i < basis_size; ++i)
            for (int j = 0; j < basis_size; ++j) inv[i][j] = aug[i][basis_size + j];
        std::vector<std::vector<Rational>> ext(n, std::vector<Rational>(basis_size, Rational(0)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < basis_size; ++j)
                for (int t = 0; t < basis_size; ++t) ext[i][j] += bt[i][t] * inv[t][j];

        std::vector<std::int64_t> v(basis_size, 1);
        BigInt count = 0;
        for (;;) {
            bool ok = true;
            for (int i = 0; i < n && ok; ++i) {
                Rational x(0);
                for (int j = 0; j < basis_size; ++j)
                    x += ext[i][j] * Rational(static_cast<long>(v[j]));
                if (x.get_den() != 1 || x < 1 || x > static_cast<long>(N)) ok = false;
            }
            if (ok) count += 1;
            int pos = basis_size - 1;
            while (pos >= 0 && v[pos] == N) {
                v[pos] = 1;
                --pos;
            }
            if (pos < 0) break;
            ++v[pos];
        }
        out.count = count;
    } else {
        throw BudgetError("count_freiman_homs: both strategies exceed the budget",
                          std::to_string(std::min(direct_cost, kernel_cost)));
    }

    if (out.count > out.bound)
        throw std::logic_error("count_freiman_homs: count exceeds N^{r+1}");
    return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> affine_stabilizer(const GSet& a,
                                                                     int threads) {
    const Ambient& amb = a.ambient();
    if (!amb.is_cyclic()) throw std::invalid_argument("affine_stabilizer: cyclic ambient required");
    const std::int64_t n = amb.modulus();
    if (!is_prime(n)) throw std::invalid_argument("affine_stabilizer: modulus must be prime");

    const auto elems = a.elements();
    const int nthreads = std::max(1, threads);
    std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> found(
        static_cast<std::size_t>(nthreads));

    auto scan = [&](int tid) {
        GSet image(amb);
        for (std::int64_t lambda = 1 + tid; lambda < n; lambda += nthreads) {
            for (std::int64_t mu = 0; mu < n; ++mu) {
                std::fill(image.words().begin(), image.words().end(), 0);
                for (std::int64_t x : elems) image.insert((lambda * x + mu) % n);
                if (image == a) found[static_cast<std::size_t>(tid)].emplace_back(lambda, mu);
            }
        }
    };
    if (nthreads == 1) {
        scan(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(scan, t);
        for (auto& th : pool) th.join();
    }

    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (auto& part : found) out.insert(out.end(), part.begin(), part.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::int64_t> dilates_into_short_interval(const GSet& a, std::int64_t L) {
    const Ambient& amb = a.ambient();
    if (!amb.is_cyclic())
        throw std::invalid_argument("dilates_into_short_interval: cyclic ambient required");
    const std::int64_t n = amb.modulus();
    if (!is_prime(n)) throw std::invalid_argument("dilates_into_short_interval: prime modulus required");
    if (L < 1 || L > n) throw std::invalid_argument("dilates_into_short_interval: L out of range");

    const auto elems = a.elements();
    std::vector<std::int64_t> out;
    std::vector<std::int64_t> img;
    img.reserve(elems.size());
    for (std::int64_t lambda = 0; lambda < n; ++lambda) {
        img.clear();
        for (std::int64_t x : elems) img.push_back((lambda * x) % n);
        std::sort(img.begin(), img.end());
        img.erase(std::unique(img.begin(), img.end()), img.end());
        std::int64_t max_gap = 0;
        if (img.size() == 1) {
            max_gap = n;
        } else {
            for (std::size_t i = 0; i + 1 < img.size(); ++i)
                max_gap = std::max(max_gap, img[i + 1] - img[i]);
            max_gap = std::max(max_gap, img.front() + n - img.back());
        }
        if (max_gap > n - L) out.push_back(lambda);
    }
    return out;
}

}  // namespace addcomb
