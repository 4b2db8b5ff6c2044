#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "addcomb/core.hpp"

namespace addcomb {

/// The additive quadruples of a set A (indices into the sorted element
/// list): all (a, b, c, d) with x_a + x_b = x_c + x_d in the ambient, up to
/// the symmetries (a,b)<->(b,a) and (a,b,c,d)<->(c,d,a,b), trivial
/// quadruples omitted.
struct QuadrupleSystem {
    std::vector<std::int64_t> base;                 // sorted elements of A
    std::vector<std::array<int, 4>> quadruples;     // index quadruples
};

QuadrupleSystem quadruple_system(const GSet& a);

/// Freiman dimension: r = dim(solution space of the quadruple system) - 1,
/// the rank computed over exact rationals. kernel_basis spans the space of
/// additive-quadruple-preserving maps A -> Q.
struct FreimanDim {
    int r = 0;
    std::vector<std::vector<Rational>> kernel_basis;  // each vector has |A| entries
};

FreimanDim freiman_dimension(const GSet& a, int cap = 24);

struct HomCount {
    BigInt count;  // Freiman homomorphisms A -> {1, ..., N}
    BigInt bound;  // N^{r+1}
    int r = 0;
};

/// Exact number of maps phi: A -> [1, N] with a+b = c+d  =>  phi(a)+phi(b) =
/// phi(c)+phi(d). Uses direct enumeration when N^|A| is small, otherwise the
/// kernel-basis method (images of r+1 determining elements extend uniquely).
HomCount count_freiman_homs(const GSet& a, std::int64_t N, double budget = 2e7);

/// All (lambda, mu) with lambda in (Z/NZ)^x, mu in Z/NZ and A = lambda*A + mu.
/// N prime. Always contains (1, 0).
std::vector<std::pair<std::int64_t, std::int64_t>> affine_stabilizer(const GSet& a,
                                                                     int threads = 1);

/// All lambda in Z/NZ (including 0) such that lambda*A fits in a cyclic
/// interval of length < L, decided by the largest cyclic gap exceeding N - L.
std::vector<std::int64_t> dilates_into_short_interval(const GSet& a, std::int64_t L);

/// Exact rank of an integer matrix via fraction-free elimination.
int integer_matrix_rank(std::vector<std::vector<BigInt>> rows, int cols);

}  // namespace addcomb
