#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace addcomb {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Builds a canonical rational (lowest terms, positive denominator).
Rational make_rational(const BigInt& num, const BigInt& den);

/// Raised when a requested computation exceeds its configured work budget.
/// Carries the projected cost so sweep drivers can skip infeasible cells.
class BudgetError : public std::runtime_error {
public:
    BudgetError(const std::string& what, std::string projection)
        : std::runtime_error(what), projection_(std::move(projection)) {}
    const std::string& projection() const { return projection_; }

private:
    std::string projection_;
};

/// Raised when an input is structurally too small for the algorithm to run
/// at all (as opposed to merely expensive).
class ScaleError : public std::runtime_error {
public:
    ScaleError(const std::string& what, std::int64_t minimum_viable)
        : std::runtime_error(what), minimum_viable_(minimum_viable) {}
    std::int64_t minimum_viable() const { return minimum_viable_; }

private:
    std::int64_t minimum_viable_;
};

enum class AmbientKind { IntegerInterval, Cyclic };

/// The two ambient universes sets live in: a finite integer interval
/// [lo, hi] or the cyclic group Z/NZ with residues reduced to [0, N).
class Ambient {
public:
    static Ambient interval(std::int64_t lo, std::int64_t hi);
    static Ambient cyclic(std::int64_t modulus);

    AmbientKind kind() const { return kind_; }
    bool is_cyclic() const { return kind_ == AmbientKind::Cyclic; }
    std::int64_t lo() const { return lo_; }
    std::int64_t hi() const { return hi_; }
    std::int64_t modulus() const;

    /// Number of elements in the ambient.
    std::int64_t size() const { return hi_ - lo_ + 1; }

    /// Index of an element inside the ambient's bit-vector.
    /// Cyclic inputs are reduced first; interval inputs must lie in range.
    std::int64_t index_of(std::int64_t value) const;
    std::int64_t value_at(std::int64_t index) const { return lo_ + index; }
    bool contains(std::int64_t value) const;

    bool operator==(const Ambient& other) const = default;

private:
    Ambient(AmbientKind kind, std::int64_t lo, std::int64_t hi)
        : kind_(kind), lo_(lo), hi_(hi) {}

    AmbientKind kind_;
    std::int64_t lo_;
    std::int64_t hi_;
};

// Dense masks only; ambients wider than this are rejected outright.
inline constexpr std::int64_t kMaxAmbientSize = std::int64_t{1} << 24;

/// A finite subset of an ambient, stored as a bit-vector membership mask.
class GSet {
public:
    explicit GSet(Ambient ambient);
    GSet(Ambient ambient, std::initializer_list<std::int64_t> elems);
    GSet(Ambient ambient, const std::vector<std::int64_t>& elems);

    const Ambient& ambient() const { return ambient_; }

    void insert(std::int64_t value);
    void erase(std::int64_t value);
    bool contains(std::int64_t value) const;

    std::int64_t size() const;
    bool empty() const { return size() == 0; }

    std::vector<std::int64_t> elements() const;

    const std::vector<std::uint64_t>& words() const { return words_; }
    std::vector<std::uint64_t>& words() { return words_; }

    bool operator==(const GSet& other) const = default;

    /// Lexicographic comparison of the sorted element sequences; requires
    /// matching ambients. Used for canonical-form selection.
    static bool lex_less(const GSet& a, const GSet& b);

private:
    Ambient ambient_;
    std::vector<std::uint64_t> words_;
};

/// Smallest prime strictly greater than n. Primality is decided by a
/// deterministic Miller-Rabin witness set valid for all 64-bit inputs.
std::int64_t next_prime(std::int64_t n);

/// Deterministic primality for 64-bit nonnegative integers.
bool is_prime(std::int64_t n);

/// Inverse of a mod p, in [1, p). Requires a not divisible by p; a
/// non-invertible residue (composite p) raises a domain error.
std::int64_t mod_inverse(std::int64_t a, std::int64_t p);

/// Reduce v into [0, n).
inline std::int64_t mod_reduce(std::int64_t v, std::int64_t n) {
    std::int64_t r = v % n;
    return r < 0 ? r + n : r;
}

/// Reproducible random source. Equal (seed, stream) pairs yield identical
/// output sequences on every platform; distinct streams are independent,
/// which makes block-parallel sampling deterministic regardless of the
/// thread schedule.
class SeededSource {
public:
    explicit SeededSource(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();
    /// Uniform in [0, n), n >= 1, by rejection.
    std::uint64_t below(std::uint64_t n);
    /// Fair coin, consuming one bit from an internal bit pool.
    bool coin();
    /// Uniform double in [0, 1) with 53 random bits.
    double unit();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    std::uint64_t bit_buffer_ = 0;
    int bits_left_ = 0;
};

}  // namespace addcomb
