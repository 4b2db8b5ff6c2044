#include "addcomb/core.hpp"

#include <bit>

namespace addcomb {

Rational make_rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::domain_error("make_rational: zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Ambient Ambient::interval(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("Ambient::interval: lo > hi");
    if (hi - lo + 1 > kMaxAmbientSize)
        throw std::invalid_argument("Ambient::interval: width exceeds dense-mask limit");
    return Ambient(AmbientKind::IntegerInterval, lo, hi);
}

Ambient Ambient::cyclic(std::int64_t modulus) {
    if (modulus < 1) throw std::invalid_argument("Ambient::cyclic: modulus must be >= 1");
    if (modulus > kMaxAmbientSize)
        throw std::invalid_argument("Ambient::cyclic: modulus exceeds dense-mask limit");
    return Ambient(AmbientKind::Cyclic, 0, modulus - 1);
}

std::int64_t Ambient::modulus() const {
    if (!is_cyclic()) throw std::logic_error("Ambient::modulus: not a cyclic ambient");
    return hi_ + 1;
}

std::int64_t Ambient::index_of(std::int64_t value) const {
    if (is_cyclic()) return mod_reduce(value, modulus());
    if (value < lo_ || value > hi_)
        throw std::out_of_range("Ambient::index_of: value outside interval");
    return value - lo_;
}

bool Ambient::contains(std::int64_t value) const {
    if (is_cyclic()) return true;  // every integer reduces into the group
    return value >= lo_ && value <= hi_;
}

GSet::GSet(Ambient ambient)
    : ambient_(ambient), words_((ambient.size() + 63) / 64, 0) {}

GSet::GSet(Ambient ambient, std::initializer_list<std::int64_t> elems) : GSet(ambient) {
    for (auto v : elems) insert(v);
}

GSet::GSet(Ambient ambient, const std::vector<std::int64_t>& elems) : GSet(ambient) {
    for (auto v : elems) insert(v);
}

void GSet::insert(std::int64_t value) {
    const std::int64_t i = ambient_.index_of(value);
    words_[i >> 6] |= std::uint64_t{1} << (i & 63);
}

void GSet::erase(std::int64_t value) {
    const std::int64_t i = ambient_.index_of(value);
    words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
}

bool GSet::contains(std::int64_t value) const {
    if (!ambient_.contains(value)) return false;
    const std::int64_t i = ambient_.index_of(value);
    return (words_[i >> 6] >> (i & 63)) & 1;
}

std::int64_t GSet::size() const {
    std::int64_t total = 0;
    for (auto w : words_) total += std::popcount(w);
    return total;
}

std::vector<std::int64_t> GSet::elements() const {
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
        std::uint64_t w = words_[wi];
        while (w) {
            const int b = std::countr_zero(w);
            out.push_back(ambient_.value_at(static_cast<std::int64_t>(wi * 64 + b)));
            w &= w - 1;
        }
    }
    return out;
}

bool GSet::lex_less(const GSet& a, const GSet& b) {
    if (a.ambient_ != b.ambient_)
        throw std::invalid_argument("GSet::lex_less: ambient mismatch");
    // The set whose smallest non-shared element is smaller comes first.
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
        const std::uint64_t diff = a.words_[i] ^ b.words_[i];
        if (diff) {
            const std::uint64_t low = diff & (~diff + 1);
            return (a.words_[i] & low) != 0;
        }
    }
    return false;
}

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) result = mulmod_u64(result, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    return result;
}

// Witness set proven sufficient for all n < 3.3 * 10^24, hence for all
// 64-bit inputs; fully deterministic.
constexpr std::uint64_t kWitnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : kWitnesses) {
        if (static_cast<std::uint64_t>(n) == p) return true;
        if (static_cast<std::uint64_t>(n) % p == 0) return false;
    }
    const std::uint64_t u = static_cast<std::uint64_t>(n);
    std::uint64_t d = u - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : kWitnesses) {
        std::uint64_t x = powmod_u64(a, d, u);
        if (x == 1 || x == u - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, u);
            if (x == u - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::int64_t next_prime(std::int64_t n) {
    if (n < 0) throw std::invalid_argument("next_prime: negative input");
    if (n < 2) return 2;
    // Bertrand guarantees a prime below 2n, but guard the representable range.
    if (n >= (std::int64_t{1} << 62))
        throw std::range_error("next_prime: input too close to the integer width");
    std::int64_t c = n + 1;
    if (c % 2 == 0) {
        if (c == 2) return 2;
        ++c;
    }
    while (!is_prime(c)) c += 2;
    return c;
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t p) {
    if (p < 2) throw std::domain_error("mod_inverse: modulus must be >= 2");
    a = mod_reduce(a, p);
    if (a == 0) throw std::domain_error("mod_inverse: zero residue has no inverse");
    // Extended Euclid; a non-unit gcd exposes a composite modulus for free.
    std::int64_t r0 = p, r1 = a, t0 = 0, t1 = 1;
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        std::int64_t tmp = r0 - q * r1;
        r0 = r1;
        r1 = tmp;
        tmp = t0 - q * t1;
        t0 = t1;
        t1 = tmp;
    }
    if (r0 != 1) throw std::domain_error("mod_inverse: residue not invertible (composite modulus?)");
    return mod_reduce(t0, p);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

SeededSource::SeededSource(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed),
      stream_(stream),
      engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

std::uint64_t SeededSource::next_u64() { return engine_(); }

std::uint64_t SeededSource::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("SeededSource::below: n must be >= 1");
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

bool SeededSource::coin() {
    if (bits_left_ == 0) {
        bit_buffer_ = next_u64();
        bits_left_ = 64;
    }
    const bool b = bit_buffer_ & 1;
    bit_buffer_ >>= 1;
    --bits_left_;
    return b;
}

double SeededSource::unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

}  // namespace addcomb
