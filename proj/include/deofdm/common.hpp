#ifndef DEOFDM_COMMON_HPP
#define DEOFDM_COMMON_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace deofdm {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

// Floor standing in for log(0) in NORMALIZED log-probability vectors. Close
// to log of the smallest positive double, so exp() of a floored value
// underflows cleanly to 0 and differences of floored values stay bounded.
// Unnormalized accumulations (evidences, pre-normalization recursions) are
// plain log-domain arithmetic and may sit far below this value.
constexpr double kLogZero = -745.0;

inline double log_floor(double x) { return x < kLogZero ? kLogZero : x; }

// log(exp(a) + exp(b)), exact for arbitrary magnitudes including -inf.
inline double log_sum_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    const double d = a - b;  // a >= b; NaN when both are -inf
    if (!(d <= 745.0)) return a;
    return a + std::log1p(std::exp(-d));
}

inline double log_sum_exp(const double* v, size_t n) {
    double m = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i)
        if (v[i] > m) m = v[i];
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += std::exp(v[i] - m);
    return m + std::log(s);
}

inline double log_sum_exp(const std::vector<double>& v) {
    return log_sum_exp(v.data(), v.size());
}

// In-place: subtract log-sum so entries sum to 1 in linear domain.
// Returns the subtracted constant.
inline double normalize_log(double* v, size_t n) {
    const double z = log_sum_exp(v, n);
    for (size_t i = 0; i < n; ++i) v[i] = log_floor(v[i] - z);
    return z;
}

// --------------------------------------------------------------------------
// Deterministic PRNG. xoshiro256++ seeded through splitmix64, with our own
// Gaussian sampler so that every stream is bit-exact for a given seed
// regardless of the standard library.
// --------------------------------------------------------------------------

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hash-combines a seed with a stream tag; used to derive independent
// per-trial and per-purpose streams from one master seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t tag) {
    uint64_t s = seed ^ (0x2545f4914f6cdd1dULL * (tag + 1));
    uint64_t a = splitmix64(s);
    uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

class Rng {
public:
    explicit Rng(uint64_t seed = 0) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1). 53-bit resolution.
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound). Rejection-free enough for bound << 2^64.
    uint64_t bounded(uint64_t bound) {
        // Lemire's multiply-shift with rejection for exactness.
        uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        uint64_t lo = static_cast<uint64_t>(m);
        if (lo < bound) {
            uint64_t t = (-bound) % bound;
            while (lo < t) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    int bit() { return static_cast<int>(next_u64() >> 63); }

    // Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    // Circularly symmetric complex Gaussian with E|z|^2 = sigma2.
    cplx cgaussian(double sigma2) {
        const double s = std::sqrt(sigma2 * 0.5);
        return {s * gaussian(), s * gaussian()};
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// --------------------------------------------------------------------------
// SymbolGrid: complex matrix indexed (subcarrier row m, OFDM symbol column n).
// Column-major storage so per-OFDM-symbol columns are contiguous.
// --------------------------------------------------------------------------

struct SymbolGrid {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<cplx> v;

    SymbolGrid() = default;
    SymbolGrid(size_t r, size_t c, cplx fill = {0.0, 0.0})
        : rows(r), cols(c), v(r * c, fill) {}

    cplx& at(size_t m, size_t n) { return v[n * rows + m]; }
    const cplx& at(size_t m, size_t n) const { return v[n * rows + m]; }

    cplx* col(size_t n) { return v.data() + n * rows; }
    const cplx* col(size_t n) const { return v.data() + n * rows; }
};

// --------------------------------------------------------------------------
// SoftSeq: a sequence of normalized log-probability vectors, one per
// position. arity is 2 for bit messages and Q for symbol messages.
// --------------------------------------------------------------------------

struct SoftSeq {
    int arity = 2;
    size_t len = 0;
    std::vector<double> logp;  // len * arity, position-major

    SoftSeq() = default;
    SoftSeq(int a, size_t n, double fill) : arity(a), len(n), logp(n * a, fill) {}

    static SoftSeq uniform(int a, size_t n) {
        return SoftSeq(a, n, -std::log(static_cast<double>(a)));
    }

    double* at(size_t pos) { return logp.data() + pos * arity; }
    const double* at(size_t pos) const { return logp.data() + pos * arity; }

    void normalize_all() {
        for (size_t t = 0; t < len; ++t) normalize_log(at(t), arity);
    }

    // Hard decision per position.
    std::vector<int> harden() const {
        std::vector<int> out(len);
        for (size_t t = 0; t < len; ++t) {
            const double* p = at(t);
            int best = 0;
            for (int k = 1; k < arity; ++k)
                if (p[k] > p[best]) best = k;
            out[t] = best;
        }
        return out;
    }
};

using BitVec = std::vector<uint8_t>;

}  // namespace deofdm

#endif
