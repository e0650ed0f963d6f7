#pragma once

// Continued fractions, cutting sequences, Ford circles and Farey counting for
// the modular group PSL(2,Z).

#include "cusp/hyperbolic.hpp"
#include "cusp/random.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace cusp::modular {

/// Reduced fraction p/q with q > 0.
struct Rational {
    mpz_class p = 0;
    mpz_class q = 1;

    Rational() = default;
    Rational(mpz_class num, mpz_class den); // reduces; throws on q == 0
    double to_double() const;
    std::string str() const;
    bool operator==(const Rational& o) const { return p == o.p && q == o.q; }
};

/// Exact integer 2x2 matrix of determinant one, identified with its negative.
struct ZMatrix {
    mpz_class a = 1, b = 0, c = 0, d = 1;

    static ZMatrix identity() { return {}; }
    static ZMatrix S() { return {0, -1, 1, 0}; }
    static ZMatrix T(long k = 1) { return {1, k, 0, 1}; }

    ZMatrix canonical() const;
    ZMatrix inverse() const;
    mpz_class det() const { return a * d - b * c; }
    hyp::Mobius to_mobius() const;
    bool operator==(const ZMatrix& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
};

ZMatrix operator*(const ZMatrix& x, const ZMatrix& y);

/// a0; a1, a2, ... with a_i >= 1 for i >= 1. `terminated` marks a rational
/// source whose expansion is complete, i.e. the value is exact.
struct ContinuedFraction {
    mpz_class a0 = 0;
    std::vector<std::uint64_t> coeffs;
    bool terminated = false;

    std::size_t size() const { return coeffs.size(); }
    /// Value of the truncated expansion.
    Rational value() const;
};

ContinuedFraction cf_expand(const Rational& r, std::size_t n);
/// Exact expansion of the binary value of r (a dyadic rational).
ContinuedFraction cf_expand(double r, std::size_t n);

/// First n coefficients of a uniformly distributed real in (0,1). Random bits
/// are drawn until the coefficients are certified: every real in the sampled
/// dyadic interval shares them.
ContinuedFraction sample_cf(Rng& rng, std::size_t n);

enum class Turn { L, R };

struct Run {
    Turn turn;
    std::uint64_t count;
    bool operator==(const Run& o) const { return turn == o.turn && count == o.count; }
};

using CuttingSequence = std::vector<Run>;

/// a1, a2, ... become alternating runs starting with `first` (R by default);
/// a positive a0 is emitted as a leading run of the other turn.
CuttingSequence cf_to_cutting(const ContinuedFraction& cf, Turn first = Turn::R);
/// Inverse of cf_to_cutting. Throws std::invalid_argument on non-alternating
/// runs or zero counts.
ContinuedFraction cutting_to_cf(const CuttingSequence& cs, Turn first = Turn::R);
std::string to_string(const CuttingSequence& cs);

/// Convergents p_k/q_k for k = 1..n.
std::vector<Rational> convergents(const ContinuedFraction& cf);
/// [[p_k, +-p_{k-1}], [q_k, +-q_{k-1}]] with the sign chosen for determinant one.
ZMatrix convergent_matrix(const ContinuedFraction& cf, std::size_t k);

mpz_class word_length_proxy(const ContinuedFraction& cf, std::size_t n);
std::size_t rel_length_proxy(const ContinuedFraction& cf, std::size_t n);

/// Horoball at p/q of Euclidean diameter 1/q^2 (scaled by rho); q = 0 gives Im >= 1/rho.
hyp::Horoball ford_circle(const Rational& pq, double rho = 1.0);

std::uint64_t farey_count(std::uint64_t T);
double gauss_prob(std::uint64_t k);

/// Passage of a geodesic through one horoball. `index` identifies the
/// horoball within its family; `coefficient` is the continued-fraction
/// coefficient paired with it, or 0 when not applicable.
struct ExcursionRecord {
    std::string horoball;
    std::size_t index = 0;
    std::uint64_t coefficient = 0;
    double entry = 0.0;
    double exit = 0.0;
    double value = 0.0; // horocyclic arc length between entry and exit
    double depth = 0.0; // deepest penetration past the horocycle
    bool open = false;  // never exits before the end of the trace
};

/// Complete quotients x_k = [a_k; a_{k+1}, ...] for k = 1..size, computed from
/// the available tail. Accurate to double precision except for the last few
/// entries of a non-terminated expansion.
std::vector<double> complete_quotients(const ContinuedFraction& cf);

/// Crossings of Ford circles by the geodesic ray from i to r = value(cf).
/// Ford circle k sits at the convergent p_k/q_k (k = 0 is the circle at 0)
/// and is paired with a_{k+1}. Records for k < n only; non-terminated inputs
/// need at least n + kTailGuard coefficients.
std::vector<ExcursionRecord> excursions_from_cf(const ContinuedFraction& cf, std::size_t n);
std::vector<ExcursionRecord> excursions_from_cf(double r, std::size_t n);

/// Time at which the ray from i to value(cf) passes Ford circle k most deeply
/// (or most closely, when it misses), k = 0..n-1. Increasing in k.
std::vector<double> ford_passage_times(const ContinuedFraction& cf, std::size_t n);

inline constexpr std::size_t kTailGuard = 40;

/// Time parameter of z along the unit-speed geodesic from i to r.
double geodesic_time(double r, hyp::Complex z);

} // namespace cusp::modular
