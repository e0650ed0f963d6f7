#include "cusp/modular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cusp::modular {

Rational::Rational(mpz_class num, mpz_class den) : p(std::move(num)), q(std::move(den)) {
    if (q == 0) throw std::invalid_argument("Rational: zero denominator");
    if (q < 0) {
        p = -p;
        q = -q;
    }
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    if (g > 1) {
        p /= g;
        q /= g;
    }
}

double Rational::to_double() const {
    mpq_class v(p, q);
    return v.get_d();
}

std::string Rational::str() const { return p.get_str() + "/" + q.get_str(); }

ZMatrix ZMatrix::canonical() const {
    for (const mpz_class* x : {&a, &b, &c, &d}) {
        const int s = sgn(*x);
        if (s > 0) return *this;
        if (s < 0) return ZMatrix{-a, -b, -c, -d};
    }
    return *this;
}

ZMatrix ZMatrix::inverse() const { return ZMatrix{d, -b, -c, a}.canonical(); }

hyp::Mobius ZMatrix::to_mobius() const {
    return hyp::Mobius{a.get_d(), b.get_d(), c.get_d(), d.get_d()}.canonical();
}

ZMatrix operator*(const ZMatrix& x, const ZMatrix& y) {
    return ZMatrix{x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                   x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d}
        .canonical();
}

Rational ContinuedFraction::value() const {
    mpz_class p = 1, q = 0; // evaluated back to front as a Mobius composition
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        // x -> a + 1/x applied to p/q gives (a p + q)/p
        mpz_class np = mpz_class(static_cast<unsigned long>(*it)) * p + q;
        q = p;
        p = np;
    }
    // r = a0 + q/p; with no coefficients p = 1, q = 0.
    return Rational(a0 * p + q, p);
}

namespace {

std::uint64_t to_u64(const mpz_class& x) {
    if (!x.fits_ulong_p()) throw std::overflow_error("continued fraction coefficient exceeds 64 bits");
    return x.get_ui();
}

// Euclid on num/den, at most n coefficients after a0.
ContinuedFraction euclid(mpz_class num, mpz_class den, std::size_t n) {
    ContinuedFraction cf;
    mpz_fdiv_qr(cf.a0.get_mpz_t(), num.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    // now num is the remainder in [0, den)
    mpz_class a;
    while (cf.coeffs.size() < n && num != 0) {
        mpz_fdiv_qr(a.get_mpz_t(), den.get_mpz_t(), den.get_mpz_t(), num.get_mpz_t());
        cf.coeffs.push_back(to_u64(a));
        std::swap(num, den);
    }
    cf.terminated = (num == 0);
    return cf;
}

} // namespace

ContinuedFraction cf_expand(const Rational& r, std::size_t n) { return euclid(r.p, r.q, n); }

ContinuedFraction cf_expand(double r, std::size_t n) {
    if (!std::isfinite(r)) throw std::invalid_argument("cf_expand: non-finite input");
    int e = 0;
    const double f = std::frexp(r, &e);
    mpz_class mant(std::ldexp(f, 53));
    mpz_class den = 1;
    const int shift = e - 53;
    if (shift >= 0)
        mant <<= static_cast<unsigned>(shift);
    else
        den <<= static_cast<unsigned>(-shift);
    return cf_expand(Rational(mant, den), n);
}

ContinuedFraction sample_cf(Rng& rng, std::size_t n) {
    mpz_class num = 0;
    std::size_t bits = 0;
    auto add_bits = [&](std::size_t count) {
        for (std::size_t i = 0; i < count; i += 64) {
            num <<= 64;
            const std::uint64_t chunk = rng.bits();
            num += mpz_class(static_cast<unsigned long>(chunk));
            bits += 64;
        }
    };
    // About 3.42 bits are consumed per coefficient on average.
    add_bits(64 + 4 * n);
    for (;;) {
        mpz_class den = 1;
        den <<= bits;
        const ContinuedFraction lo = euclid(num, den, n + 1);
        const ContinuedFraction hi = euclid(num + 1, den, n + 1);
        std::size_t valid = 0;
        while (valid < lo.size() && valid < hi.size() && lo.coeffs[valid] == hi.coeffs[valid]) ++valid;
        // The last coefficient of a finite expansion is ambiguous for nearby reals.
        if (lo.terminated) valid = std::min(valid, lo.size() == 0 ? 0 : lo.size() - 1);
        if (hi.terminated) valid = std::min(valid, hi.size() == 0 ? 0 : hi.size() - 1);
        if (valid >= n) {
            ContinuedFraction out;
            out.coeffs.assign(lo.coeffs.begin(), lo.coeffs.begin() + static_cast<std::ptrdiff_t>(n));
            return out;
        }
        add_bits(64 + 4 * (n - valid));
    }
}

CuttingSequence cf_to_cutting(const ContinuedFraction& cf, Turn first) {
    if (cf.a0 < 0) throw std::invalid_argument("cf_to_cutting: negative a0");
    const Turn other = first == Turn::R ? Turn::L : Turn::R;
    CuttingSequence cs;
    if (cf.a0 > 0) cs.push_back({other, to_u64(cf.a0)});
    Turn t = first;
    for (std::uint64_t a : cf.coeffs) {
        if (a == 0) throw std::invalid_argument("cf_to_cutting: zero coefficient");
        cs.push_back({t, a});
        t = t == Turn::R ? Turn::L : Turn::R;
    }
    return cs;
}

ContinuedFraction cutting_to_cf(const CuttingSequence& cs, Turn first) {
    for (const Run& run : cs)
        if (run.count == 0) throw std::invalid_argument("cutting_to_cf: empty run");
    ContinuedFraction cf;
    std::size_t i = 0;
    if (!cs.empty() && cs[0].turn != first) {
        cf.a0 = static_cast<unsigned long>(cs[0].count);
        i = 1;
    }
    for (std::size_t k = 0; i < cs.size(); ++i, ++k) {
        const Turn expected = (k % 2 == 0) ? first : (first == Turn::R ? Turn::L : Turn::R);
        if (cs[i].turn != expected) throw std::invalid_argument("cutting_to_cf: runs must alternate");
        cf.coeffs.push_back(cs[i].count);
    }
    return cf;
}

std::string to_string(const CuttingSequence& cs) {
    std::string out;
    for (const Run& r : cs) {
        if (!out.empty()) out += ' ';
        out += (r.turn == Turn::R ? 'R' : 'L');
        out += std::to_string(r.count);
    }
    return out;
}

std::vector<Rational> convergents(const ContinuedFraction& cf) {
    std::vector<Rational> out;
    out.reserve(cf.size());
    mpz_class p_prev = 1, q_prev = 0, p = cf.a0, q = 1;
    for (std::uint64_t a : cf.coeffs) {
        const mpz_class ma(static_cast<unsigned long>(a));
        mpz_class np = ma * p + p_prev, nq = ma * q + q_prev;
        p_prev = std::move(p);
        q_prev = std::move(q);
        p = std::move(np);
        q = std::move(nq);
        Rational r;
        r.p = p;
        r.q = q;
        out.push_back(std::move(r));
    }
    return out;
}

ZMatrix convergent_matrix(const ContinuedFraction& cf, std::size_t k) {
    if (k > cf.size()) throw std::out_of_range("convergent_matrix: index beyond expansion");
    mpz_class p_prev = 1, q_prev = 0, p = cf.a0, q = 1;
    for (std::size_t i = 0; i < k; ++i) {
        const mpz_class ma(static_cast<unsigned long>(cf.coeffs[i]));
        mpz_class np = ma * p + p_prev, nq = ma * q + q_prev;
        p_prev = std::move(p);
        q_prev = std::move(q);
        p = std::move(np);
        q = std::move(nq);
    }
    if (p * q_prev - p_prev * q == 1) return ZMatrix{p, p_prev, q, q_prev}.canonical();
    return ZMatrix{p, -p_prev, q, -q_prev}.canonical();
}

mpz_class word_length_proxy(const ContinuedFraction& cf, std::size_t n) {
    if (n > cf.size()) throw std::out_of_range("word_length_proxy: prefix longer than expansion");
    mpz_class s = 0;
    for (std::size_t i = 0; i < n; ++i) s += static_cast<unsigned long>(cf.coeffs[i]);
    return s;
}

std::size_t rel_length_proxy(const ContinuedFraction& cf, std::size_t n) {
    if (n > cf.size()) throw std::out_of_range("rel_length_proxy: prefix longer than expansion");
    return n;
}

hyp::Horoball ford_circle(const Rational& pq, double rho) {
    if (pq.q == 0) return hyp::Horoball::at_infinity(1.0 / rho);
    const double q = pq.q.get_d();
    return hyp::Horoball::at(pq.to_double(), rho / (q * q));
}

std::uint64_t farey_count(std::uint64_t T) {
    if (T == 0) throw std::invalid_argument("farey_count: T must be positive");
    std::vector<std::uint64_t> phi(T + 1);
    for (std::uint64_t i = 0; i <= T; ++i) phi[i] = i;
    for (std::uint64_t i = 2; i <= T; ++i) {
        if (phi[i] != i) continue; // composite
        for (std::uint64_t j = i; j <= T; j += i) phi[j] -= phi[j] / i;
    }
    std::uint64_t total = 0;
    for (std::uint64_t q = 1; q <= T; ++q) total += phi[q];
    return total;
}

double gauss_prob(std::uint64_t k) {
    if (k == 0) throw std::invalid_argument("gauss_prob: k must be positive");
    const double kk = static_cast<double>(k);
    return std::log1p(1.0 / (kk * (kk + 2.0))) / std::numbers::ln2;
}

std::vector<double> complete_quotients(const ContinuedFraction& cf) {
    std::vector<double> x(cf.size());
    double tail = 0.0; // 1 / x_{k+1}
    for (std::size_t k = cf.size(); k-- > 0;) {
        x[k] = static_cast<double>(cf.coeffs[k]) + tail;
        tail = 1.0 / x[k];
    }
    return x;
}

double geodesic_time(double r, hyp::Complex z) {
    return std::log(std::abs(z + 1.0 / r) / std::abs(z - r)) + std::log(r);
}

namespace {

// Calls f(k, radius, top) for Ford circles k = 0..n-1, where radius is the
// geodesic radius in the frame normalizing circle k to Im >= 1 (crossing iff
// radius > 1) and top is the time of the highest point in that frame.
template <class F>
void for_each_ford(const ContinuedFraction& cf, std::size_t n, const char* who, F&& f) {
    if (cf.a0 != 0) throw std::invalid_argument(std::string(who) + ": endpoint must lie in (0,1)");
    if (n > cf.size() || (!cf.terminated && cf.size() < n + kTailGuard))
        throw std::invalid_argument(std::string(who) + ": not enough coefficients for the requested count");
    if (n == 0) return;
    const std::vector<double> x = complete_quotients(cf);
    const double r = 1.0 / x[0];

    // Convergent data scaled by q_k: P = p_k/q_k, P1 = p_{k-1}/q_k, Q1 = q_{k-1}/q_k.
    double P = 0.0, P1 = 1.0, Q1 = 0.0;
    double log_q = 0.0;
    double log_x_sum = 0.0; // sum_{j <= k+1} log x_j = log(e_0/e_{k+1})
    for (std::size_t k = 0; k < n; ++k) {
        const double xn = x[k];
        log_x_sum += std::log(xn);
        // Normalized frame: geodesic endpoints -|u| and x_{k+1}, horoball Im >= 1.
        const double u = (Q1 + P1 * r) / (1.0 + P * r);
        f(k, 0.5 * (xn + u), log_x_sum + log_q + std::log1p(r * P));
        // advance to convergent k+1
        const double a = static_cast<double>(cf.coeffs[k]);
        const double np = a * P + P1, nq = a + Q1;
        P1 = P / nq;
        Q1 = 1.0 / nq;
        P = np / nq;
        log_q += std::log(nq);
    }
}

} // namespace

std::vector<ExcursionRecord> excursions_from_cf(const ContinuedFraction& cf, std::size_t n) {
    std::vector<ExcursionRecord> out;
    for_each_ford(cf, n, "excursions_from_cf", [&](std::size_t k, double radius, double top) {
        if (radius <= 1.0) return;
        const double half = std::acosh(radius);
        ExcursionRecord rec;
        rec.horoball = "ford[" + std::to_string(k) + "]";
        rec.index = k;
        rec.coefficient = cf.coeffs[k];
        rec.entry = top - half;
        rec.exit = top + half;
        rec.value = 2.0 * std::sqrt((radius - 1.0) * (radius + 1.0));
        rec.depth = std::log(radius);
        out.push_back(std::move(rec));
    });
    return out;
}

std::vector<double> ford_passage_times(const ContinuedFraction& cf, std::size_t n) {
    std::vector<double> out;
    for_each_ford(cf, n, "ford_passage_times", [&](std::size_t, double, double top) { out.push_back(top); });
    return out;
}

std::vector<ExcursionRecord> excursions_from_cf(double r, std::size_t n) {
    const ContinuedFraction cf = cf_expand(r, n + kTailGuard);
    return excursions_from_cf(cf, cf.terminated ? std::min(n, cf.size()) : n);
}

} // namespace cusp::modular
