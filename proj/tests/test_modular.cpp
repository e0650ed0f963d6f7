#include "doctest.h"

#include "cusp/modular.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

using namespace cusp::modular;
namespace hyp = cusp::hyp;

namespace {

ContinuedFraction make_cf(std::vector<std::uint64_t> coeffs, bool terminated = false) {
    ContinuedFraction cf;
    cf.coeffs = std::move(coeffs);
    cf.terminated = terminated;
    return cf;
}

std::uint64_t farey_brute(std::uint64_t T) {
    std::uint64_t n = 0;
    for (std::uint64_t q = 1; q <= T; ++q)
        for (std::uint64_t p = 1; p <= q; ++p)
            if (std::gcd(p, q) == 1) ++n;
    return n;
}

} // namespace

TEST_CASE("cf_expand on rationals and quadratic irrationals") {
    const ContinuedFraction a = cf_expand(Rational(2, 7), 10);
    CHECK(a.a0 == 0);
    CHECK(a.coeffs == std::vector<std::uint64_t>{3, 2});
    CHECK(a.terminated);
    CHECK(cf_expand(Rational(1, 3), 10).coeffs == std::vector<std::uint64_t>{3});
    CHECK(cf_expand(Rational(-7, 3), 10).a0 == -3);

    // sqrt(2) - 1 to 60 digits: x = 1/(2 + x) forces every coefficient to be 2.
    mpz_class scale, root;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, 60);
    mpz_class sq = 2 * scale * scale;
    mpz_sqrt(root.get_mpz_t(), sq.get_mpz_t());
    const ContinuedFraction s2 = cf_expand(Rational(root - scale, scale), 70);
    REQUIRE(s2.size() == 70);
    for (std::uint64_t c : s2.coeffs) CHECK(c == 2);

    const ContinuedFraction d = cf_expand(0.375, 10);
    CHECK(d.coeffs == std::vector<std::uint64_t>{2, 1, 2});
}

TEST_CASE("convergents and approximation bound") {
    const auto conv = convergents(make_cf({3, 2}));
    REQUIRE(conv.size() == 2);
    CHECK(conv[0] == Rational(1, 3));
    CHECK(conv[1] == Rational(2, 7));
    CHECK(convergents(make_cf({1}))[0] == Rational(1, 1));

    cusp::Rng rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const ContinuedFraction cf = sample_cf(rng, 60);
        const mpq_class r(cf.value().p, cf.value().q);
        const auto cv = convergents(cf);
        for (std::size_t k = 0; k + 1 < cv.size(); ++k) {
            const mpq_class approx(cv[k].p, cv[k].q);
            mpq_class err = r - approx;
            if (err < 0) err = -err;
            CHECK(err * cv[k].q * cv[k].q < 1);
        }
        for (std::size_t k = 0; k <= 10; ++k) CHECK(convergent_matrix(cf, k).det() == 1);
    }
}

TEST_CASE("cutting sequences") {
    const CuttingSequence cs = cf_to_cutting(make_cf({3, 2}));
    CHECK(to_string(cs) == "R3 L2");
    CHECK(cf_to_cutting(ContinuedFraction{}).empty());
    CHECK(cutting_to_cf({}).coeffs.empty());
    CHECK_THROWS_AS(cutting_to_cf({{Turn::R, 1}, {Turn::R, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(cutting_to_cf({{Turn::R, 0}}), std::invalid_argument);
    CHECK(to_string(cf_to_cutting(make_cf({3, 2}), Turn::L)) == "L3 R2");

    ContinuedFraction with_a0 = make_cf({4, 1});
    with_a0.a0 = 2;
    const ContinuedFraction back = cutting_to_cf(cf_to_cutting(with_a0));
    CHECK(back.a0 == 2);
    CHECK(back.coeffs == with_a0.coeffs);

    cusp::Rng rng(43);
    for (int trial = 0; trial < 1000; ++trial) {
        const ContinuedFraction cf = sample_cf(rng, 1 + rng.bits() % 20);
        const ContinuedFraction rt = cutting_to_cf(cf_to_cutting(cf));
        CHECK(rt.coeffs == cf.coeffs);
        CHECK(rt.a0 == cf.a0);
    }
}

TEST_CASE("length proxies") {
    const ContinuedFraction cf = make_cf({3, 2});
    CHECK(word_length_proxy(cf, 2) == 5);
    CHECK(rel_length_proxy(cf, 2) == 2);
    CHECK(word_length_proxy(make_cf({1}), 1) == 1);
    CHECK(rel_length_proxy(ContinuedFraction{}, 0) == 0);
    CHECK_THROWS(word_length_proxy(cf, 3));
}

TEST_CASE("Ford circles") {
    const hyp::Horoball f0 = ford_circle(Rational(0, 1));
    CHECK(f0.base.x == 0.0);
    CHECK(f0.size == 1.0);
    const hyp::Horoball img = hyp::Horoball::at_infinity(1.0).transformed(hyp::Mobius{0, -1, 1, 0});
    CHECK(img.base.x == doctest::Approx(0.0));
    CHECK(img.size == doctest::Approx(1.0));

    const hyp::Horoball half = ford_circle(Rational(1, 2));
    CHECK(half.size == 0.25);
    const hyp::Horoball img2 = hyp::Horoball::at_infinity(1.0).transformed(hyp::Mobius{1, 0, 2, 1});
    CHECK(img2.base.x == doctest::Approx(0.5));
    CHECK(img2.size == doctest::Approx(0.25));

    // All circles with q <= 50: never overlapping, tangent exactly for Farey neighbours.
    std::vector<std::pair<long, long>> fr;
    for (long q = 1; q <= 50; ++q)
        for (long p = 0; p <= q; ++p)
            if (std::gcd(p, q) == 1) fr.emplace_back(p, q);
    int tangent_pairs = 0;
    for (std::size_t i = 0; i < fr.size(); ++i) {
        const double x1 = double(fr[i].first) / fr[i].second, r1 = 0.5 / (double(fr[i].second) * fr[i].second);
        for (std::size_t j = i + 1; j < fr.size(); ++j) {
            const double x2 = double(fr[j].first) / fr[j].second;
            const double r2 = 0.5 / (double(fr[j].second) * fr[j].second);
            const double dist = std::hypot(x1 - x2, r1 - r2);
            const double gap = dist - (r1 + r2);
            CHECK(gap >= -1e-12);
            if (std::labs(fr[i].first * fr[j].second - fr[j].first * fr[i].second) == 1) {
                CHECK(std::abs(gap) < 1e-12);
                ++tangent_pairs;
            }
        }
    }
    CHECK(tangent_pairs > 0);
}

TEST_CASE("Farey counting") {
    CHECK(farey_count(1) == 1);
    CHECK(farey_count(5) == 10);
    for (std::uint64_t T = 1; T <= 200; ++T) CHECK(farey_count(T) == farey_brute(T));
    const double ratio = double(farey_count(500)) / (500.0 * 500.0);
    const double target = 3.0 / (std::numbers::pi * std::numbers::pi);
    CHECK(std::abs(ratio - target) / target < 0.05);
}

TEST_CASE("Gauss probabilities") {
    CHECK(gauss_prob(1) == doctest::Approx(std::log2(4.0 / 3.0)).epsilon(1e-14));
    CHECK(gauss_prob(1) == doctest::Approx(0.41504).epsilon(1e-4));
    CHECK(gauss_prob(3) == doctest::Approx(std::log2(16.0 / 15.0)).epsilon(1e-14));
    CHECK(gauss_prob(3) == doctest::Approx(0.09311).epsilon(1e-4));
    double sum = 0.0;
    const std::uint64_t K = 1000000;
    for (std::uint64_t k = K; k >= 1; --k) sum += gauss_prob(k);
    // The product of (k+1)^2/(k(k+2)) telescopes, so the tail beyond K is log2((K+2)/(K+1)).
    sum += std::log2(double(K + 2) / double(K + 1));
    CHECK(std::abs(sum - 1.0) < 1e-9);
    CHECK_THROWS(gauss_prob(0));
}

TEST_CASE("sample_cf is deterministic and roughly Gauss distributed") {
    cusp::Rng a(7), b(7);
    const ContinuedFraction x = sample_cf(a, 200), y = sample_cf(b, 200);
    CHECK(x.coeffs == y.coeffs);
    CHECK(x.size() == 200);

    cusp::Rng rng(9);
    std::map<std::uint64_t, double> freq;
    std::size_t total = 0;
    for (int s = 0; s < 200; ++s) {
        const ContinuedFraction cf = sample_cf(rng, 200);
        for (std::uint64_t c : cf.coeffs) {
            freq[c] += 1.0;
            ++total;
        }
    }
    for (std::uint64_t k = 1; k <= 3; ++k) CHECK(std::abs(freq[k] / double(total) - gauss_prob(k)) < 0.02);
}

TEST_CASE("excursions from continued fractions match direct geometry") {
    cusp::Rng rng(47);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 7;
        const ContinuedFraction cf = sample_cf(rng, n + kTailGuard);
        const auto conv = convergents(cf);
        if (conv[n - 2].q > 400) continue; // keep the brute-force enumeration small
        const double r = 1.0 / complete_quotients(cf)[0];
        const auto records = excursions_from_cf(cf, n);

        // Brute force: every Ford circle p/q in [0,1] with q <= q_{n-1}.
        const long qmax = conv[n - 2].q.get_si();
        const hyp::Geodesic g(hyp::Complex(0, 1), hyp::BoundaryPoint::at(r));
        std::vector<hyp::EntryExit> hits;
        for (long q = 1; q <= qmax; ++q)
            for (long p = 0; p <= q; ++p) {
                if (std::gcd(p, q) != 1) continue;
                const hyp::EntryExit ee = hyp::entry_exit(g, ford_circle(Rational(p, q)));
                if (ee.kind == hyp::Passage::crossing) hits.push_back(ee);
            }
        REQUIRE(hits.size() == records.size());
        std::sort(hits.begin(), hits.end(), [](auto& u, auto& v) { return u.entry < v.entry; });
        for (std::size_t i = 0; i < hits.size(); ++i) {
            CHECK(std::abs(hits[i].entry - records[i].entry) < 1e-8);
            CHECK(std::abs(hits[i].exit - records[i].exit) < 1e-8);
            CHECK(std::abs(2.0 * std::sinh(0.5 * (hits[i].exit - hits[i].entry)) - records[i].value) < 1e-7);
            CHECK(std::abs(geodesic_time(r, g.at(records[i].entry)) - records[i].entry) < 1e-8);
        }
        ++checked;
    }
    CHECK(checked >= 10);
}

TEST_CASE("excursion values track coefficients") {
    // Golden ratio: every coefficient 1, excursions uniformly bounded.
    const ContinuedFraction golden = make_cf(std::vector<std::uint64_t>(200 + kTailGuard, 1));
    for (const auto& rec : excursions_from_cf(golden, 200)) CHECK(rec.value < 2.0);

    cusp::Rng rng(53);
    std::vector<double> e, a;
    for (int s = 0; s < 150; ++s) {
        const ContinuedFraction cf = sample_cf(rng, 10 + kTailGuard);
        for (const auto& rec : excursions_from_cf(cf, 10)) {
            CHECK(rec.entry <= rec.exit);
            CHECK(rec.value > 0.0);
            e.push_back(rec.value);
            a.push_back(double(rec.coefficient));
        }
    }
    REQUIRE(e.size() >= 1000);
    // Least-squares slope through the origin, then the worst residual.
    double sea = 0, saa = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        sea += e[i] * a[i];
        saa += a[i] * a[i];
    }
    const double c = sea / saa;
    double worst = 0;
    for (std::size_t i = 0; i < e.size(); ++i) worst = std::max(worst, std::abs(e[i] - c * a[i]));
    CHECK(c == doctest::Approx(1.0).epsilon(0.1));
    CHECK(worst <= 3.0);
}

TEST_CASE("non-crossing coefficients produce no records") {
    // [0; 5, 1, 5, 1, ...]: a coefficient 1 following a 5 gives radius (x + u)/2 < 1.
    std::vector<std::uint64_t> c;
    for (std::size_t i = 0; i < 50 + kTailGuard; ++i) c.push_back(i % 2 == 0 ? 5 : 1);
    const auto recs = excursions_from_cf(make_cf(c), 50);
    CHECK(recs.size() == 25);
    for (const auto& rec : recs) {
        CHECK(rec.coefficient == 5);
        CHECK(rec.value > 0.0);
    }
}

TEST_CASE("Ford passage times") {
    cusp::Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const ContinuedFraction cf = sample_cf(rng, 200 + kTailGuard);
        const auto times = ford_passage_times(cf, 200);
        REQUIRE(times.size() == 200);
        for (std::size_t k = 1; k < times.size(); ++k) CHECK(times[k] > times[k - 1]);
        for (const auto& rec : excursions_from_cf(cf, 200)) {
            CHECK(rec.entry < times[rec.index]);
            CHECK(rec.exit > times[rec.index]);
            CHECK(0.5 * (rec.entry + rec.exit) == doctest::Approx(times[rec.index]).epsilon(1e-12));
        }
        // Lengths grow like twice log q_k.
        const double log_q = std::log(convergents(cf).at(199).q.get_d());
        CHECK(std::abs(times[199] - 2.0 * log_q) < 2.0 + std::log(static_cast<double>(cf.coeffs[199])) + 1.0);
    }
}
