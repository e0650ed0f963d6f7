#include "doctest.h"

#include "cusp/flow.hpp"
#include "cusp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

using namespace cusp::flow;
namespace hyp = cusp::hyp;
namespace modular = cusp::modular;
namespace group = cusp::group;

namespace {

ContinuedFraction constant_cf(std::uint64_t a, std::size_t n) {
    ContinuedFraction cf;
    cf.coeffs.assign(n, a);
    return cf;
}

ExcursionRecord excursion(double entry, double depth) {
    ExcursionRecord rec;
    rec.depth = depth;
    const double half = std::acosh(std::exp(depth));
    rec.entry = entry;
    rec.exit = entry + 2.0 * half;
    rec.value = 2.0 * std::sinh(half);
    return rec;
}

} // namespace

TEST_CASE("boundary sampling") {
    CHECK(sample_boundary(17).x == sample_boundary(17).x);
    CHECK(sample_disc_angle(17) == sample_disc_angle(17));
    CHECK(sample_boundary(17).x != sample_boundary(18).x);
    std::vector<double> xs;
    for (std::uint64_t s = 0; s < 1000000; ++s) xs.push_back(sample_boundary(cusp::derive_seed(99, s)).x);
    CHECK(cusp::stats::ks_uniform(xs) < 0.002);
    CHECK(*std::min_element(xs.begin(), xs.end()) > 0.0);
    CHECK(*std::max_element(xs.begin(), xs.end()) < 1.0);
    // Disjoint streams: the first 10^4 draws of two seeds share no value.
    cusp::Rng a(1), b(2);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 10000; ++i) seen.insert(a.bits());
    int shared = 0;
    for (int i = 0; i < 10000; ++i) shared += static_cast<int>(seen.count(b.bits()));
    CHECK(shared == 0);
}

TEST_CASE("trajectory proxies") {
    const ContinuedFraction cf = modular::cf_expand(2.0 / 7.0 + 1e-9, 200);
    REQUIRE(cf.coeffs.at(0) == 3);
    REQUIRE(cf.coeffs.at(1) == 2);
    const TrajectorySummary s = run_geodesic(cf, {1, 2, 5, 20});
    CHECK(s.checkpoints[0].word_proxy == 3);
    CHECK(s.checkpoints[1].word_proxy == 5);
    CHECK(s.checkpoints[1].rel_proxy == 2);
    for (std::size_t i = 1; i < s.checkpoints.size(); ++i) {
        CHECK(s.checkpoints[i].time > s.checkpoints[i - 1].time);
        CHECK(s.checkpoints[i].word_proxy >= s.checkpoints[i - 1].word_proxy);
        CHECK(s.checkpoints[i].rel_proxy > s.checkpoints[i - 1].rel_proxy);
        CHECK(s.checkpoints[i].max_depth >= s.checkpoints[i - 1].max_depth);
    }
    CHECK(run_geodesic(cf, {}).records.empty());
    CHECK(psi_average(s.records, 0.0) == 0.0);
    CHECK_THROWS_AS(run_geodesic(cf, {3, 3}), std::invalid_argument);

    // Same seed, same summary.
    const TrajectorySummary x = run_geodesic(5, {10, 100}), y = run_geodesic(5, {10, 100});
    CHECK(x.r == y.r);
    REQUIRE(x.records.size() == y.records.size());
    for (std::size_t i = 0; i < x.records.size(); ++i) CHECK(x.records[i].entry == y.records[i].entry);
    CHECK(x.checkpoints[1].psi_avg == y.checkpoints[1].psi_avg);
}

TEST_CASE("psi values") {
    CHECK(psi_value(0.0) == 0.0);
    CHECK(psi_value(0.5) == 0.0);
    CHECK(psi_value(std::log(2.0)) == 2.0);
    CHECK(psi_value(std::log(3.0)) == 2.0);
    CHECK(psi_value(std::log(4.0)) == 6.0);
    CHECK(psi_value(std::log(5.0)) == 6.0);
    CHECK(psi_value(10.0 * std::log(2.0)) == 2046.0);
    CHECK(psi_value(-1.0) == 0.0);
}

TEST_CASE("psi integrals") {
    CHECK(psi_integral({}, 100.0) == 0.0);
    CHECK(max_depth({}, 100.0) == 0.0);

    // One excursion of depth log 2^N contributes a bounded multiple of 2^N.
    double prev = 0.0;
    for (int N = 2; N <= 24; ++N) {
        const ExcursionRecord rec = excursion(3.0, N * std::log(2.0));
        const double ratio = psi_excursion_integral(rec, 0.0, 1e9) / std::ldexp(1.0, N);
        CHECK(ratio > 1.0);
        CHECK(ratio < 8.0);
        if (N >= 16) CHECK(ratio == doctest::Approx(prev).epsilon(1e-3));
        prev = ratio;
    }

    // Exact integration against a fine Riemann sum, and additivity.
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const TrajectorySummary s = run_geodesic(seed, {60});
        const double T = s.checkpoints[0].time;
        double sum = 0.0;
        for (const auto& rec : s.records) sum += psi_excursion_integral(rec, 0.0, T);
        CHECK(psi_integral(s.records, T) == doctest::Approx(sum).epsilon(1e-12));
        const double sampled = psi_integral_sampled(s.records, T, 1e-4);
        CHECK(sampled == doctest::Approx(psi_integral(s.records, T)).epsilon(2e-3));
        // Clipping at an arbitrary time inside an excursion.
        const auto& rec = s.records.at(s.records.size() / 2);
        const double cut = 0.3 * rec.entry + 0.7 * rec.exit;
        CHECK(psi_excursion_integral(rec, 0.0, cut) + psi_excursion_integral(rec, cut, T) ==
              doctest::Approx(psi_excursion_integral(rec, 0.0, T)).epsilon(1e-12));
    }
}

TEST_CASE("max depth and coefficient sizes") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const TrajectorySummary s = run_geodesic(seed, {300});
        for (const auto& rec : s.records) {
            if (rec.coefficient < 8) continue;
            ++checked;
            CHECK(std::abs(rec.depth - std::log(static_cast<double>(rec.coefficient))) < 1.5);
        }
        const double T = s.checkpoints[0].time;
        double deepest = 0.0;
        for (const auto& rec : s.records)
            if (rec.exit <= T) deepest = std::max(deepest, rec.depth);
        CHECK(max_depth(s.records, T) >= deepest);
        CHECK(max_depth(s.records, T) == doctest::Approx(s.checkpoints[0].max_depth));
    }
    CHECK(checked > 100);
    // Partial excursion: depth at the cut-off time.
    const ExcursionRecord rec = excursion(1.0, 3.0);
    CHECK(max_depth({rec}, 1.0) == 0.0);
    CHECK(max_depth({rec}, rec.exit + 1.0) == doctest::Approx(3.0));
    const double t = 0.5 * (rec.entry + rec.exit) - 0.4;
    CHECK(max_depth({rec}, t) == doctest::Approx(3.0 - std::log(std::cosh(0.4))));
}

TEST_CASE("Khinchin averages") {
    CHECK(khinchin_average(constant_cf(1, 500), 500) == 1.0);
    const ContinuedFraction sqrt2 = modular::cf_expand(
        modular::Rational(mpz_class("41421356237309504880168872420969807856967187537694"),
                          mpz_class("100000000000000000000000000000000000000000000000000")),
        40);
    CHECK(khinchin_average(sqrt2, 40) == 2.0);
    ContinuedFraction cf = constant_cf(1, 4);
    cf.coeffs = {1, 2, 3, 10};
    CHECK(khinchin_average(cf, 4) == 4.0);
    CHECK_THROWS_AS(khinchin_average(cf, 5), std::invalid_argument);
}

TEST_CASE("Lebesgue ratio table") {
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7};
    const auto a = lebesgue_ratio_table(seeds, {10, 100});
    const auto b = lebesgue_ratio_table(seeds, {10, 100});
    REQUIRE(a.size() == 2);
    CHECK(a[1].median == b[1].median);
    CHECK(a[0].q25 <= a[0].median);
    CHECK(a[0].median <= a[0].q75);
    // Per-seed rho is the Khinchin average of the same coefficients.
    const auto single = lebesgue_ratio_table({3}, {100});
    const TrajectorySummary s = run_geodesic(3, {100});
    CHECK(single[0].median == s.checkpoints[0].rho);
    CHECK(s.checkpoints[0].rho == khinchin_average(sample_endpoint_cf(3, 100 + modular::kTailGuard), 100));
}

TEST_CASE("time-targeted sampling") {
    const ContinuedFraction cf = sample_endpoint_cf_for_time(4, 500.0);
    const std::size_t n = cf.size() - modular::kTailGuard;
    CHECK(modular::ford_passage_times(cf, n).back() >= 500.0);
}

TEST_CASE("nearest orbit points along geodesics") {
    const group::Presentation p = group::Presentation::modular();
    const group::MetricBall ball(p, 12);
    const group::ModularLattice lattice(ball);
    const group::WordMetric metric(ball);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ContinuedFraction cf = sample_endpoint_cf(seed, 200);
        const auto track = lattice_track(lattice, metric, cf, 8.0, 0.25, 10.0);
        REQUIRE_FALSE(track.empty());
        CHECK(track.front().t == 0.0);
        for (std::size_t i = 1; i < track.size(); ++i) {
            CHECK(track[i].t > track[i - 1].t);
            CHECK(track[i].excursion_sum >= track[i - 1].excursion_sum);
            if (track[i].word) {
                REQUIRE(track[i].rel.has_value());
                CHECK(*track[i].rel <= *track[i].word);
            }
        }
    }
    // General presentation, exhaustive search.
    std::istringstream text("basepoint 0.3 1.1\ngenerator A 1 2 0 1 parabolic\ngenerator B 1 0 2 1 parabolic\n");
    const group::Presentation g2 = group::Presentation::parse(text);
    const group::MetricBall b2(g2, 7);
    const hyp::Geodesic g(g2.basepoint(), hyp::BoundaryPoint::at(0.3819660112501051));
    const auto track = lattice_track(b2, g, {0.0, 1.0, 2.0, 3.0}, 7);
    REQUIRE(track.size() == 4);
    REQUIRE(track[0].word.has_value());
    CHECK(*track[0].word == 0);
    CHECK(track[0].distance == doctest::Approx(0.0));
    for (const auto& tp : track)
        if (tp.word) CHECK(*tp.rel <= *tp.word);
}
