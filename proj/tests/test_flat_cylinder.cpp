#include "doctest.h"

#include "cusp/flat_cylinder.hpp"
#include "cusp/random.hpp"

#include <cmath>
#include <numbers>

using namespace cusp::flat;

namespace {

CylinderParams make(double ell0, double tan_theta, double area, double eps) {
    return CylinderParams{ell0, std::atan(tan_theta), area, eps};
}

} // namespace

TEST_CASE("squared length") {
    const CylinderParams p = make(1.7, 0.3, 2.0, 0.05);
    CHECK(length_sq_at(p, 0.0) == doctest::Approx(1.7 * 1.7).epsilon(1e-14));
    const CylinderParams q{1.3, std::numbers::pi / 4, 1.0, 0.1};
    for (double t : {-2.0, -0.3, 0.0, 0.7, 3.0})
        CHECK(length_sq_at(q, t) == doctest::Approx(1.69 * std::cosh(2.0 * t)).epsilon(1e-12));
    // Grid search for the minimum.
    double best_t = 0.0, best = 1e300;
    for (double t = -5.0; t <= 5.0; t += 1e-4) {
        const double v = length_sq_at(p, t);
        if (v < best) {
            best = v;
            best_t = t;
        }
    }
    const double tn = 0.3;
    CHECK(best_t == doctest::Approx(0.25 * std::log(1.0 / (tn * tn))).epsilon(1e-3));
    CHECK(best == doctest::Approx(1.7 * 1.7 * std::sin(2.0 * p.theta0)).epsilon(1e-7));
}

TEST_CASE("twist parameter") {
    const CylinderParams p = make(0.8, 0.05, 3.0, 0.01);
    CHECK(twist_at(p, 0.0) == doctest::Approx(3.0 * 0.05 / 0.64).epsilon(1e-13));
    const double asym = 3.0 / (0.64 * std::sin(p.theta0) * std::cos(p.theta0));
    CHECK(twist_at(p, 25.0) == doctest::Approx(asym).epsilon(1e-9));
    double prev = twist_at(p, -10.0);
    for (double t = -10.0 + 0.01; t < 10.0; t += 0.01) {
        const double v = twist_at(p, t);
        // Increments drop below double resolution once e^-4t is tiny.
        if (std::abs(t) < 5.0) CHECK(v > prev);
        else CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("entry and exit times") {
    cusp::Rng rng(1);
    int crossings = 0;
    for (int i = 0; i < 2000; ++i) {
        const CylinderParams p = make(rng.uniform(0.3, 3.0), std::exp(rng.uniform(-9.0, 0.0)), 1.0,
                                      std::exp(rng.uniform(-7.0, 0.0)));
        const auto tt = entry_exit_times(p);
        const double s2 = std::sin(2.0 * p.theta0);
        const double b = p.eps / (p.ell0 * p.ell0 * std::pow(std::sin(p.theta0), 2));
        const double disc = b * b - 4.0 / std::pow(std::tan(p.theta0), 2);
        CHECK(tt.has_value() == (disc >= 0.0));
        CHECK(crosses(p) == (s2 <= p.eps / (p.ell0 * p.ell0)));
        if (!tt) continue;
        ++crossings;
        CHECK(tt->first <= tt->second);
        CHECK(length_sq_at(p, tt->first) == doctest::Approx(p.eps).epsilon(1e-9));
        CHECK(length_sq_at(p, tt->second) == doctest::Approx(p.eps).epsilon(1e-9));
    }
    CHECK(crossings > 200);

    // The stated example parameters sit above the threshold; eps = 0.03 crosses.
    CHECK_FALSE(entry_exit_times(make(1.0, 0.01, 1.0, 0.01)).has_value());
    const auto tt = entry_exit_times(make(1.0, 0.01, 1.0, 0.03));
    REQUIRE(tt.has_value());
    CHECK(tt->first > 0.0);
    CHECK(std::exp(2.0 * tt->first) * std::exp(2.0 * tt->second) == doctest::Approx(1e4).epsilon(1e-10));

    // Tangency: sin phi_max = eps / l0^2 with phi0 = phi_max.
    const double eps = 0.02, ell0 = 1.0;
    const CylinderParams tangent{ell0, 0.5 * std::asin(eps / (ell0 * ell0)), 1.0, eps};
    const auto tg = entry_exit_times(tangent);
    REQUIRE(tg.has_value());
    CHECK(tg->first == doctest::Approx(tg->second).epsilon(1e-5));
    CHECK(twist_difference(tangent) == doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("twist difference") {
    cusp::Rng rng(2);
    int checked = 0;
    for (int i = 0; i < 3000 && checked < 500; ++i) {
        const CylinderParams p = make(rng.uniform(0.3, 3.0), std::exp(rng.uniform(-9.0, -2.0)),
                                      rng.uniform(0.1, 10.0), std::exp(rng.uniform(-6.0, -1.0)));
        const auto tt = entry_exit_times(p);
        if (!tt) {
            CHECK_THROWS_AS(twist_difference(p), CylinderError);
            continue;
        }
        // Skip near-tangent cases, where the difference itself cancels.
        if (tt->second - tt->first < 1e-3) continue;
        ++checked;
        const double direct = twist_at(p, tt->second) - twist_at(p, tt->first);
        CHECK(twist_difference(p) == doctest::Approx(direct).epsilon(1e-9));
        CylinderParams q = p;
        q.area *= 2.0;
        CHECK(twist_difference(q) == doctest::Approx(2.0 * twist_difference(p)).epsilon(1e-14));
    }
    CHECK(checked >= 500);
}

TEST_CASE("twist against visual excursion size") {
    int valid = 0;
    for (double ell0 : {0.5, 1.0, 2.0})
        for (double eps : {1e-3, 1e-2})
            for (double lt = -4.0; lt <= -1.0 + 1e-9; lt += 0.05) {
                const CylinderParams p = make(ell0, std::pow(10.0, lt), 1.0, eps);
                if (!crosses(p)) {
                    CHECK_THROWS_AS(excursion_comparison(p), CylinderError);
                    continue;
                }
                const Comparison c = excursion_comparison(p);
                CHECK(c.ratio == doctest::Approx(twist_difference(p) / (p.area / p.eps * c.phi_max / c.phi0))
                                     .epsilon(1e-9));
                if (c.excluded) continue;
                ++valid;
                CHECK(c.ratio >= 0.1);
                CHECK(c.ratio <= 10.0);
            }
    CHECK(valid > 50);

    // Scaling l0 by k and eps by k^2 leaves eps / l0^2 and the ratio unchanged.
    const CylinderParams p = make(1.0, 1e-3, 1.0, 0.01);
    const CylinderParams q = make(3.0, 1e-3, 7.0, 0.09);
    CHECK(excursion_comparison(p).ratio == doctest::Approx(excursion_comparison(q).ratio).epsilon(1e-12));

    // Deep limit: the ratio tends to 2 sin(phi_max) / phi_max.
    const double smax = 0.01;
    const double limit = 2.0 * smax / std::asin(smax);
    const CylinderParams deep = make(1.0, 1e-8, 1.0, smax);
    CHECK(excursion_comparison(deep).ratio == doctest::Approx(limit).epsilon(1e-6));

    CHECK_THROWS_AS(excursion_comparison(make(0.5, 1e-3, 1.0, 0.5)), CylinderError);
    CHECK_THROWS_AS(length_sq_at(CylinderParams{1.0, 2.0, 1.0, 0.1}, 0.0) + crosses(CylinderParams{1.0, 2.0, 1.0, 0.1}),
                    CylinderError);
}
