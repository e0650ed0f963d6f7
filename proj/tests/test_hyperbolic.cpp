#include "doctest.h"

#include "cusp/hyperbolic.hpp"
#include "cusp/random.hpp"

#include <cmath>
#include <numbers>

using namespace cusp::hyp;

namespace {

constexpr double kPi = std::numbers::pi;

Mobius random_mobius(cusp::Rng& rng) {
    for (;;) {
        const double a = 4.0 * rng.uniform() - 2.0;
        const double b = 4.0 * rng.uniform() - 2.0;
        const double c = 4.0 * rng.uniform() - 2.0;
        if (std::abs(a) < 0.2) continue;
        return Mobius::from_entries(a, b, c, (1.0 + b * c) / a);
    }
}

Complex random_point(cusp::Rng& rng) {
    return {6.0 * rng.uniform() - 3.0, 0.1 + 3.0 * rng.uniform()};
}

// Circle action read off through the chart, with no derivative formula involved.
double circle_action(const Mobius& m, const DiscChart& chart, double theta) {
    return chart.to_angle(apply(m, chart.from_angle(theta)));
}

double fd_derivative(const Mobius& m, const DiscChart& chart, double theta, double h) {
    double diff = circle_action(m, chart, theta + h) - circle_action(m, chart, theta - h);
    diff = std::remainder(diff, 2.0 * kPi);
    return std::abs(diff) / (2.0 * h);
}

} // namespace

TEST_CASE("apply on interior and boundary points") {
    const Mobius s{0, -1, 1, 0}, t{1, 1, 0, 1};
    const Complex z(0.3, 0.4);
    CHECK(std::abs(apply(Mobius::identity(), z) - z) == 0.0);
    CHECK(std::abs(apply(s, Complex(0, 1)) - Complex(0, 1)) < 1e-15);
    CHECK(std::abs(apply(t, Complex(0, 1)) - Complex(1, 1)) < 1e-15);
    CHECK(apply(s, BoundaryPoint::at(0.0)).infinite);
    CHECK(apply(t, BoundaryPoint::infinity()).infinite);
    CHECK(apply(s, BoundaryPoint::infinity()).x == 0.0);
}

TEST_CASE("compose, inverse and canonical sign") {
    const Mobius s{0, -1, 1, 0}, t{1, 1, 0, 1};
    const Mobius tt = compose(t, t);
    CHECK(tt.a == 1.0);
    CHECK(tt.b == 2.0);
    CHECK(tt.c == 0.0);
    CHECK(tt.d == 1.0);
    const Mobius si = inverse(s);
    CHECK(si.a == 0.0);
    CHECK(si.b == 1.0);
    CHECK(si.c == -1.0);
    CHECK(si.d == 0.0);
    const Mobius neg = Mobius::from_entries(-2.0, 0.0, 0.0, -0.5);
    CHECK(neg.a == doctest::Approx(2.0));
    CHECK_THROWS_AS(Mobius::from_entries(1, 0, 0, -1), GeometryError);

    cusp::Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const Mobius a = random_mobius(rng), b = random_mobius(rng), c = random_mobius(rng);
        CHECK(approx_equal(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-9));
        CHECK(approx_equal(compose(a, inverse(a)), Mobius::identity(), 1e-9));
        CHECK(approx_equal(compose(inverse(a), a), Mobius::identity(), 1e-9));
        CHECK(std::abs(a.det() - 1.0) < 1e-12);
    }
}

TEST_CASE("distances") {
    const Complex i(0, 1);
    CHECK(distance(i, i) == 0.0);
    CHECK(distance(i, std::exp(1.0) * i) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(disc_distance(0.0, 0.5) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    CHECK(disc_distance(0.0, 0.5) == doctest::Approx(2.0 * std::atanh(0.5)).epsilon(1e-14));

    cusp::Rng rng(5);
    const DiscChart chart(Complex(0.2, 0.9));
    for (int k = 0; k < 1000; ++k) {
        const Mobius m = random_mobius(rng);
        const Complex z = random_point(rng), w = random_point(rng);
        const double d = distance(z, w);
        CHECK(distance(w, z) == doctest::Approx(d).epsilon(1e-12));
        CHECK(std::abs(distance(apply(m, z), apply(m, w)) - d) < 1e-9);
        CHECK(std::abs(disc_distance(chart.to_disc(z), chart.to_disc(w)) - d) < 1e-9);
    }
}

TEST_CASE("chart round trips") {
    const DiscChart chart(Complex(0.5, 0.7));
    cusp::Rng rng(3);
    for (int k = 0; k < 1000; ++k) {
        const double theta = 2.0 * kPi * rng.uniform();
        const double back = chart.to_angle(chart.from_angle(theta));
        CHECK(std::abs(std::remainder(back - theta, 2.0 * kPi)) < 1e-12);
    }
    CHECK(chart.from_angle(0.0).infinite);
    CHECK(chart.to_angle(BoundaryPoint::infinity()) == 0.0);
    CHECK(std::abs(chart.to_disc(chart.base())) == 0.0);
}

TEST_CASE("geodesics are unit speed and reach their endpoint") {
    const Complex i(0, 1);
    const Geodesic vertical = geodesic_from(i, BoundaryPoint::infinity());
    CHECK(std::abs(vertical.at(1.5) - std::exp(1.5) * i) < 1e-12);

    // Radial ray in the disc: gamma_t = tanh(t/2).
    const DiscChart chart;
    const Geodesic radial = geodesic_from(i, chart.from_angle(0.0));
    for (double t : {0.3, 1.0, 2.5})
        CHECK(std::abs(chart.to_disc(radial.at(t)) - std::tanh(t / 2.0)) < 1e-12);

    cusp::Rng rng(17);
    for (int k = 0; k < 200; ++k) {
        const Complex start = random_point(rng);
        const BoundaryPoint end = BoundaryPoint::at(8.0 * rng.uniform() - 4.0);
        const Geodesic g(start, end);
        CHECK(std::abs(g.start() - start) < 1e-12);
        CHECK(same_point(g.end(), end, 1e-9));
        const double s = 3.0 * rng.uniform() - 1.0, t = 3.0 * rng.uniform() - 1.0;
        CHECK(std::abs(distance(g.at(s), g.at(t)) - std::abs(s - t)) < 1e-9);
        CHECK(distance(g.at(0.0), g.at(2.0)) == doctest::Approx(2.0).epsilon(1e-9));
    }

    const Geodesic thr = Geodesic::through(i, Complex(1.0, 2.0));
    const double d = distance(i, Complex(1.0, 2.0));
    CHECK(std::abs(thr.at(d) - Complex(1.0, 2.0)) < 1e-9);
}

TEST_CASE("entry and exit times") {
    const Complex i(0, 1);
    const Geodesic vertical = geodesic_from(i, BoundaryPoint::infinity());
    const EntryExit up = entry_exit(vertical, Horoball::at_infinity(2.0));
    CHECK(up.kind == Passage::into_cusp);
    CHECK(up.entry == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(std::isinf(up.exit));
    CHECK_THROWS_AS(excursion_boundary(vertical, Horoball::at_infinity(2.0)), GeometryError);

    const EntryExit down = entry_exit(geodesic_from(Complex(0, 3), BoundaryPoint::at(0.0)),
                                      Horoball::at_infinity(2.0));
    CHECK(down.kind == Passage::from_cusp);
    CHECK(down.exit == doctest::Approx(std::log(1.5)).epsilon(1e-14));

    const EntryExit miss = entry_exit(geodesic_from(i, BoundaryPoint::at(1.0)), Horoball::at(5.0, 0.5));
    CHECK(miss.kind == Passage::miss);
    CHECK_THROWS_AS(excursion_boundary(geodesic_from(i, BoundaryPoint::at(1.0)), Horoball::at(5.0, 0.5)),
                    GeometryError);

    cusp::Rng rng(23);
    int crossings = 0;
    for (int k = 0; k < 2000; ++k) {
        const Geodesic g(random_point(rng), BoundaryPoint::at(8.0 * rng.uniform() - 4.0));
        const Horoball h = Horoball::at(8.0 * rng.uniform() - 4.0, 0.05 + 2.0 * rng.uniform());
        const EntryExit ee = entry_exit(g, h);
        if (ee.kind != Passage::crossing) continue;
        ++crossings;
        CHECK(ee.entry <= ee.exit);
        CHECK(std::abs(h.depth(g.at(ee.entry))) < 1e-9);
        CHECK(std::abs(h.depth(g.at(ee.exit))) < 1e-9);
        CHECK(h.contains(g.at(0.5 * (ee.entry + ee.exit))));
    }
    CHECK(crossings > 100);
}

TEST_CASE("excursion_boundary chord oracle, tangency and invariance") {
    const double radius = 3.0;
    for (double h : {0.5, 1.0, 2.0, 2.9}) {
        // Start on the semicircle of radius 3 over 0, heading to +3.
        const Complex start = std::polar(radius, 0.95 * kPi);
        const Geodesic g(start, BoundaryPoint::at(radius));
        const double expected = 2.0 * std::sqrt(radius * radius - h * h) / h;
        CHECK(excursion_boundary(g, Horoball::at_infinity(h)) == doctest::Approx(expected).epsilon(1e-10));
    }
    const Geodesic g(std::polar(radius, 0.95 * kPi), BoundaryPoint::at(radius));
    const EntryExit tang = entry_exit(g, Horoball::at_infinity(radius));
    CHECK(tang.kind == Passage::tangent);
    CHECK(excursion_boundary(g, Horoball::at_infinity(radius)) == 0.0);

    cusp::Rng rng(29);
    const Horoball h = Horoball::at_infinity(1.0);
    const double e0 = excursion_boundary(g, h);
    for (int k = 0; k < 500; ++k) {
        const Mobius m = random_mobius(rng);
        CHECK(std::abs(excursion_boundary(g.transformed(m), h.transformed(m)) - e0) < 1e-9 * std::max(1.0, e0));
    }
}

TEST_CASE("excursion_visual degenerate cases") {
    const Complex x0(0, 1);
    const DiscChart chart(x0);
    const Horoball h = Horoball::at(0.0, 0.4);
    CHECK(std::isinf(excursion_visual(geodesic_from(x0, BoundaryPoint::at(0.0)), h)));

    const double s = h.disc_diameter(chart);
    const double phi_max = std::asin(s / (2.0 - s));
    const double base_angle = chart.to_angle(h.base);
    const Geodesic tangent(x0, chart.from_angle(base_angle + phi_max));
    CHECK(excursion_visual(tangent, h) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(entry_exit(tangent, h).kind == Passage::tangent);

    const Geodesic half(x0, chart.from_angle(base_angle + 0.5 * phi_max));
    CHECK(excursion_visual(half, h) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(excursion_visual(Geodesic(x0, chart.from_angle(base_angle + 1.5 * phi_max)), h),
                    GeometryError);
    CHECK_THROWS_AS(excursion_visual(half, Horoball::at(0.0, 2.0)), GeometryError);
}

TEST_CASE("boundary derivative") {
    const DiscChart chart;
    CHECK(boundary_derivative(Mobius::identity(), 1.3, chart) == doctest::Approx(1.0));

    // z -> z/3 pulls 3i back to i: disc preimage of the origin is A = 0.5 at angle 0.
    const Mobius m = Mobius::from_entries(1.0, 0.0, 0.0, 3.0);
    CHECK(std::abs(chart.conjugate(m).origin_preimage() - Complex(0.5, 0.0)) < 1e-14);
    CHECK(boundary_derivative(m, 0.0, chart) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(std::abs(fd_derivative(m, chart, 0.0, 1e-6) - 3.0) < 1e-6 * 3.0);
    CHECK(boundary_derivative(m, 0.0, chart) == doctest::Approx((1.0 + 0.5) / (1.0 - 0.5)));
    CHECK(max_log_derivative(m, chart) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    CHECK(max_log_derivative(Mobius::identity(), chart) == 0.0);

    const DiscChart chart2(Complex(0.5, 0.7));
    cusp::Rng rng(31);
    for (int k = 0; k < 1000; ++k) {
        const Mobius g = random_mobius(rng), h = random_mobius(rng);
        const double theta = 2.0 * kPi * rng.uniform();
        const double dg = boundary_derivative(g, theta, chart2);
        CHECK(std::abs(fd_derivative(g, chart2, theta, 1e-6) - dg) < 1e-6 * dg);

        const double hp = circle_action(h, chart2, theta);
        const double lhs = boundary_derivative(compose(g, h), theta, chart2);
        const double rhs = boundary_derivative(g, hp, chart2) * boundary_derivative(h, theta, chart2);
        CHECK(std::abs(lhs - rhs) < 1e-9 * rhs);

        const double disp = distance(chart2.base(), apply(g, chart2.base()));
        CHECK(std::abs(max_log_derivative(g, chart2) - disp) < 1e-9);
        CHECK(dg <= std::exp(disp) * (1.0 + 1e-12));
    }
}

TEST_CASE("sector angle") {
    CHECK(sector_angle(0.5, 0.5) == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-14));
    CHECK(sector_angle(0.25, 0.5) == doctest::Approx(0.0).epsilon(1e-7));
    CHECK_THROWS_AS(sector_angle(0.1, 0.5), GeometryError);
    CHECK_THROWS_AS(sector_angle(0.6, 0.7), GeometryError);

    // Ratio to sqrt((1-R)(R+2r-1)) stays in a fixed band across a grid.
    double lo = 1e300, hi = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const double r = 0.5 * i / 50.0;
        for (int j = 0; j < 50; ++j) {
            const double big = 0.5 + 0.5 * j / 50.0;
            const double slack = (1.0 - big) * (big + 2.0 * r - 1.0);
            if (slack <= 1e-6) continue;
            const double ratio = sector_angle(r, big) / std::sqrt(slack);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    }
    CHECK(lo >= 1.0 / 5.0);
    CHECK(hi <= 5.0);
}

TEST_CASE("horoball diameter") {
    CHECK(horoball_diameter(0.0) == 1.0);
    CHECK(horoball_diameter(std::log(3.0)) == doctest::Approx(0.5).epsilon(1e-15));
    for (double s : {1e-6, 0.01, 0.3, 0.77, 1.0})
        CHECK(std::abs(horoball_diameter(horoball_distance(s)) - s) < 1e-12);
    // Geometric check: a horoball at depth -d from the chart base has that disc diameter.
    const DiscChart chart;
    const Horoball h = Horoball::at_infinity(std::exp(1.2));
    CHECK(h.disc_diameter(chart) == doctest::Approx(horoball_diameter(1.2)).epsilon(1e-14));
    CHECK_THROWS_AS(horoball_diameter(-1.0), GeometryError);
}

TEST_CASE("horoball at a given distance") {
    cusp::Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        const Complex x(rng.uniform(-2.0, 2.0), rng.uniform(0.2, 3.0));
        const DiscChart chart(x);
        const BoundaryPoint base = i == 0 ? BoundaryPoint::infinity() : chart.from_angle(rng.uniform(0.0, 6.28));
        const double s = rng.uniform(0.01, 1.0);
        const Horoball h = horoball_at_distance(x, base, horoball_distance(s));
        CHECK(-h.depth(x) == doctest::Approx(horoball_distance(s)).epsilon(1e-9).scale(1.0));
        // Circumcircle of three horocycle points in the disc chart at x.
        Complex p[3];
        for (int k = 0; k < 3; ++k) {
            const double t = -1.0 + k;
            p[k] = base.infinite ? Complex(t, h.size)
                                 : Complex(base.x, 0.5 * h.size) + 0.5 * h.size * Complex(std::sin(t), -std::cos(t));
            p[k] = chart.to_disc(p[k]);
        }
        const double a = std::abs(p[1] - p[2]), b = std::abs(p[0] - p[2]), c = std::abs(p[0] - p[1]);
        const double area2 = std::abs(((p[1] - p[0]) * std::conj(p[2] - p[0])).imag());
        CHECK(a * b * c / area2 == doctest::Approx(s).epsilon(1e-7));
    }
    CHECK_THROWS_AS(horoball_at_distance(Complex(0.0, 1.0), BoundaryPoint::at(0.0), -1.0), GeometryError);
}
