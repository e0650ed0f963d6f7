#include "cusp/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cusp::hyp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    return t;
}

// Smallest absolute angular difference, in [0, pi].
double angle_gap(double x, double y) {
    const double d = wrap_angle(x - y);
    return std::min(d, kTwoPi - d);
}

} // namespace

Mobius Mobius::from_entries(double a, double b, double c, double d) {
    const double det = a * d - b * c;
    if (!(det > 0.0)) throw GeometryError("Mobius entries must have positive determinant");
    const double s = std::sqrt(det);
    return Mobius{a / s, b / s, c / s, d / s}.canonical();
}

Mobius Mobius::canonical() const {
    for (double x : {a, b, c, d}) {
        if (x > 0.0) return *this;
        if (x < 0.0) return Mobius{-a, -b, -c, -d};
    }
    return *this;
}

Mobius compose(const Mobius& l, const Mobius& r) {
    return Mobius{l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
                  l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d}
        .canonical();
}

Mobius inverse(const Mobius& m) { return Mobius{m.d, -m.b, -m.c, m.a}.canonical(); }

bool approx_equal(const Mobius& x, const Mobius& y, double tol) {
    auto close = [tol](const Mobius& p, const Mobius& q) {
        return std::abs(p.a - q.a) <= tol && std::abs(p.b - q.b) <= tol &&
               std::abs(p.c - q.c) <= tol && std::abs(p.d - q.d) <= tol;
    };
    return close(x, y) || close(x, Mobius{-y.a, -y.b, -y.c, -y.d});
}

bool same_point(const BoundaryPoint& p, const BoundaryPoint& q, double tol) {
    if (p.infinite || q.infinite) return p.infinite == q.infinite;
    return std::abs(p.x - q.x) <= tol * std::max(1.0, std::abs(p.x));
}

Complex apply(const Mobius& m, Complex z) { return (m.a * z + m.b) / (m.c * z + m.d); }

BoundaryPoint apply(const Mobius& m, const BoundaryPoint& p) {
    if (p.infinite) {
        if (m.c == 0.0) return BoundaryPoint::infinity();
        return BoundaryPoint::at(m.a / m.c);
    }
    const double den = m.c * p.x + m.d;
    if (den == 0.0) return BoundaryPoint::infinity();
    return BoundaryPoint::at((m.a * p.x + m.b) / den);
}

double distance(Complex z, Complex w) {
    return 2.0 * std::asinh(std::abs(z - w) / (2.0 * std::sqrt(z.imag() * w.imag())));
}

double disc_distance(Complex z, Complex w) {
    return 2.0 * std::atanh(std::abs(z - w) / std::abs(1.0 - std::conj(z) * w));
}

DiscChart::DiscChart(Complex base) : base_(base) {
    if (!(base.imag() > 0.0)) throw GeometryError("chart base must lie in the upper half-plane");
}

Complex DiscChart::to_disc(Complex z) const { return (z - base_) / (z - std::conj(base_)); }

Complex DiscChart::from_disc(Complex w) const {
    return (base_ - std::conj(base_) * w) / (1.0 - w);
}

double DiscChart::to_angle(const BoundaryPoint& p) const {
    if (p.infinite) return 0.0;
    const Complex w = (Complex(p.x, 0.0) - base_) / (Complex(p.x, 0.0) - std::conj(base_));
    return wrap_angle(std::arg(w));
}

BoundaryPoint DiscChart::from_angle(double theta) const {
    const Complex w = std::polar(1.0, wrap_angle(theta));
    if (std::abs(1.0 - w) < 1e-300) return BoundaryPoint::infinity();
    return BoundaryPoint::at(from_disc(w).real());
}

DiscMap DiscChart::conjugate(const Mobius& m) const {
    // C = [[1, -b], [1, -conj b]], D = C M adj(C) / det(C).
    const Complex b = base_, bc = std::conj(base_);
    const Complex c11 = 1.0, c12 = -b, c21 = 1.0, c22 = -bc;
    const Complex a11 = -bc, a12 = b, a21 = -1.0, a22 = 1.0;
    const Complex m11 = c11 * m.a + c12 * m.c, m12 = c11 * m.b + c12 * m.d;
    const Complex m21 = c21 * m.a + c22 * m.c, m22 = c21 * m.b + c22 * m.d;
    const Complex det = c11 * c22 - c12 * c21;
    return DiscMap{(m11 * a11 + m12 * a21) / det, (m11 * a12 + m12 * a22) / det,
                   (m21 * a11 + m22 * a21) / det, (m21 * a12 + m22 * a22) / det};
}

Geodesic::Geodesic(Complex start, const BoundaryPoint& end) {
    if (!(start.imag() > 0.0)) throw GeometryError("geodesic start must be interior");
    if (end.infinite) {
        frame_ = Mobius::from_entries(start.imag(), start.real(), 0.0, 1.0);
        return;
    }
    // T1(z) = -1/(z - e) sends the endpoint to infinity.
    const Mobius t1{0.0, -1.0, 1.0, -end.x};
    const Complex s = apply(t1, start);
    const Mobius lift = Mobius::from_entries(s.imag(), s.real(), 0.0, 1.0);
    frame_ = compose(Mobius{-end.x, 1.0, -1.0, 0.0}, lift);
}

Geodesic Geodesic::through(Complex start, Complex through) {
    const DiscChart chart(start);
    const Complex w = chart.to_disc(through);
    if (std::abs(w) == 0.0) throw GeometryError("direction undefined: points coincide");
    return Geodesic(start, chart.from_angle(std::arg(w)));
}

Complex Geodesic::at(double t) const { return apply(frame_, Complex(0.0, std::exp(t))); }

Geodesic Geodesic::transformed(const Mobius& m) const { return Geodesic(compose(m, frame_)); }

Geodesic geodesic_from(Complex basepoint, const BoundaryPoint& p) { return Geodesic(basepoint, p); }

double Horoball::depth(Complex z) const {
    if (base.infinite) return std::log(z.imag() / size);
    return std::log(size * z.imag() / std::norm(z - Complex(base.x, 0.0)));
}

Horoball Horoball::transformed(const Mobius& m) const {
    const Complex on_horocycle =
        base.infinite ? Complex(0.0, size) : Complex(base.x, size);
    const Complex image = apply(m, on_horocycle);
    const BoundaryPoint new_base = apply(m, base);
    if (new_base.infinite) return Horoball{new_base, image.imag()};
    return Horoball{new_base, std::norm(image - Complex(new_base.x, 0.0)) / image.imag()};
}

double Horoball::disc_diameter(const DiscChart& chart) const {
    return 2.0 / (1.0 + std::exp(-depth(chart.base())));
}

std::string to_string(Passage p) {
    switch (p) {
    case Passage::miss: return "miss";
    case Passage::tangent: return "tangent";
    case Passage::crossing: return "crossing";
    case Passage::into_cusp: return "into_cusp";
    case Passage::from_cusp: return "from_cusp";
    }
    return "unknown";
}

EntryExit entry_exit(const Geodesic& g, const Horoball& h) {
    // Depth changes at unit rate along a geodesic aimed at (or away from) the base.
    if (same_point(h.base, g.end())) {
        return {Passage::into_cusp, -h.depth(g.start()), kInf};
    }
    if (same_point(h.base, g.back())) {
        return {Passage::from_cusp, -kInf, h.depth(g.start())};
    }
    // In frame coordinates the geodesic is t -> e^t i and the horocycle is a
    // circle tangent at x with diameter D: the heights y solve y^2 - D y + x^2 = 0.
    const Horoball local = h.transformed(inverse(g.frame()));
    if (local.base.infinite) return {Passage::into_cusp, std::log(local.size), kInf};
    const double x = local.base.x, diam = local.size;
    const double disc = diam * diam - 4.0 * x * x;
    if (std::abs(disc) <= 1e-12 * diam * diam) {
        const double t = std::log(diam / 2.0);
        return {Passage::tangent, t, t};
    }
    if (disc < 0.0) return {Passage::miss, 0.0, 0.0};
    const double y_hi = 0.5 * (diam + std::sqrt(disc));
    const double y_lo = x * x / y_hi;
    return {Passage::crossing, std::log(y_lo), std::log(y_hi)};
}

double excursion_boundary(const Geodesic& g, const Horoball& h) {
    const EntryExit ee = entry_exit(g, h);
    switch (ee.kind) {
    case Passage::crossing: return 2.0 * std::sinh(0.5 * (ee.exit - ee.entry));
    case Passage::tangent: return 0.0;
    case Passage::into_cusp:
    case Passage::from_cusp: throw GeometryError("geodesic never exits the horoball");
    case Passage::miss: break;
    }
    throw GeometryError("geodesic does not cross the horoball");
}

double excursion_visual(const Geodesic& g, const Horoball& h) {
    const DiscChart chart(g.start());
    if (h.depth(g.start()) >= 0.0) throw GeometryError("basepoint lies inside the horoball");
    const double s = h.disc_diameter(chart);
    const double phi_max = std::asin(s / (2.0 - s));
    if (same_point(h.base, g.end())) return kInf;
    const double phi0 = angle_gap(chart.to_angle(g.end()), chart.to_angle(h.base));
    if (phi0 == 0.0) return kInf;
    if (phi0 > phi_max * (1.0 + 1e-12)) throw GeometryError("geodesic does not cross the horoball");
    return std::max(phi_max / phi0, 1.0);
}

double boundary_derivative(const Mobius& m, double theta, const DiscChart& chart) {
    const DiscMap f = chart.conjugate(m);
    const Complex a = f.origin_preimage();
    const double amp = std::abs(a);
    const double phi = std::arg(a);
    // 1 - A^2 = 1/|alpha|^2 for determinant-one disc maps; the denominator is
    // written as (1-A)^2 + 4A sin^2((phi-t)/2) to survive A close to 1.
    const double one_minus_a2 = 1.0 / std::norm(f.alpha);
    const double one_minus_a = one_minus_a2 / (1.0 + amp);
    const double sh = std::sin(0.5 * (phi - theta));
    return one_minus_a2 / (one_minus_a * one_minus_a + 4.0 * amp * sh * sh);
}

double boundary_derivative(const Mobius& m, const BoundaryPoint& p, const DiscChart& chart) {
    return boundary_derivative(m, chart.to_angle(p), chart);
}

double max_log_derivative(const Mobius& m, const DiscChart& chart) {
    const DiscMap f = chart.conjugate(m);
    const double amp = std::abs(f.origin_preimage());
    return 2.0 * std::log1p(amp) + std::log(std::norm(f.alpha));
}

double sector_angle(double inner, double outer) {
    constexpr double eps = 1e-15;
    if (outer < 0.5 - eps || inner > 0.5 + eps || inner <= 0.0 || outer + 2.0 * inner - 1.0 < -eps)
        throw GeometryError("sector_angle: need outer >= 1/2, inner <= 1/2, outer + 2 inner >= 1");
    const double r = inner, big = outer;
    const double cosv = ((1.0 - r) * (1.0 - r) + big * big - r * r) / (2.0 * big * (1.0 - r));
    if (cosv > 1.0 + 1e-12 || cosv < -1.0 - 1e-12)
        throw GeometryError("sector_angle: circles do not intersect");
    return 2.0 * std::acos(std::clamp(cosv, -1.0, 1.0));
}

double horoball_diameter(double d) {
    if (d < 0.0) throw GeometryError("horoball_diameter: negative distance");
    return 2.0 / (1.0 + std::exp(d));
}

double horoball_distance(double s) {
    if (!(s > 0.0 && s <= 1.0)) throw GeometryError("horoball_distance: diameter outside (0,1]");
    return std::log((2.0 - s) / s);
}

Horoball horoball_at_distance(Complex x, const BoundaryPoint& base, double d) {
    if (!(d >= 0.0)) throw GeometryError("horoball_at_distance: negative distance");
    const Complex top = Geodesic(x, base).at(d);
    if (base.infinite) return Horoball::at_infinity(top.imag());
    // Circle tangent to the real line at base.x through top.
    return Horoball::at(base.x, std::norm(top - Complex(base.x, 0.0)) / top.imag());
}

} // namespace cusp::hyp
