#pragma once

// Hyperbolic plane geometry in curvature -1.
//
// Interior points live in the upper half-plane as std::complex<double> with
// positive imaginary part. The disc model is reached through a DiscChart, a
// Cayley map sending a chosen basepoint to the origin.

#include <complex>
#include <stdexcept>
#include <string>

namespace cusp::hyp {

using Complex = std::complex<double>;

inline constexpr double kGeomTol = 1e-9;

class GeometryError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Orientation-preserving isometry z -> (az+b)/(cz+d) with ad - bc = 1,
/// stored in canonical sign (first nonzero of a, b, c, d positive).
struct Mobius {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static Mobius identity() { return {}; }
    /// Scales the entries to determinant 1 and canonicalizes the sign.
    /// Throws GeometryError if ad - bc <= 0.
    static Mobius from_entries(double a, double b, double c, double d);

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    Mobius canonical() const;
};

/// Matrix product lhs * rhs, i.e. the map z -> lhs(rhs(z)).
Mobius compose(const Mobius& lhs, const Mobius& rhs);
Mobius inverse(const Mobius& m);
/// Entrywise comparison modulo the sign ambiguity of PSL(2,R).
bool approx_equal(const Mobius& x, const Mobius& y, double tol = kGeomTol);

/// A point of the extended real line, the boundary of the half-plane.
struct BoundaryPoint {
    bool infinite = false;
    double x = 0.0;

    static BoundaryPoint at(double x) { return {false, x}; }
    static BoundaryPoint infinity() { return {true, 0.0}; }
};

bool same_point(const BoundaryPoint& p, const BoundaryPoint& q, double tol = 1e-12);

Complex apply(const Mobius& m, Complex z);
BoundaryPoint apply(const Mobius& m, const BoundaryPoint& p);

/// Hyperbolic distance in the upper half-plane.
double distance(Complex z, Complex w);
/// Hyperbolic distance in the unit disc.
double disc_distance(Complex z, Complex w);

/// Disc isometry w -> (alpha w + beta)/(gamma w + delta), determinant 1.
struct DiscMap {
    Complex alpha{1.0, 0.0}, beta{0.0, 0.0}, gamma{0.0, 0.0}, delta{1.0, 0.0};

    Complex apply(Complex w) const { return (alpha * w + beta) / (gamma * w + delta); }
    /// Preimage of the origin, the point `a` in f(z) = e^{i theta}(z - a)/(1 - conj(a) z).
    Complex origin_preimage() const { return -beta / alpha; }
};

/// Cayley chart z -> (z - base)/(z - conj(base)).
class DiscChart {
public:
    explicit DiscChart(Complex base = Complex(0.0, 1.0));

    Complex base() const { return base_; }
    Complex to_disc(Complex z) const;
    Complex from_disc(Complex w) const;
    /// Angle in [0, 2 pi) of a boundary point seen in the disc.
    double to_angle(const BoundaryPoint& p) const;
    BoundaryPoint from_angle(double theta) const;
    DiscMap conjugate(const Mobius& m) const;

private:
    Complex base_;
};

/// Unit-speed geodesic ray t -> at(t), t >= 0, from an interior start point
/// to a boundary endpoint. The parameterization extends to the whole line.
class Geodesic {
public:
    Geodesic(Complex start, const BoundaryPoint& end);

    /// Ray from `start` through the interior point `through`.
    static Geodesic through(Complex start, Complex through);

    Complex start() const { return apply(frame_, Complex(0.0, 1.0)); }
    BoundaryPoint end() const { return apply(frame_, BoundaryPoint::infinity()); }
    BoundaryPoint back() const { return apply(frame_, BoundaryPoint::at(0.0)); }
    Complex at(double t) const;

    /// Isometry taking the vertical ray t -> e^t i onto this geodesic.
    const Mobius& frame() const { return frame_; }
    Geodesic transformed(const Mobius& m) const;

private:
    explicit Geodesic(const Mobius& frame) : frame_(frame) {}
    Mobius frame_;
};

Geodesic geodesic_from(Complex basepoint, const BoundaryPoint& p);

/// Horoball tangent to the boundary at `base`. `size` is the height of the
/// bounding horizontal line when base is infinite, and the Euclidean diameter
/// of the bounding circle otherwise.
struct Horoball {
    BoundaryPoint base;
    double size = 1.0;

    static Horoball at_infinity(double height) { return {BoundaryPoint::infinity(), height}; }
    static Horoball at(double x, double diameter) { return {BoundaryPoint::at(x), diameter}; }

    /// Signed hyperbolic distance past the horocycle; positive inside.
    double depth(Complex z) const;
    bool contains(Complex z) const { return depth(z) > 0.0; }
    Horoball transformed(const Mobius& m) const;
    /// Euclidean diameter in the disc chart.
    double disc_diameter(const DiscChart& chart) const;
};

enum class Passage {
    miss,      // never meets the closed horoball
    tangent,   // touches the horocycle once
    crossing,  // enters and leaves
    into_cusp, // geodesic ends at the base: enters, never exits
    from_cusp, // geodesic line starts at the base: exits, never entered
};

std::string to_string(Passage p);

struct EntryExit {
    Passage kind = Passage::miss;
    double entry = 0.0; // -inf for from_cusp
    double exit = 0.0;  // +inf for into_cusp

    bool meets() const { return kind != Passage::miss; }
};

/// Times on the full geodesic line where it meets the horocycle. Solved in
/// closed form from the circle-line intersection.
EntryExit entry_exit(const Geodesic& g, const Horoball& h);

/// Horocyclic arc length between entry and exit points, 2 sinh(dt/2).
/// Throws GeometryError unless the geodesic crosses or touches h.
double excursion_boundary(const Geodesic& g, const Horoball& h);

/// Visual excursion phi_max / phi_0 seen from g.start(): phi_0 is the angle
/// between g and the ray into the cusp of h, phi_max the angle to a ray tangent
/// to h. Returns +inf when g is the cusp ray. Throws if g misses h or if the
/// start lies inside h.
double excursion_visual(const Geodesic& g, const Horoball& h);

/// |f'(p)| for the circle map induced by m in the disc chart, evaluated with
/// the displacement form (1 - A^2)/(1 + A^2 - 2A cos(phi - t)), A e^{i phi} = f^{-1}(0).
double boundary_derivative(const Mobius& m, double theta, const DiscChart& chart);
double boundary_derivative(const Mobius& m, const BoundaryPoint& p, const DiscChart& chart);

/// sup over the circle of log |f'|; equals the distance f moves the chart base.
double max_log_derivative(const Mobius& m, const DiscChart& chart);

/// Central angle subtended by the intersection of the circle |z| = outer with
/// a circle of radius inner tangent internally to the unit circle.
double sector_angle(double inner, double outer);

/// Euclidean diameter in the disc of a horoball at hyperbolic distance d from
/// the origin, and its inverse.
double horoball_diameter(double distance_from_origin);
double horoball_distance(double disc_diameter);

/// Horoball based at `base` whose closest point to x is at hyperbolic distance d.
Horoball horoball_at_distance(Complex x, const BoundaryPoint& base, double d);

} // namespace cusp::hyp
