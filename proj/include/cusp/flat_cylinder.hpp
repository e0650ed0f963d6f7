#pragma once

// A core curve on a flat cylinder along a Teichmueller geodesic: its length,
// twist parameter and the times it spends below a length threshold. Times use
// the curvature -4 normalization, where lengths scale by e^t and e^-t.

#include <optional>
#include <stdexcept>
#include <utility>

namespace cusp::flat {

class CylinderError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct CylinderParams {
    double ell0 = 1.0;   // initial flat length of the core curve
    double theta0 = 0.1; // angle with the vertical foliation, in (0, pi/2)
    double area = 1.0;   // area of the maximal flat cylinder
    double eps = 0.01;   // threshold on the squared length

    /// Throws CylinderError unless all fields are positive and theta0 < pi/2.
    void validate() const;
};

/// Squared length l0^2 (sin^2 theta0 e^2t + cos^2 theta0 e^-2t).
double length_sq_at(const CylinderParams& p, double t);

/// Twist (A / l_t^2) tan theta0 e^2t, with bounded terms dropped.
double twist_at(const CylinderParams& p, double t);

/// The squared length dips to eps iff sin 2 theta0 <= eps / l0^2.
bool crosses(const CylinderParams& p);

/// Times where the squared length equals eps, from the quadratic in X = e^2t:
/// X^2 - eps / (l0^2 sin^2 theta0) X + 1 / tan^2 theta0 = 0.
std::optional<std::pair<double, double>> entry_exit_times(const CylinderParams& p);

/// Closed form (A / eps) sqrt(eps^2 / (l0^4 sin^2 theta0 cos^2 theta0) - 4) of
/// twist_at(t2) - twist_at(t1). Throws CylinderError when there is no crossing.
double twist_difference(const CylinderParams& p);

struct Comparison {
    double ratio = 0.0;  // twist_difference / ((A / eps) phi_max / phi0)
    double phi0 = 0.0;   // 2 theta0
    double phi_max = 0.0; // sin phi_max = eps / l0^2
    bool excluded = false; // sin phi0 > sin(phi_max) / 2, the near-tangent regime
};

/// Twist accumulated during the excursion against the visual excursion size
/// phi_max / phi0. Throws CylinderError when there is no crossing or
/// eps / l0^2 > 1.
Comparison excursion_comparison(const CylinderParams& p);

} // namespace cusp::flat
