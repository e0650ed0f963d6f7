#include "cusp/flat_cylinder.hpp"

#include <cmath>
#include <numbers>

namespace cusp::flat {

void CylinderParams::validate() const {
    if (!(ell0 > 0.0) || !(area > 0.0) || !(eps > 0.0))
        throw CylinderError("cylinder parameters must be positive");
    if (!(theta0 > 0.0) || !(theta0 < 0.5 * std::numbers::pi))
        throw CylinderError("theta0 must lie in (0, pi/2)");
}

double length_sq_at(const CylinderParams& p, double t) {
    const double s = std::sin(p.theta0), c = std::cos(p.theta0);
    return p.ell0 * p.ell0 * (s * s * std::exp(2.0 * t) + c * c * std::exp(-2.0 * t));
}

double twist_at(const CylinderParams& p, double t) {
    // Divided through by e^2t, which keeps it monotone in floating point too.
    const double s = std::sin(p.theta0), c = std::cos(p.theta0);
    return p.area * std::tan(p.theta0) / (p.ell0 * p.ell0 * (s * s + c * c * std::exp(-4.0 * t)));
}

bool crosses(const CylinderParams& p) {
    p.validate();
    return std::sin(2.0 * p.theta0) <= p.eps / (p.ell0 * p.ell0);
}

std::optional<std::pair<double, double>> entry_exit_times(const CylinderParams& p) {
    p.validate();
    const double s = std::sin(p.theta0);
    const double tn = std::tan(p.theta0);
    const double b = p.eps / (p.ell0 * p.ell0 * s * s);
    const double prod = 1.0 / (tn * tn);
    double disc = b * b - 4.0 * prod;
    if (disc < -1e-12 * b * b) return std::nullopt;
    disc = std::max(disc, 0.0);
    // Large root directly, small root from the product to avoid cancellation.
    const double big = 0.5 * (b + std::sqrt(disc));
    const double small = prod / big;
    return std::make_pair(0.5 * std::log(small), 0.5 * std::log(big));
}

double twist_difference(const CylinderParams& p) {
    p.validate();
    const double s = std::sin(p.theta0), c = std::cos(p.theta0);
    const double l2 = p.ell0 * p.ell0;
    const double inner = p.eps * p.eps / (l2 * l2 * s * s * c * c) - 4.0;
    if (inner < -1e-12 * (inner + 4.0)) throw CylinderError("no crossing: the length never reaches the threshold");
    return p.area / p.eps * std::sqrt(std::max(inner, 0.0));
}

Comparison excursion_comparison(const CylinderParams& p) {
    p.validate();
    const double smax = p.eps / (p.ell0 * p.ell0);
    if (smax > 1.0) throw CylinderError("eps / l0^2 exceeds 1, phi_max undefined");
    if (!crosses(p)) throw CylinderError("no crossing: the length never reaches the threshold");
    Comparison out;
    out.phi0 = 2.0 * p.theta0;
    out.phi_max = std::asin(smax);
    const double s0 = std::sin(out.phi0);
    out.excluded = s0 > 0.5 * smax;
    const double u = smax / s0;
    out.ratio = 2.0 * std::sqrt(std::max(u * u - 1.0, 0.0)) * out.phi0 / out.phi_max;
    return out;
}

} // namespace cusp::flat
