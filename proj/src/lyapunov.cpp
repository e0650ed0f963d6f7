#include "cusp/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace cusp::lyap {

LyapEstimate lyap_estimate(double theta, const std::vector<int>& radii, const group::MetricBall& ball) {
    for (int R : radii)
        if (R < 0 || R > ball.radius()) throw std::invalid_argument("lyap_estimate: radius outside the ball");
    const hyp::DiscChart chart(ball.presentation().basepoint());
    const int top = radii.empty() ? 0 : *std::max_element(radii.begin(), radii.end());

    // best[r] = max log derivative over lengths <= r
    std::vector<double> best(top + 1, -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> arg(top + 1, 0);
    for (std::size_t i = 0; i < ball.size(); ++i) {
        const group::BallElement& e = ball[i];
        if (e.length > top) break;
        const double v = std::log(hyp::boundary_derivative(e.m, theta, chart));
        if (v > best[e.length]) {
            best[e.length] = v;
            arg[e.length] = i;
        }
    }
    for (int r = 1; r <= top; ++r)
        if (best[r - 1] >= best[r]) {
            best[r] = best[r - 1];
            arg[r] = arg[r - 1];
        }

    LyapEstimate out;
    out.theta = theta;
    out.radii = radii;
    for (int R : radii) {
        out.values.push_back(R == 0 ? 0.0 : best[R] / R);
        out.witnesses.push_back(arg[R]);
    }
    return out;
}

hyp::BoundaryPoint attracting_fixed_point(const ZMatrix& g) {
    const hyp::Mobius m = g.to_mobius();
    const double t = m.trace();
    if (!(std::abs(t) > 2.0)) throw std::invalid_argument("attracting_fixed_point: element is not hyperbolic");
    if (m.c == 0.0) {
        if (std::abs(m.a) > 1.0) return hyp::BoundaryPoint::infinity();
        return hyp::BoundaryPoint::at(m.b / (m.d - m.a));
    }
    const double root = std::sqrt(t * t - 4.0);
    for (double s : {1.0, -1.0}) {
        const double x = (m.a - m.d + s * root) / (2.0 * m.c);
        if (std::abs(m.c * x + m.d) > 1.0) return hyp::BoundaryPoint::at(x);
    }
    throw std::logic_error("attracting_fixed_point: no attracting root");
}

double expansion_floor(const ZMatrix& g, int word_length, int R) {
    if (word_length <= 0 || R <= 0) throw std::invalid_argument("expansion_floor: lengths must be positive");
    const double t = std::abs(g.to_mobius().trace());
    const double lambda = 0.5 * (t + std::sqrt(t * t - 4.0));
    return 2.0 * std::log(lambda) * (R / word_length) / R;
}

bool halfspace_member(const hyp::Mobius& g, const hyp::Geodesic& gamma, double T) {
    const Complex x0 = gamma.start();
    const Complex gx0 = hyp::apply(g, x0);
    return hyp::distance(x0, gx0) >= hyp::distance(gamma.at(2.0 * T), gx0);
}

Approximator::Approximator(const group::MetricBall& ball) : ball_(&ball), metric_(ball) {
    if (!ball.presentation().integral()) throw std::invalid_argument("Approximator needs an integral presentation");
    if (ball.presentation().is_modular()) lattice_.emplace(ball);
}

Approximant Approximator::at(const hyp::Geodesic& gamma, double T) const {
    const Complex z = gamma.at(T);
    Approximant out;
    if (lattice_) {
        const group::LatticePoint lp = lattice_->nearest(z);
        out.element = lp.element;
        out.distance = lp.distance;
        out.length = metric_.length(lp.element, metric_.max_exact());
    } else {
        const group::LatticePoint lp = group::nearest_lattice_point(*ball_, z, ball_->radius());
        out.element = lp.element;
        out.distance = lp.distance;
        if (lp.length >= 0) out.length = lp.length;
    }
    return out;
}

ShadowInstance shadow_instance(const Approximator& approx, const hyp::Geodesic& gamma, double T) {
    const Approximant h = approx.at(gamma, T);
    ShadowInstance out;
    out.T = T;
    if (!h.length) {
        out.resolved = false;
        return out;
    }
    out.h_length = *h.length;
    const group::MetricBall& ball = approx.ball();
    out.min_member_length = ball.radius() + 1;
    out.saturated = true;
    // Elements come in order of length, so the first member is a minimizer.
    for (const group::BallElement& e : ball.elements())
        if (halfspace_member(e.m, gamma, T)) {
            out.min_member_length = e.length;
            out.saturated = false;
            break;
        }
    return out;
}

bool shadow_holds(const ShadowInstance& s, double K, double K_prime) {
    if (!s.resolved) throw std::invalid_argument("shadow_holds: unresolved instance");
    return s.min_member_length >= s.h_length / K - K_prime;
}

ShadowFit fit_shadow(const std::vector<ShadowInstance>& instances, double K_prime) {
    if (!(K_prime >= 0.0)) throw std::invalid_argument("fit_shadow: K' must be nonnegative");
    ShadowFit fit;
    fit.K_prime = K_prime;
    fit.instances = instances.size();
    for (const ShadowInstance& s : instances) {
        if (!s.resolved) {
            ++fit.unresolved;
            continue;
        }
        if (s.saturated) ++fit.saturated;
        if (s.h_length == 0) continue;
        const double room = s.min_member_length + K_prime;
        if (room <= 0.0) throw std::invalid_argument("fit_shadow: no K satisfies an instance; raise K'");
        fit.K = std::max(fit.K, s.h_length / room);
    }
    return fit;
}

double angle_lower_bound(double L, double T) {
    if (!(L > T)) throw std::invalid_argument("angle_lower_bound: need L > T");
    if (!(std::tanh(T) > 0.5)) throw std::invalid_argument("angle_lower_bound: need tanh T > 1/2");
    if (!(L >= 2.0 * T)) throw std::invalid_argument("angle_lower_bound: need L >= 2T");
    return std::atan(std::tanh(L - T) / std::sinh(T));
}

double fit_angle_constant(const std::vector<double>& times) {
    if (times.empty()) throw std::invalid_argument("fit_angle_constant: no times");
    double c = std::numeric_limits<double>::infinity();
    for (double T : times) c = std::min(c, angle_lower_bound(2.0 * T, T) * std::exp(T));
    return c;
}

DerivativeCheck derivative_bound_check(const Approximator& approx, const hyp::Geodesic& gamma, double T,
                                       double K, double K_prime) {
    if (!(K > 0.0)) throw std::invalid_argument("derivative_bound_check: K must be positive");
    const Approximant h = approx.at(gamma, T);
    DerivativeCheck out;
    out.T = T;
    if (!h.length) {
        out.resolved = false;
        return out;
    }
    out.h_length = *h.length;
    out.R_T = out.h_length / K - K_prime;
    out.applicable = out.R_T >= 1.0;
    if (!out.applicable) return out;

    const group::MetricBall& ball = approx.ball();
    int radius = static_cast<int>(std::floor(out.R_T));
    if (radius > ball.radius()) {
        radius = ball.radius();
        out.saturated = true;
    }
    const Complex x0 = gamma.start();
    const hyp::DiscChart chart(x0);
    const hyp::BoundaryPoint p = gamma.end();
    for (std::size_t i = 0; i < ball.size(); ++i) {
        const group::BallElement& e = ball[i];
        if (e.length > radius) break;
        const double der = hyp::boundary_derivative(e.m, p, chart);
        if (der > std::exp(hyp::distance(x0, hyp::apply(e.m, x0))) * (1.0 + 1e-9)) out.displacement_bound = false;
        if (der > out.max_derivative) {
            out.max_derivative = der;
            out.witness = i;
        }
    }
    out.ratio = out.max_derivative / std::exp(2.0 * T);
    return out;
}

JumpReport jump_gaps(const Approximator& approx, const hyp::Geodesic& gamma, double T_max, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("jump_gaps: step must be positive");
    std::set<int> seen;
    JumpReport out;
    for (long k = 0;; ++k) {
        const double T = k * dt;
        if (T > T_max + 1e-12) break;
        const Approximant h = approx.at(gamma, T);
        if (h.length)
            seen.insert(*h.length);
        else
            out.saturated = true;
    }
    out.values.assign(seen.begin(), seen.end());
    for (std::size_t i = 1; i < out.values.size(); ++i)
        out.max_gap = std::max(out.max_gap, out.values[i] - out.values[i - 1]);
    return out;
}

double entry_point_stability(Complex y, const hyp::Horoball& H, const hyp::Geodesic& gamma) {
    if (!(H.depth(y) < 0.0)) throw hyp::GeometryError("entry_point_stability: y must lie outside the horoball");
    const hyp::EntryExit ee = hyp::entry_exit(gamma, H);
    if (!ee.meets() || !std::isfinite(ee.entry) || ee.entry < 0.0)
        throw hyp::GeometryError("entry_point_stability: the ray does not enter the horoball");
    const Complex entry = gamma.at(ee.entry);
    // Move the base to infinity; the horocycle becomes a horizontal line.
    const hyp::Mobius m = H.base.infinite ? hyp::Mobius::identity()
                                          : hyp::Mobius::from_entries(0.0, -1.0, 1.0, -H.base.x);
    const double height = H.transformed(m).size;
    return std::abs(hyp::apply(m, entry).real() - hyp::apply(m, y).real()) / height;
}

} // namespace cusp::lyap
