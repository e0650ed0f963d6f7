#pragma once

// Expansion of boundary derivatives over word-metric balls, and the geometric
// estimates that bound it along a geodesic ray.

#include "cusp/group.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace cusp::lyap {

using group::ZMatrix;
using hyp::Complex;

struct LyapEstimate {
    double theta = 0.0;             // boundary point as an angle in the chart at the basepoint
    std::vector<int> radii;
    std::vector<double> values;     // max over B(R) of log|g'(p)| / R
    std::vector<std::size_t> witnesses; // ball index of a maximizer
};

/// Exact maximum over the enumerated ball at each radius. Throws
/// std::invalid_argument if a radius exceeds the ball radius or is negative.
/// R = 0 gives 0.
LyapEstimate lyap_estimate(double theta, const std::vector<int>& radii, const group::MetricBall& ball);

/// Attracting fixed point of a hyperbolic element. Throws std::invalid_argument otherwise.
hyp::BoundaryPoint attracting_fixed_point(const ZMatrix& g);
/// 2 log(lambda) floor(R / m) / R: the powers of g^-1 of length <= R expand the
/// attracting fixed point of g by lambda^2 each, lambda the larger eigenvalue.
double expansion_floor(const ZMatrix& g, int word_length, int R);

/// d(x0, g x0) >= d(gamma(2T), g x0) with x0 = gamma.start().
bool halfspace_member(const hyp::Mobius& g, const hyp::Geodesic& gamma, double T);

/// The orbit point nearest gamma(T) and its word length.
struct Approximant {
    ZMatrix element;
    std::optional<int> length;
    double distance = 0.0;
};

/// Nearest orbit points for an integral presentation: the fundamental-domain
/// fast path for PSL(2,Z), an exhaustive ball scan otherwise.
class Approximator {
public:
    explicit Approximator(const group::MetricBall& ball);

    Approximant at(const hyp::Geodesic& gamma, double T) const;
    const group::MetricBall& ball() const { return *ball_; }
    const group::WordMetric& metric() const { return metric_; }

private:
    const group::MetricBall* ball_;
    group::WordMetric metric_;
    std::optional<group::ModularLattice> lattice_;
};

struct ShadowInstance {
    double T = 0.0;
    bool resolved = true; // false when d_G(1, h_T) is beyond the exact range; nothing else is set
    int h_length = 0;     // d_G(1, h_T)
    /// Least word length of a ball element with g x0 in the half-space. When
    /// no ball element qualifies it is radius + 1, a lower bound, and
    /// saturated is set.
    int min_member_length = 0;
    bool saturated = false;
};

ShadowInstance shadow_instance(const Approximator& approx, const hyp::Geodesic& gamma, double T);
bool shadow_holds(const ShadowInstance& s, double K, double K_prime);

struct ShadowFit {
    double K = 1.0;
    double K_prime = 0.0;
    std::size_t instances = 0;
    std::size_t saturated = 0;
    std::size_t unresolved = 0;
};

/// Least K with min_member_length >= h_length / K - K_prime on every resolved instance.
ShadowFit fit_shadow(const std::vector<ShadowInstance>& instances, double K_prime);

/// tan psi = tanh(L - T) / sinh T. Throws std::invalid_argument unless
/// L > T, tanh T > 1/2 and L >= 2T.
double angle_lower_bound(double L, double T);
/// min of psi(2T, T) e^T over the given times.
double fit_angle_constant(const std::vector<double>& times);

struct DerivativeCheck {
    double T = 0.0;
    bool resolved = true; // as for ShadowInstance
    int h_length = 0;
    double R_T = 0.0;        // h_length / K - K_prime
    bool applicable = false; // R_T >= 1
    bool saturated = false;  // R_T beyond the ball radius; the ball radius is used
    double max_derivative = 0.0;
    std::size_t witness = 0;
    double ratio = 0.0;      // max_derivative / e^{2T}
    bool displacement_bound = true; // |g'(p)| <= e^{d(x0, g x0)} for every scanned g
};

/// Scans every g with word length <= R_T at p = gamma.end().
DerivativeCheck derivative_bound_check(const Approximator& approx, const hyp::Geodesic& gamma, double T,
                                       double K, double K_prime);

struct JumpReport {
    std::vector<int> values; // sorted distinct d_G(1, h_T) over the grid
    int max_gap = 0;
    bool saturated = false;  // some h_T had no exact word length
};

/// Grid T = 0, dt, 2 dt, ... up to T_max.
JumpReport jump_gaps(const Approximator& approx, const hyp::Geodesic& gamma, double T_max, double dt);

/// Horocyclic distance along the boundary of H between the point where the ray
/// gamma from y enters H and the nearest-point projection of y onto H. Throws
/// hyp::GeometryError if y is not outside H or the ray does not enter it.
double entry_point_stability(Complex y, const hyp::Horoball& H, const hyp::Geodesic& gamma);

} // namespace cusp::lyap
