#pragma once

// Random walks on integral Fuchsian groups: exact sample paths, word and
// relative drift, hitting points on the boundary and tracking of the limit
// geodesic.

#include "cusp/group.hpp"
#include "cusp/random.hpp"
#include "cusp/stats.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cusp::walk {

using group::ZMatrix;
using hyp::Complex;

class ElementaryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotConverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StepDistribution {
    std::vector<std::string> names;
    std::vector<ZMatrix> support;
    std::vector<double> probs;

    /// Uniform on the generators of an integral presentation.
    static StepDistribution uniform(const group::Presentation& p);
    static StepDistribution point_mass(const ZMatrix& g, const std::string& name);
    /// Non-parabolic generators with weight 1 and each parabolic generator's
    /// powers g^k, 1 <= k <= max_power, with weight rho^k; then normalized.
    static StepDistribution heavy_tail(const group::Presentation& p, double rho = 0.5, int max_power = 60);

    /// Throws std::invalid_argument unless probabilities are positive and sum to 1 within 1e-12.
    void validate() const;
    std::size_t draw(Rng& rng) const;
};

/// True when two non-commuting hyperbolic elements occur among products of at
/// most max_length support elements. Discrete groups cannot contain
/// hyperbolics sharing exactly one fixed point, so commuting is the test.
bool is_non_elementary(const StepDistribution& mu, int max_length = 4);

struct SamplePath {
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> steps;  // indices into the support
    std::vector<ZMatrix> locations;    // w_0 = identity, w_{k+1} = w_k g_{k+1}

    std::size_t length() const { return steps.size(); }
};

SamplePath sample_path(const StepDistribution& mu, std::size_t n, std::uint64_t seed);

struct DriftEstimate {
    std::size_t n = 0;
    stats::MeanEstimate estimate; // of length(w_n) / n over unsaturated paths
    double saturated_fraction = 0.0;
};

/// Word drift at step n; lengths beyond the metric's exact range count as saturated.
DriftEstimate drift_word(const std::vector<SamplePath>& paths, const group::WordMetric& metric, std::size_t n);
/// Relative drift at step n. Throws ElementaryError for elementary step distributions.
DriftEstimate drift_rel(const std::vector<SamplePath>& paths, const StepDistribution& mu,
                        const group::Presentation& p, std::size_t n, int radius_cap = 36);

/// Image under w of the boundary arc that stays at angle >= pi/3 from the
/// repelling direction of w (the direction of w^-1 x0 seen from x0). Angles
/// are measured in the disc chart centred at x0; the arc shrinks to the
/// hitting point as w moves along a sample path.
struct ShadowBracket {
    double lo = 0.0, hi = 0.0; // arc endpoints, counterclockwise from lo to hi
    double centre = 0.0;       // angle of the image of the antipode of the repelling direction
    double diameter = 0.0;     // Euclidean diameter of the arc
    hyp::BoundaryPoint point;  // centre, in half-plane coordinates
};

ShadowBracket shadow_bracket(const ZMatrix& w, Complex x0);

struct HittingPoint {
    hyp::BoundaryPoint point;
    double angle = 0.0;
    double diameter = 0.0;
    std::size_t n = 0;
};

/// Bracket of the final location. Throws NotConverged when its diameter is not below tolerance.
HittingPoint hitting_point(const SamplePath& path, double tolerance, Complex x0);

/// Extra steps beyond k_max that tracking_deviation needs to pin down the limit.
inline constexpr std::size_t kTrackingLead = 200;

/// d(w_k x0, gamma) / k for k = 1..k_max, where gamma is the geodesic line
/// through x0 and the hitting point. Computed in w_k^-1 coordinates from the
/// exact tail g_{k+1} ... g_N, which keeps it well conditioned for large k.
/// Requires path length >= k_max + kTrackingLead.
std::vector<double> tracking_deviation(const SamplePath& path, Complex x0, std::size_t k_max);

/// d_G(1, w_k) / d_rel(1, w_k) for k = 1..k_max; nullopt where either length
/// is unavailable or w_k is the identity.
std::vector<std::optional<double>> ratio_along_walk(const SamplePath& path, const group::WordMetric& metric,
                                                    const group::Presentation& p, std::size_t k_max);

} // namespace cusp::walk
