#pragma once

// Geodesics with Lebesgue-random endpoints on the modular surface: excursion
// statistics, psi-function averages, coefficient growth and word lengths of
// the orbit points they pass.

#include "cusp/group.hpp"
#include "cusp/modular.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace cusp::flow {

using modular::ContinuedFraction;
using modular::ExcursionRecord;

/// Uniform endpoint r in (0,1), deterministic per seed.
hyp::BoundaryPoint sample_boundary(std::uint64_t seed);
/// Uniform angle in [0, 2 pi) on the disc boundary, deterministic per seed.
double sample_disc_angle(std::uint64_t seed);

/// Certified coefficients of the endpoint for `seed` (see modular::sample_cf).
ContinuedFraction sample_endpoint_cf(std::uint64_t seed, std::size_t n);
/// As above, with enough coefficients that the Ford passage times reach T.
ContinuedFraction sample_endpoint_cf_for_time(std::uint64_t seed, double T);

struct Checkpoint {
    std::size_t n = 0;     // coefficients consumed
    double time = 0.0;     // passage time of Ford circle n - 1
    mpz_class word_proxy;  // a_1 + ... + a_n
    std::size_t rel_proxy = 0;
    double rho = 0.0;      // word_proxy / rel_proxy
    double psi_avg = 0.0;  // psi average over [0, time]
    double max_depth = 0.0;
};

struct TrajectorySummary {
    std::uint64_t seed = 0;
    double r = 0.0;
    std::vector<Checkpoint> checkpoints;
    std::vector<ExcursionRecord> records; // Ford excursions up to the last checkpoint
};

/// Ray from i to value(cf), summarized at coefficient counts `checkpoints`
/// (strictly increasing, positive). Needs max(checkpoints) + kTailGuard
/// coefficients unless the expansion is terminated.
TrajectorySummary run_geodesic(const ContinuedFraction& cf, const std::vector<std::size_t>& checkpoints,
                               std::uint64_t seed = 0);
/// Same for the endpoint sampled from `seed`.
TrajectorySummary run_geodesic(std::uint64_t seed, const std::vector<std::size_t>& checkpoints);

/// psi(d) = sum of 2^n over n >= 1 with 2^n <= e^d.
double psi_value(double depth);

/// Depth past the horocycle at time t during an excursion (negative outside).
double depth_at(const ExcursionRecord& rec, double t);

/// Exact integral of psi(depth) over [lo, hi] intersected with the excursion.
double psi_excursion_integral(const ExcursionRecord& rec, double lo, double hi);
/// Exact integral over [0, T] summed over the records.
double psi_integral(const std::vector<ExcursionRecord>& records, double T);
/// Riemann sum with step dt at midpoints; converges to psi_integral.
double psi_integral_sampled(const std::vector<ExcursionRecord>& records, double T, double dt);
/// (1/T) psi_integral. Zero for T <= 0.
double psi_average(const std::vector<ExcursionRecord>& records, double T);

/// Deepest penetration reached during [0, T]; zero without excursions.
double max_depth(const std::vector<ExcursionRecord>& records, double T);

/// (a_1 + ... + a_n) / n.
double khinchin_average(const ContinuedFraction& cf, std::size_t n);

/// x when x >= A, otherwise 0.
double floor_at(double x, double A);

struct RatioRow {
    std::size_t n = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

/// Quantiles of rho = word proxy / relative proxy over the seeds at each n.
std::vector<RatioRow> lebesgue_ratio_table(const std::vector<std::uint64_t>& seeds,
                                           const std::vector<std::size_t>& grid);

struct TrackPoint {
    double t = 0.0;
    std::optional<int> word;   // word length of the nearest orbit point; nullopt past the exact range
    std::optional<long> rel;   // relative length of the same element
    double distance = 0.0;     // from the geodesic point to that orbit point
    double excursion_sum = 0.0; // sum of floor_at(E, A) over excursions finished by t
};

/// Nearest orbit points along the ray from i to value(cf) at t = 0, step, ...,
/// up to T, for PSL(2,Z). Stops early once word lengths leave the exact range.
std::vector<TrackPoint> lattice_track(const group::ModularLattice& lattice, const group::WordMetric& metric,
                                      const ContinuedFraction& cf, double T, double step, double A);

/// General presentations: exhaustive nearest-point search in the ball at the
/// given times. Points whose search radius is exhausted get no word length.
std::vector<TrackPoint> lattice_track(const group::MetricBall& ball, const hyp::Geodesic& g,
                                      const std::vector<double>& times, int search_radius);

} // namespace cusp::flow
