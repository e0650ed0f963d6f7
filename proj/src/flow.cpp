#include "cusp/flow.hpp"

#include "cusp/random.hpp"
#include "cusp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cusp::flow {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// Number of n >= 1 with n log 2 <= d, robust at the thresholds themselves.
long psi_levels(double depth) {
    if (!(depth > 0.0)) return 0;
    return static_cast<long>(std::floor(depth / kLn2 * (1.0 + 1e-12) + 1e-12));
}

double log_cosh(double x) {
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - kLn2;
}

double overlap(double a, double b, double lo, double hi) {
    return std::max(0.0, std::min(b, hi) - std::max(a, lo));
}

} // namespace

hyp::BoundaryPoint sample_boundary(std::uint64_t seed) {
    Rng rng(seed);
    return hyp::BoundaryPoint::at(rng.uniform_open());
}

double sample_disc_angle(std::uint64_t seed) {
    Rng rng(seed);
    return 2.0 * std::numbers::pi * rng.uniform();
}

ContinuedFraction sample_endpoint_cf(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    return modular::sample_cf(rng, n);
}

ContinuedFraction sample_endpoint_cf_for_time(std::uint64_t seed, double T) {
    std::size_t n = std::max<std::size_t>(16, static_cast<std::size_t>(T / 2.0));
    for (;;) {
        ContinuedFraction cf = sample_endpoint_cf(seed, n + modular::kTailGuard);
        const auto times = modular::ford_passage_times(cf, n);
        if (times.back() >= T) return cf;
        n += n / 2;
    }
}

TrajectorySummary run_geodesic(const ContinuedFraction& cf, const std::vector<std::size_t>& checkpoints,
                               std::uint64_t seed) {
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] == 0) throw std::invalid_argument("checkpoints must be positive");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
            throw std::invalid_argument("checkpoints must be strictly increasing");
    }
    TrajectorySummary out;
    out.seed = seed;
    out.r = cf.value().to_double();
    if (checkpoints.empty()) return out;
    const std::size_t n_max = checkpoints.back();
    out.records = modular::excursions_from_cf(cf, n_max);
    const std::vector<double> times = modular::ford_passage_times(cf, n_max);
    mpz_class sum = 0;
    std::size_t used = 0;
    for (std::size_t n : checkpoints) {
        for (; used < n; ++used) sum += static_cast<unsigned long>(cf.coeffs[used]);
        Checkpoint c;
        c.n = n;
        c.time = times[n - 1];
        c.word_proxy = sum;
        c.rel_proxy = n;
        c.rho = mpq_class(sum, mpz_class(static_cast<unsigned long>(n))).get_d();
        c.psi_avg = psi_average(out.records, c.time);
        c.max_depth = max_depth(out.records, c.time);
        out.checkpoints.push_back(std::move(c));
    }
    return out;
}

TrajectorySummary run_geodesic(std::uint64_t seed, const std::vector<std::size_t>& checkpoints) {
    const std::size_t n = checkpoints.empty() ? 0 : checkpoints.back();
    return run_geodesic(sample_endpoint_cf(seed, n + modular::kTailGuard), checkpoints, seed);
}

double psi_value(double depth) {
    const long levels = psi_levels(depth);
    if (levels >= 1023) return std::numeric_limits<double>::infinity();
    return std::ldexp(1.0, static_cast<int>(levels) + 1) - 2.0;
}

double depth_at(const ExcursionRecord& rec, double t) {
    if (rec.open) return t - rec.entry;
    const double mid = 0.5 * (rec.entry + rec.exit);
    return rec.depth - log_cosh(t - mid);
}

double psi_excursion_integral(const ExcursionRecord& rec, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    double total = 0.0;
    if (rec.open) {
        // Depth grows at unit rate after entry; level n is reached at entry + n log 2.
        const double top = hi - rec.entry;
        const long levels = psi_levels(top);
        for (long n = 1; n <= levels; ++n)
            total += std::ldexp(1.0, static_cast<int>(n)) * overlap(rec.entry + n * kLn2, hi, lo, hi);
        return total;
    }
    const double mid = 0.5 * (rec.entry + rec.exit);
    const long levels = psi_levels(rec.depth);
    for (long n = 1; n <= levels; ++n) {
        // depth >= n log 2 iff cosh(t - mid) <= R / 2^n
        const double ratio = std::exp(rec.depth - n * kLn2);
        const double h = std::acosh(std::max(ratio, 1.0));
        total += std::ldexp(1.0, static_cast<int>(n)) * overlap(mid - h, mid + h, lo, hi);
    }
    return total;
}

double psi_integral(const std::vector<ExcursionRecord>& records, double T) {
    double total = 0.0;
    for (const auto& rec : records) total += psi_excursion_integral(rec, 0.0, T);
    return total;
}

double psi_integral_sampled(const std::vector<ExcursionRecord>& records, double T, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step must be positive");
    if (!(T > 0.0)) return 0.0;
    const long steps = static_cast<long>(std::ceil(T / dt));
    double total = 0.0;
    // Horoballs are disjoint, so each grid point sees at most one excursion.
    for (const auto& rec : records) {
        const double hi = rec.open ? T : std::min(rec.exit, T);
        const long k0 = std::max(0L, static_cast<long>(std::ceil(rec.entry / dt - 0.5)));
        const long k1 = std::min(steps - 1, static_cast<long>(std::floor(hi / dt - 0.5)));
        for (long k = k0; k <= k1; ++k) {
            const double t = (k + 0.5) * dt;
            const double width = std::min(dt, T - k * dt);
            total += width * psi_value(depth_at(rec, t));
        }
    }
    return total;
}

double psi_average(const std::vector<ExcursionRecord>& records, double T) {
    if (!(T > 0.0)) return 0.0;
    return psi_integral(records, T) / T;
}

double max_depth(const std::vector<ExcursionRecord>& records, double T) {
    double best = 0.0;
    for (const auto& rec : records) {
        if (rec.entry >= T) continue;
        const double mid = rec.open ? std::numeric_limits<double>::infinity() : 0.5 * (rec.entry + rec.exit);
        const double d = T >= mid ? rec.depth : depth_at(rec, T);
        best = std::max(best, d);
    }
    return best;
}

double khinchin_average(const ContinuedFraction& cf, std::size_t n) {
    if (n == 0 || n > cf.size()) throw std::invalid_argument("khinchin_average: need 1 <= n <= size");
    const mpz_class sum = modular::word_length_proxy(cf, n);
    return mpq_class(sum, mpz_class(static_cast<unsigned long>(n))).get_d();
}

double floor_at(double x, double A) { return x >= A ? x : 0.0; }

std::vector<RatioRow> lebesgue_ratio_table(const std::vector<std::uint64_t>& seeds,
                                           const std::vector<std::size_t>& grid) {
    if (grid.empty()) return {};
    const std::size_t n_max = *std::max_element(grid.begin(), grid.end());
    std::vector<std::vector<double>> rho(grid.size());
    for (std::uint64_t seed : seeds) {
        const ContinuedFraction cf = sample_endpoint_cf(seed, n_max);
        for (std::size_t i = 0; i < grid.size(); ++i) rho[i].push_back(khinchin_average(cf, grid[i]));
    }
    std::vector<RatioRow> out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        RatioRow row;
        row.n = grid[i];
        if (!rho[i].empty()) {
            row.median = stats::median(rho[i]);
            row.q25 = stats::quantile(rho[i], 0.25);
            row.q75 = stats::quantile(rho[i], 0.75);
        }
        out.push_back(row);
    }
    return out;
}

std::vector<TrackPoint> lattice_track(const group::ModularLattice& lattice, const group::WordMetric& metric,
                                      const ContinuedFraction& cf, double T, double step, double A) {
    if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
    const std::size_t n = cf.terminated ? cf.size()
                          : cf.size() > modular::kTailGuard ? cf.size() - modular::kTailGuard
                                                             : 0;
    const auto records = modular::excursions_from_cf(cf, n);
    const double r = cf.value().to_double();
    const hyp::Geodesic g(hyp::Complex(0.0, 1.0), hyp::BoundaryPoint::at(r));
    std::vector<TrackPoint> out;
    for (long k = 0;; ++k) {
        const double t = k * step;
        if (t > T + 1e-12) break;
        TrackPoint p;
        p.t = t;
        const group::LatticePoint lp = lattice.nearest(g.at(t));
        p.distance = lp.distance;
        p.word = metric.length(lp.element, metric.max_exact());
        if (p.word) p.rel = group::modular_rel_length(lp.element).value;
        for (const auto& rec : records)
            if (rec.exit <= t) p.excursion_sum += floor_at(rec.value, A);
        out.push_back(p);
        if (!p.word) break;
    }
    return out;
}

std::vector<TrackPoint> lattice_track(const group::MetricBall& ball, const hyp::Geodesic& g,
                                      const std::vector<double>& times, int search_radius) {
    const group::Presentation& pres = ball.presentation();
    std::vector<TrackPoint> out;
    for (double t : times) {
        TrackPoint p;
        p.t = t;
        try {
            const group::LatticePoint lp = group::nearest_lattice_point(ball, g.at(t), search_radius);
            p.distance = lp.distance;
            p.word = lp.length;
            if (pres.integral()) p.rel = group::rel_length(pres, lp.element, lp.length).value;
        } catch (const group::ResourceError&) {
            p.distance = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(p);
    }
    return out;
}

} // namespace cusp::flow
