#include "cusp/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace cusp::walk {

namespace {

constexpr double kPi = std::numbers::pi;

// Exact complex rational, enough for Moebius images of a rational basepoint.
struct QComplex {
    mpq_class re, im;
};

QComplex exact(Complex z) { return {mpq_class(z.real()), mpq_class(z.imag())}; }

QComplex act(const ZMatrix& w, const QComplex& z) {
    const mpq_class nr = w.a * z.re + w.b, ni = w.a * z.im;
    const mpq_class dr = w.c * z.re + w.d, di = w.c * z.im;
    const mpq_class den = dr * dr + di * di;
    return {(nr * dr + ni * di) / den, (ni * dr - nr * di) / den};
}

// Boundary point of the half-plane: nullopt is infinity.
using QBoundary = std::optional<mpq_class>;

QBoundary act(const ZMatrix& w, const QBoundary& x) {
    if (!x) {
        if (w.c == 0) return std::nullopt;
        return mpq_class(w.a, w.c);
    }
    const mpq_class den = w.c * *x + w.d;
    if (den == 0) return std::nullopt;
    return mpq_class((w.a * *x + w.b) / den);
}

double wrap(double a) {
    a = std::fmod(a, 2.0 * kPi);
    return a < 0.0 ? a + 2.0 * kPi : a;
}

// Angle in the disc chart centred at x0 = u0 + i y0.
double chart_angle(const QBoundary& x, const QComplex& x0) {
    if (!x) return 0.0;
    const double u = mpq_class(*x - x0.re).get_d();
    return wrap(2.0 * std::atan2(-x0.im.get_d(), u));
}

double chart_angle(const QComplex& z, const QComplex& x0) {
    // zeta = (z - x0) / (z - conj x0); only its argument is needed.
    const mpq_class nr = z.re - x0.re, ni = z.im - x0.im;
    const mpq_class dr = z.re - x0.re, di = z.im + x0.im;
    const double re = mpq_class(nr * dr + ni * di).get_d();
    const double im = mpq_class(ni * dr - nr * di).get_d();
    return wrap(std::atan2(im, re));
}

QBoundary boundary_from_angle(double theta, const QComplex& x0) {
    // Inverse of chart_angle: arg(u - i y0) = theta / 2 with theta / 2 in (-pi, 0).
    const double phi = wrap(theta) * 0.5 - kPi;
    const double s = std::sin(phi);
    if (std::abs(s) < 1e-300) return std::nullopt;
    const double u = -x0.im.get_d() * std::cos(phi) / s;
    if (!std::isfinite(u)) return std::nullopt;
    return mpq_class(x0.re + mpq_class(u));
}

hyp::BoundaryPoint to_boundary(const QBoundary& x) {
    if (!x) return hyp::BoundaryPoint::infinity();
    return hyp::BoundaryPoint::at(x->get_d());
}

bool hyperbolic(const ZMatrix& g) { return abs(mpz_class(g.a + g.d)) > 2; }

bool commute(const ZMatrix& x, const ZMatrix& y) { return (x * y).canonical() == (y * x).canonical(); }

ZMatrix power(const ZMatrix& g, int k) {
    ZMatrix out;
    for (int i = 0; i < k; ++i) out = out * g;
    return out;
}

// Distance from z to the geodesic line with endpoints u and v.
double distance_to_line(Complex z, const hyp::BoundaryPoint& u, const hyp::BoundaryPoint& v) {
    if (u.infinite || v.infinite) {
        const double x = u.infinite ? v.x : u.x;
        return std::asinh(std::abs(z.real() - x) / z.imag());
    }
    const double c = 0.5 * (u.x + v.x), rho = 0.5 * std::abs(u.x - v.x);
    return std::asinh(std::abs(std::norm(z - c) - rho * rho) / (2.0 * rho * z.imag()));
}

std::optional<long> relative_length(const ZMatrix& g, const group::Presentation& p, int radius_cap) {
    if (p.is_modular()) return group::modular_rel_length(g).value;
    return group::rel_length(p, g, radius_cap).value;
}

} // namespace

StepDistribution StepDistribution::uniform(const group::Presentation& p) {
    if (!p.integral()) throw std::invalid_argument("random walks need an integral presentation");
    StepDistribution mu;
    const double w = 1.0 / static_cast<double>(p.generators().size());
    for (const auto& g : p.generators()) {
        mu.names.push_back(g.name);
        mu.support.push_back(group::to_zmatrix(g.key));
        mu.probs.push_back(w);
    }
    return mu;
}

StepDistribution StepDistribution::point_mass(const ZMatrix& g, const std::string& name) {
    StepDistribution mu;
    mu.names.push_back(name);
    mu.support.push_back(g.canonical());
    mu.probs.push_back(1.0);
    return mu;
}

StepDistribution StepDistribution::heavy_tail(const group::Presentation& p, double rho, int max_power) {
    if (!p.integral()) throw std::invalid_argument("random walks need an integral presentation");
    if (!(rho > 0.0 && rho < 1.0) || max_power < 1) throw std::invalid_argument("heavy tail needs 0 < rho < 1");
    StepDistribution mu;
    for (const auto& g : p.generators()) {
        const ZMatrix m = group::to_zmatrix(g.key);
        if (!g.parabolic) {
            mu.names.push_back(g.name);
            mu.support.push_back(m);
            mu.probs.push_back(1.0);
            continue;
        }
        for (int k = 1; k <= max_power; ++k) {
            mu.names.push_back(k == 1 ? g.name : g.name + "^" + std::to_string(k));
            mu.support.push_back(power(m, k).canonical());
            mu.probs.push_back(std::pow(rho, k));
        }
    }
    const double total = std::accumulate(mu.probs.begin(), mu.probs.end(), 0.0);
    for (double& q : mu.probs) q /= total;
    return mu;
}

void StepDistribution::validate() const {
    if (support.empty() || support.size() != probs.size() || names.size() != probs.size())
        throw std::invalid_argument("step distribution: support and probabilities differ in size");
    double total = 0.0;
    for (double q : probs) {
        if (!(q > 0.0)) throw std::invalid_argument("step distribution: probabilities must be positive");
        total += q;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("step distribution: probabilities must sum to 1");
    for (const auto& g : support)
        if (g.det() != 1) throw std::invalid_argument("step distribution: elements must have determinant 1");
}

std::size_t StepDistribution::draw(Rng& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

bool is_non_elementary(const StepDistribution& mu, int max_length) {
    std::vector<ZMatrix> hyperbolics;
    std::vector<ZMatrix> layer{ZMatrix::identity()};
    auto consider = [&](const ZMatrix& g) {
        if (!hyperbolic(g)) return false;
        for (const auto& h : hyperbolics)
            if (!commute(g, h)) return true;
        hyperbolics.push_back(g);
        return false;
    };
    for (int len = 1; len <= max_length; ++len) {
        std::vector<ZMatrix> next;
        for (const auto& w : layer)
            for (const auto& s : mu.support) {
                const ZMatrix g = (w * s).canonical();
                if (consider(g)) return true;
                next.push_back(g);
            }
        layer = std::move(next);
    }
    return false;
}

SamplePath sample_path(const StepDistribution& mu, std::size_t n, std::uint64_t seed) {
    mu.validate();
    Rng rng(seed);
    SamplePath path;
    path.seed = seed;
    path.steps.reserve(n);
    path.locations.reserve(n + 1);
    path.locations.push_back(ZMatrix::identity());
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = mu.draw(rng);
        path.steps.push_back(static_cast<std::uint32_t>(i));
        path.locations.push_back((path.locations.back() * mu.support[i]).canonical());
    }
    return path;
}

DriftEstimate drift_word(const std::vector<SamplePath>& paths, const group::WordMetric& metric, std::size_t n) {
    if (n == 0) throw std::invalid_argument("drift needs n >= 1");
    DriftEstimate out;
    out.n = n;
    std::vector<double> xs;
    std::size_t saturated = 0;
    for (const auto& path : paths) {
        if (path.length() < n) throw std::invalid_argument("sample path shorter than n");
        const auto len = metric.length(path.locations[n], metric.max_exact());
        if (!len) {
            ++saturated;
            continue;
        }
        xs.push_back(static_cast<double>(*len) / static_cast<double>(n));
    }
    out.estimate = stats::estimate_mean(xs);
    out.saturated_fraction = paths.empty() ? 0.0 : static_cast<double>(saturated) / static_cast<double>(paths.size());
    return out;
}

DriftEstimate drift_rel(const std::vector<SamplePath>& paths, const StepDistribution& mu,
                        const group::Presentation& p, std::size_t n, int radius_cap) {
    if (n == 0) throw std::invalid_argument("drift needs n >= 1");
    if (!is_non_elementary(mu))
        throw ElementaryError("step distribution generates an elementary subgroup; relative drift is not defined");
    DriftEstimate out;
    out.n = n;
    std::vector<double> xs;
    std::size_t saturated = 0;
    for (const auto& path : paths) {
        if (path.length() < n) throw std::invalid_argument("sample path shorter than n");
        const auto len = relative_length(path.locations[n], p, radius_cap);
        if (!len) {
            ++saturated;
            continue;
        }
        xs.push_back(static_cast<double>(*len) / static_cast<double>(n));
    }
    out.estimate = stats::estimate_mean(xs);
    out.saturated_fraction = paths.empty() ? 0.0 : static_cast<double>(saturated) / static_cast<double>(paths.size());
    return out;
}

ShadowBracket shadow_bracket(const ZMatrix& w, Complex x0) {
    const QComplex q0 = exact(x0);
    const QComplex back = act(w.inverse(), q0);
    ShadowBracket out;
    if (back.re == q0.re && back.im == q0.im) {
        // w fixes x0: no preferred direction, the bracket is the whole circle.
        out.diameter = 2.0;
        out.hi = 2.0 * kPi;
        out.point = to_boundary(act(w, boundary_from_angle(kPi, q0)));
        out.centre = chart_angle(act(w, boundary_from_angle(kPi, q0)), q0);
        return out;
    }
    const double rep = chart_angle(back, q0);
    const QBoundary first = act(w, boundary_from_angle(rep + kPi / 3.0, q0));
    const QBoundary last = act(w, boundary_from_angle(rep + 5.0 * kPi / 3.0, q0));
    const QBoundary mid = act(w, boundary_from_angle(rep + kPi, q0));
    out.lo = chart_angle(first, q0);
    out.hi = chart_angle(last, q0);
    out.centre = chart_angle(mid, q0);
    out.point = to_boundary(mid);
    // Moebius maps preserve the circle's orientation.
    const double arc = wrap(out.hi - out.lo);
    out.diameter = arc >= kPi ? 2.0 : 2.0 * std::sin(0.5 * arc);
    return out;
}

HittingPoint hitting_point(const SamplePath& path, double tolerance, Complex x0) {
    const ShadowBracket b = shadow_bracket(path.locations.back(), x0);
    if (!(b.diameter < tolerance))
        throw NotConverged("not converged at length " + std::to_string(path.length()) + " (bracket diameter " +
                           std::to_string(b.diameter) + ")");
    return {b.point, b.centre, b.diameter, path.length()};
}

std::vector<double> tracking_deviation(const SamplePath& path, Complex x0, std::size_t k_max) {
    const std::size_t N = path.length();
    if (N < k_max + kTrackingLead) throw std::invalid_argument("tracking needs k_max + kTrackingLead steps");
    const ShadowBracket limit = shadow_bracket(path.locations[N], x0);
    if (!(limit.diameter < 1e-9)) throw NotConverged("hitting point not resolved at length " + std::to_string(N));
    const QComplex q0 = exact(x0);
    const QBoundary back = boundary_from_angle(limit.centre + kPi, q0);

    // Recover the support elements from consecutive locations.
    std::vector<ZMatrix> steps(N + 1);
    for (std::size_t k = 1; k <= N; ++k) steps[k] = (path.locations[k - 1].inverse() * path.locations[k]).canonical();

    std::vector<double> out(k_max, 0.0);
    ZMatrix tail = ZMatrix::identity(); // g_{k+1} ... g_N
    for (std::size_t k = N; k >= 1; --k) {
        if (k <= k_max) {
            const hyp::BoundaryPoint ahead = shadow_bracket(tail, x0).point;
            const hyp::BoundaryPoint behind = to_boundary(act(path.locations[k].inverse(), back));
            out[k - 1] = distance_to_line(x0, ahead, behind) / static_cast<double>(k);
        }
        tail = (steps[k] * tail).canonical();
    }
    return out;
}

std::vector<std::optional<double>> ratio_along_walk(const SamplePath& path, const group::WordMetric& metric,
                                                    const group::Presentation& p, std::size_t k_max) {
    if (path.length() < k_max) throw std::invalid_argument("sample path shorter than k_max");
    std::vector<std::optional<double>> out;
    for (std::size_t k = 1; k <= k_max; ++k) {
        const ZMatrix& w = path.locations[k];
        const auto word = metric.length(w, metric.max_exact());
        const auto rel = word && *word > 0 ? relative_length(w, p, metric.max_exact()) : std::nullopt;
        if (!word || !rel || *rel == 0) {
            out.push_back(std::nullopt);
            continue;
        }
        out.push_back(static_cast<double>(*word) / static_cast<double>(*rel));
    }
    return out;
}

} // namespace cusp::walk
