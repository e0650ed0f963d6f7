#include "cusp/flat_cylinder.hpp"
#include "cusp/hyperbolic.hpp"
#include "cusp/random.hpp"
#include "experiment_support.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cusp::cli::detail {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

hyp::Mobius random_mobius(Rng& rng) {
    const double a = rng.uniform(0.5, 2.0), b = rng.uniform(-2.0, 2.0), c = rng.uniform(-2.0, 2.0);
    return hyp::Mobius::from_entries(a, b, c, (1.0 + b * c) / a);
}

double circle_map(const hyp::Mobius& m, const hyp::DiscChart& chart, double theta) {
    return chart.to_angle(hyp::apply(m, chart.from_angle(theta)));
}

double max_of(const std::vector<double>& xs) {
    return xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end());
}

// ---- boundary-derivative ----

void run_boundary_derivative(const Config& cfg, RunContext& ctx) {
    const std::uint64_t seed = cfg.seed();
    const auto trials = static_cast<std::size_t>(cfg.integer("trials"));
    const double h = cfg.real("fd_step");
    const hyp::Complex x0(cfg.real("base_x"), cfg.real("base_y"));
    const hyp::DiscChart chart(x0);

    std::vector<hyp::Mobius> maps;
    std::vector<double> thetas;
    for (std::size_t i = 0; i < trials; ++i) {
        Rng rng(derive_seed(seed, i));
        maps.push_back(random_mobius(rng));
        thetas.push_back(rng.uniform(0.0, kTwoPi));
    }

    std::vector<double> analytic(trials), fd(trials);
    const Stopwatch der_clock;
    for (std::size_t i = 0; i < trials; ++i) {
        analytic[i] = hyp::boundary_derivative(maps[i], thetas[i], chart);
        const double diff = circle_map(maps[i], chart, thetas[i] + h) - circle_map(maps[i], chart, thetas[i] - h);
        fd[i] = std::abs(std::remainder(diff, kTwoPi)) / (2.0 * h);
    }
    ctx.timings["derivative"] = der_clock.seconds();

    std::vector<double> max_log(trials), disp(trials);
    const Stopwatch disp_clock;
    for (std::size_t i = 0; i < trials; ++i) {
        max_log[i] = hyp::max_log_derivative(maps[i], chart);
        disp[i] = hyp::distance(x0, hyp::apply(maps[i], x0));
    }
    ctx.timings["displacement"] = disp_clock.seconds();

    csv::Writer out(ctx.file("derivative.csv"), {"trial", "theta", "derivative", "finite_difference", "relative_error",
                                                 "max_log_derivative", "displacement", "displacement_error"});
    double worst_rel = 0.0, worst_disp = 0.0;
    for (std::size_t i = 0; i < trials; ++i) {
        const double rel = std::abs(fd[i] - analytic[i]) / analytic[i];
        const double de = std::abs(max_log[i] - disp[i]);
        worst_rel = std::max(worst_rel, rel);
        worst_disp = std::max(worst_disp, de);
        out.field(i).field(thetas[i]).field(analytic[i]).field(fd[i]).field(rel).field(max_log[i]).field(disp[i])
            .field(de);
        out.end_row();
    }
    ctx.summary["max_relative_error"] = worst_rel;
    ctx.summary["max_displacement_error"] = worst_disp;
}

std::vector<CriterionResult> verify_boundary_derivative(const fs::path& dir, const Json& manifest) {
    const csv::Table t = load(dir, "derivative.csv");
    const std::size_t n = t.rows.size();
    const double rel = max_of(column(t, "relative_error"));
    const double disp = max_of(column(t, "displacement_error"));
    const double t1 = timing(manifest, "derivative"), t2 = timing(manifest, "displacement");
    return {
        result(1, n >= 1000 && rel < 1e-6 && t1 < 1.0,
               "trials " + std::to_string(n) + " (need 1000), max rel error " + num(rel) + " (< 1e-6), " + num(t1) +
                   " s (< 1 s)"),
        result(2, n >= 1000 && disp < 1e-9 && t2 < 5.0,
               "trials " + std::to_string(n) + " (need 1000), max |log sup g' - d| " + num(disp) + " (< 1e-9), " +
                   num(t2) + " s (< 5 s)"),
    };
}

// ---- excursion-equivalence ----

void run_excursion_equivalence(const Config& cfg, RunContext& ctx) {
    const std::uint64_t seed = cfg.seed();
    const auto trials = static_cast<std::size_t>(cfg.integer("trials"));
    const auto calibration = static_cast<std::size_t>(cfg.integer("calibration"));
    if (calibration >= trials) throw ConfigError("calibration must be smaller than trials");
    const double dmin = cfg.real("diameter_min"), dmax = cfg.real("diameter_max");
    if (!(dmin < dmax && dmax <= 1.0)) throw ConfigError("need diameter_min < diameter_max <= 1");
    const hyp::Complex x0(0.0, 1.0);
    const hyp::DiscChart chart(x0);

    csv::Writer out(ctx.file("excursions.csv"), {"trial", "calibration", "disc_diameter", "angle_fraction", "visual",
                                                 "boundary", "difference", "ratio"});
    for (std::size_t i = 0; i < trials; ++i) {
        Rng rng(derive_seed(seed, i));
        // A horoball of the given disc diameter in a uniform direction, and a
        // ray from x0 at a uniform angle inside the crossing sector.
        const double s = rng.uniform(dmin, dmax);
        const double base_angle = rng.uniform(0.0, kTwoPi);
        const hyp::BoundaryPoint base = chart.from_angle(base_angle);
        const hyp::Horoball H = hyp::horoball_at_distance(x0, base, hyp::horoball_distance(s));
        const double phi_max = std::asin(s / (2.0 - s));
        const double u = rng.uniform_open();
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const hyp::Geodesic g(x0, chart.from_angle(base_angle + sign * u * phi_max));
        const double visual = hyp::excursion_visual(g, H);
        const double boundary = hyp::excursion_boundary(g, H);
        out.field(i).field(i < calibration ? 1 : 0).field(s).field(u).field(visual).field(boundary)
            .field(std::abs(visual - boundary)).field(boundary / visual);
        out.end_row();
    }
}

std::vector<CriterionResult> verify_excursion_equivalence(const fs::path& dir, const Json&) {
    const csv::Table t = load(dir, "excursions.csv");
    const auto cal = column(t, "calibration");
    const auto diff = column(t, "difference");
    const auto ratio = column(t, "ratio");
    double C = 0.0, worst = 0.0;
    std::size_t outliers = 0, held = 0;
    for (std::size_t i = 0; i < diff.size(); ++i)
        if (cal[i] == 1.0) C = std::max(C, diff[i]);
    for (std::size_t i = 0; i < diff.size(); ++i) {
        if (cal[i] == 1.0) continue;
        ++held;
        worst = std::max(worst, diff[i]);
        if (diff[i] > C + 1e-6) ++outliers;
    }
    const auto [rlo, rhi] = std::minmax_element(ratio.begin(), ratio.end());
    const bool pass = t.rows.size() >= 1000 && held > 0 && outliers == 0;
    return {result(10, pass,
                   "configs " + std::to_string(t.rows.size()) + " (need 1000), fitted C " + num(C) +
                       " on calibration rows, held-out max " + num(worst) + ", outliers " + std::to_string(outliers) +
                       "/" + std::to_string(held) + "; boundary/visual in [" + num(ratio.empty() ? 0 : *rlo) + ", " +
                       num(ratio.empty() ? 0 : *rhi) + "]")};
}

// ---- cylinder-check ----

void run_cylinder_check(const Config& cfg, RunContext& ctx) {
    const double lo = cfg.real("log_theta_min"), hi = cfg.real("log_theta_max"), step = cfg.real("log_theta_step");
    if (!(lo < hi) || !(hi < std::log10(std::numbers::pi / 2.0)))
        throw ConfigError("need log_theta_min < log_theta_max < log10(pi/2)");
    const Stopwatch clock;
    csv::Writer out(ctx.file("cylinder.csv"),
                    {"ell0", "theta0", "area", "eps", "t_entry", "t_exit", "entry_residual", "exit_residual",
                     "twist_closed_form", "twist_direct", "twist_residual", "near_tangent", "ratio", "excluded"});
    std::size_t rows = 0;
    for (double ell0 : cfg.reals("ell0"))
        for (double eps : cfg.reals("eps"))
            for (double area : cfg.reals("area"))
                for (long k = 0;; ++k) {
                    const double lt = lo + k * step;
                    if (lt > hi + 1e-9) break;
                    const flat::CylinderParams p{ell0, std::pow(10.0, lt), area, eps};
                    const auto tt = flat::entry_exit_times(p);
                    if (!tt || eps / (ell0 * ell0) > 1.0) continue;
                    const double closed = flat::twist_difference(p);
                    const double direct = flat::twist_at(p, tt->second) - flat::twist_at(p, tt->first);
                    const flat::Comparison c = flat::excursion_comparison(p);
                    out.field(ell0).field(p.theta0).field(area).field(eps).field(tt->first).field(tt->second)
                        .field(std::abs(flat::length_sq_at(p, tt->first) / eps - 1.0))
                        .field(std::abs(flat::length_sq_at(p, tt->second) / eps - 1.0))
                        .field(closed)
                        .field(direct)
                        .field(std::abs(closed - direct) / std::abs(closed))
                        .field(tt->second - tt->first < 1e-3 ? 1 : 0)
                        .field(c.ratio)
                        .field(c.excluded ? 1 : 0);
                    out.end_row();
                    ++rows;
                }
    ctx.timings["sweep"] = clock.seconds();
    ctx.summary["rows"] = rows;
}

std::vector<CriterionResult> verify_cylinder_check(const fs::path& dir, const Json& manifest) {
    const csv::Table t = load(dir, "cylinder.csv");
    const auto e1 = column(t, "entry_residual"), e2 = column(t, "exit_residual");
    const auto tw = column(t, "twist_residual"), near = column(t, "near_tangent");
    const auto ratio = column(t, "ratio"), excl = column(t, "excluded");
    double len = 0.0, twist = 0.0, rlo = 1e300, rhi = 0.0;
    std::size_t compared = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        len = std::max({len, e1[i], e2[i]});
        if (near[i] == 0.0) twist = std::max(twist, tw[i]);
        if (excl[i] == 0.0) {
            ++compared;
            rlo = std::min(rlo, ratio[i]);
            rhi = std::max(rhi, ratio[i]);
        }
    }
    const double secs = timing(manifest, "sweep");
    const bool pass = !t.rows.empty() && compared > 0 && len < 1e-9 && twist < 1e-9 && rlo >= 0.1 && rhi <= 10.0 &&
                      secs < 1.0;
    return {result(9, pass,
                   "rows " + std::to_string(t.rows.size()) + ", length residual " + num(len) + ", twist residual " +
                       num(twist) + " (< 1e-9), ratio in [" + num(compared ? rlo : 0) + ", " + num(rhi) + "] over " +
                       std::to_string(compared) + " rows (within [0.1, 10]), " + num(secs) + " s (< 1 s)")};
}

} // namespace

Experiment boundary_derivative_experiment() {
    Schema s = common_keys(1000);
    s.push_back({"fd_step", ValueType::real, "1e-6", "step of the symmetric finite difference, radians", true});
    s.push_back({"base_x", ValueType::real, "0.5", "real part of the chart basepoint", false});
    s.push_back({"base_y", ValueType::real, "0.7", "imaginary part of the chart basepoint", true});
    return {"boundary-derivative",
            "closed-form circle derivative against finite differences; sup log g' against displacement",
            s,
            {1, 2},
            {"derivative.csv"},
            run_boundary_derivative,
            verify_boundary_derivative};
}

Experiment excursion_equivalence_experiment() {
    Schema s = common_keys(1000);
    s.push_back({"calibration", ValueType::integer, "500", "leading trials used to fit the additive constant", true});
    s.push_back({"diameter_min", ValueType::real, "0.05", "least disc diameter of the horoball", true});
    s.push_back({"diameter_max", ValueType::real, "0.9", "largest disc diameter of the horoball", true});
    return {"excursion-equivalence",
            "visual excursion phi_max/phi_0 against horocyclic excursion length; additive constant fitted on a "
            "calibration split",
            s,
            {10},
            {"excursions.csv"},
            run_excursion_equivalence,
            verify_excursion_equivalence};
}

Experiment cylinder_check_experiment() {
    Schema s;
    s.push_back({"ell0", ValueType::real_list, "0.5,1,2", "initial core-curve lengths", true});
    s.push_back({"eps", ValueType::real_list, "0.001,0.01", "squared-length thresholds", true});
    s.push_back({"area", ValueType::real_list, "1,2", "cylinder areas", true});
    s.push_back({"log_theta_min", ValueType::real, "-4", "log10 of the smallest theta0", false});
    s.push_back({"log_theta_max", ValueType::real, "-1", "log10 of the largest theta0", false});
    s.push_back({"log_theta_step", ValueType::real, "0.05", "log10 spacing of theta0", true});
    return {"cylinder-check",
            "flat-cylinder entry/exit times, twist closed form and twist against visual excursion size",
            s,
            {9},
            {"cylinder.csv"},
            run_cylinder_check,
            verify_cylinder_check};
}

} // namespace cusp::cli::detail
