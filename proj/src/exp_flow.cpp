#include "cusp/flow.hpp"
#include "cusp/group.hpp"
#include "cusp/random.hpp"
#include "cusp/stats.hpp"
#include "cusp/walk.hpp"
#include "experiment_support.hpp"

#include <algorithm>
#include <cmath>

namespace cusp::cli::detail {

namespace {

// Walk paths use a seed stream disjoint from the Lebesgue endpoints of the same run.
constexpr std::uint64_t kWalkStream = 0x57414c4bULL;

std::vector<std::size_t> sizes(const Config& cfg, const std::string& key) {
    std::vector<std::size_t> out;
    for (auto v : cfg.integers(key)) out.push_back(static_cast<std::size_t>(v));
    if (out.empty()) throw ConfigError(key + " must not be empty");
    if (!std::is_sorted(out.begin(), out.end()) || std::adjacent_find(out.begin(), out.end()) != out.end())
        throw ConfigError(key + " must be strictly increasing");
    return out;
}

// ---- ratio-dichotomy ----

void run_ratio_dichotomy(const Config& cfg, RunContext& ctx) {
    const std::uint64_t seed = cfg.seed();
    const auto trials = static_cast<std::size_t>(cfg.integer("trials"));
    const auto grid = sizes(cfg, "checkpoints");

    Stopwatch clock;
    {
        csv::Writer out(ctx.file("lebesgue.csv"),
                        {"trial", "seed", "n", "time", "word_proxy", "rel_proxy", "rho", "psi_avg", "max_depth"});
        for (std::size_t i = 0; i < trials; ++i) {
            const std::uint64_t s = derive_seed(seed, i);
            const flow::TrajectorySummary sum = flow::run_geodesic(s, grid);
            for (const auto& c : sum.checkpoints) {
                out.field(i).field(s).field(c.n).field(c.time).field(c.word_proxy.get_str());
                out.field(c.rel_proxy).field(c.rho).field(c.psi_avg).field(c.max_depth);
                out.end_row();
            }
        }
    }
    ctx.timings["lebesgue"] = clock.seconds();

    clock = Stopwatch();
    const auto paths_n = static_cast<std::size_t>(cfg.integer("walk_paths"));
    const auto steps = sizes(cfg, "walk_steps");
    const int radius = static_cast<int>(cfg.integer("ball_radius"));
    const auto drift_n = static_cast<std::size_t>(cfg.integer("drift_step"));
    const group::Presentation p = group::Presentation::modular();
    const group::MetricBall ball(p, radius);
    const group::WordMetric metric(ball);
    const walk::StepDistribution mu = walk::StepDistribution::uniform(p);
    const std::size_t length = std::max(steps.back(), drift_n);

    std::vector<walk::SamplePath> paths;
    paths.reserve(paths_n);
    for (std::size_t i = 0; i < paths_n; ++i)
        paths.push_back(walk::sample_path(mu, length, derive_seed(seed ^ kWalkStream, i)));

    {
        csv::Writer out(ctx.file("walk.csv"), {"path", "seed", "k", "d_word", "d_rel", "ratio"});
        for (std::size_t i = 0; i < paths.size(); ++i) {
            for (std::size_t k : steps) {
                const group::ZMatrix& w = paths[i].locations[k];
                const std::optional<int> word = metric.length(w, metric.max_exact());
                const group::RelLength rel = group::rel_length(p, w, 2 * radius);
                std::optional<double> ratio;
                if (word && rel.value && *rel.value > 0) ratio = static_cast<double>(*word) / *rel.value;
                out.field(i).field(paths[i].seed).field(k).field(word).field(rel.value).field(ratio);
                out.end_row();
            }
        }
    }
    {
        csv::Writer out(ctx.file("drift.csv"), {"kind", "n", "mean", "ci_lo", "ci_hi", "count", "saturated_fraction"});
        const walk::DriftEstimate dw = walk::drift_word(paths, metric, drift_n);
        const walk::DriftEstimate dr = walk::drift_rel(paths, mu, p, drift_n, 2 * radius);
        for (const auto& [kind, d] : {std::pair{"word", dw}, std::pair{"rel", dr}}) {
            out.field(kind).field(d.n).field(d.estimate.mean).field(d.estimate.ci95.lo).field(d.estimate.ci95.hi);
            out.field(d.estimate.count).field(d.saturated_fraction);
            out.end_row();
        }
    }
    ctx.timings["walk"] = clock.seconds();
}

std::vector<CriterionResult> verify_ratio_dichotomy(const fs::path& dir, const Json& manifest) {
    std::vector<CriterionResult> out;

    const csv::Table leb = load(dir, "lebesgue.csv");
    const std::vector<double> grid{100, 1000, 10000};
    std::vector<double> medians;
    std::size_t fewest = SIZE_MAX;
    for (double n : grid) {
        const auto rho = select(leb, "n", n, "rho");
        fewest = std::min(fewest, rho.size());
        medians.push_back(rho.empty() ? std::nan("") : stats::median(rho));
    }
    const bool increasing = medians[0] < medians[1] && medians[1] < medians[2];
    out.push_back(result(5, fewest >= 200 && increasing,
                         "median rho at n=1e2,1e3,1e4: " + num(medians[0]) + ", " + num(medians[1]) + ", " +
                             num(medians[2]) + " (strictly increasing), seeds " + std::to_string(fewest) +
                             " (need 200)"));

    const csv::Table w = load(dir, "walk.csv");
    const auto r10 = select(w, "k", 10, "ratio");
    const auto r30 = select(w, "k", 30, "ratio");
    const auto words30 = select(w, "k", 30, "d_word");
    const auto paths30 = select(w, "k", 30, "k").size();
    // d_G/d_rel is 0/0 for a walk back at the identity; those rows are excluded.
    const auto identity30 = static_cast<std::size_t>(std::count(words30.begin(), words30.end(), 0.0));
    const std::size_t defined30 = paths30 - identity30;
    const double secs = timing(manifest, "walk");
    if (r10.size() < 2 || r30.size() < 2) {
        out.push_back(result(6, false, "walk.csv needs ratios at k = 10 and k = 30"));
    } else {
        const double sd10 = stats::stddev(r10), sd30 = stats::stddev(r30);
        const stats::MeanEstimate m30 = stats::estimate_mean(r30);
        const double leb_median = medians[2];
        const bool pass = paths30 >= 500 && r30.size() == defined30 && sd30 < sd10 && m30.ci95.lo > 0.0 &&
                          !m30.ci95.contains(leb_median) && secs < 600.0;
        out.push_back(result(6, pass,
                             "sd of d_G/d_rel at k=10 " + num(sd10) + ", k=30 " + num(sd30) + " (need smaller); k=30 mean " +
                                 num(m30.mean) + " CI [" + num(m30.ci95.lo) + ", " + num(m30.ci95.hi) +
                                 "] vs 0 and Lebesgue median " + num(leb_median) + "; " +
                                 std::to_string(r30.size()) + "/" + std::to_string(defined30) +
                                 " ratios resolved, " + std::to_string(identity30) + " of " +
                                 std::to_string(paths30) + " paths at the identity (need 500 paths); " + num(secs) +
                                 " s (< 600 s)"));
    }

    const csv::Table d = load(dir, "drift.csv");
    const auto lo = column(d, "ci_lo"), mean = column(d, "mean");
    const std::vector<std::string> kind = d.text("kind");
    std::optional<std::size_t> iw, ir;
    for (std::size_t i = 0; i < kind.size(); ++i) {
        if (kind[i] == "word") iw = i;
        if (kind[i] == "rel") ir = i;
    }
    if (!iw || !ir) {
        out.push_back(result(7, false, "drift.csv needs word and rel rows"));
    } else {
        const bool pass = lo[*iw] > 0.0 && lo[*ir] > 0.0 && mean[*ir] <= mean[*iw];
        out.push_back(result(7, pass,
                             "word drift " + num(mean[*iw]) + " (CI lo " + num(lo[*iw]) + "), rel drift " +
                                 num(mean[*ir]) + " (CI lo " + num(lo[*ir]) + "), rel <= word"));
    }
    return out;
}

// ---- psi-average ----

flow::ExcursionRecord synthetic_excursion(double depth) {
    flow::ExcursionRecord rec;
    rec.depth = depth;
    const double half = std::acosh(std::exp(depth));
    rec.exit = 2.0 * half;
    rec.value = 2.0 * std::sinh(half);
    return rec;
}

void run_psi_average(const Config& cfg, RunContext& ctx) {
    const std::uint64_t seed = cfg.seed();
    const auto trials = static_cast<std::size_t>(cfg.integer("trials"));
    std::vector<double> times = cfg.reals("times");
    const double A = cfg.real("floor");
    const auto wanted = static_cast<std::size_t>(cfg.integer("excursions"));
    const double depth_max = cfg.real("sweep_depth_max");
    const double step = cfg.real("sweep_step");
    if (times.empty()) throw ConfigError("times must not be empty");
    std::sort(times.begin(), times.end());

    // Depth at which the horocyclic length reaches the floor A.
    const double depth_min = std::log(std::cosh(std::asinh(A / 2.0)));
    if (!(depth_max > depth_min)) throw ConfigError("sweep_depth_max must exceed the depth where E = floor");

    Stopwatch clock;
    {
        csv::Writer out(ctx.file("band.csv"), {"depth", "value", "integral", "ratio"});
        const auto count = static_cast<std::size_t>(std::ceil((depth_max - depth_min) / step));
        for (std::size_t i = 0; i <= count; ++i) {
            const double depth = std::min(depth_min + static_cast<double>(i) * step, depth_max);
            const flow::ExcursionRecord rec = synthetic_excursion(depth);
            const double floored = flow::floor_at(rec.value, A);
            if (floored <= 0.0) continue; // rounding just below the floor
            const double integral = flow::psi_excursion_integral(rec, 0.0, rec.exit);
            out.field(depth).field(rec.value).field(integral).field(integral / floored);
            out.end_row();
        }
    }
    ctx.timings["sweep"] = clock.seconds();

    clock = Stopwatch();
    csv::Writer psi(ctx.file("psi.csv"), {"trial", "seed", "T", "psi_average", "max_depth"});
    csv::Writer exc(ctx.file("excursions.csv"),
                    {"trial", "seed", "index", "coefficient", "depth", "value", "floored", "integral", "ratio"});
    std::size_t kept = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        const std::uint64_t s = derive_seed(seed, i);
        const modular::ContinuedFraction cf = flow::sample_endpoint_cf_for_time(s, times.back());
        const std::size_t n = cf.size() - modular::kTailGuard;
        const flow::TrajectorySummary sum = flow::run_geodesic(cf, {n}, s);
        for (double T : times) {
            psi.field(i).field(s).field(T).field(flow::psi_average(sum.records, T));
            psi.field(flow::max_depth(sum.records, T));
            psi.end_row();
        }
        for (const auto& rec : sum.records) {
            if (kept >= wanted) break;
            if (rec.open || rec.exit > times.back()) continue;
            const double floored = flow::floor_at(rec.value, A);
            if (floored <= 0.0) continue;
            const double integral = flow::psi_excursion_integral(rec, rec.entry, rec.exit);
            exc.field(i).field(s).field(rec.index).field(rec.coefficient).field(rec.depth).field(rec.value);
            exc.field(floored).field(integral).field(integral / floored);
            exc.end_row();
            ++kept;
        }
    }
    ctx.timings["trajectories"] = clock.seconds();
    ctx.summary["excursions_kept"] = kept;
}

std::vector<CriterionResult> verify_psi_average(const fs::path& dir, const Json& manifest) {
    const double slack = manifest_config(manifest).real("band_slack");

    const csv::Table band = load(dir, "band.csv");
    const auto sweep = column(band, "ratio");
    const csv::Table exc = load(dir, "excursions.csv");
    const auto ratio = column(exc, "ratio");
    const csv::Table psi = load(dir, "psi.csv");
    const auto lo_avg = select(psi, "T", 100, "psi_average");
    const auto hi_avg = select(psi, "T", 10000, "psi_average");

    if (sweep.empty() || lo_avg.empty() || hi_avg.empty())
        return {result(15, false, "needs a nonempty band sweep and psi averages at T = 1e2 and T = 1e4")};
    const double b_lo = *std::min_element(sweep.begin(), sweep.end());
    const double b_hi = *std::max_element(sweep.begin(), sweep.end());
    std::size_t outside = 0;
    for (double r : ratio)
        if (!(r >= b_lo / slack && r <= b_hi * slack)) ++outside;
    const double m_lo = stats::median(lo_avg), m_hi = stats::median(hi_avg);
    const bool pass = b_lo > 0.0 && ratio.size() >= 1000 && outside == 0 && lo_avg.size() >= 200 &&
                      hi_avg.size() >= 200 && m_hi > m_lo;
    return {result(15, pass,
                   "band [" + num(b_lo) + ", " + num(b_hi) + "] x/÷ " + num(slack) + ": " +
                       std::to_string(ratio.size() - outside) + "/" + std::to_string(ratio.size()) +
                       " excursions inside (need 1000); median psi average at T=1e2 " + num(m_lo) + ", T=1e4 " +
                       num(m_hi) + " over " + std::to_string(hi_avg.size()) + " seeds (need 200)")};
}

} // namespace

Experiment ratio_dichotomy_experiment() {
    Schema s = common_keys(200);
    s[1].help = "Lebesgue-random endpoints";
    s.push_back({"checkpoints", ValueType::integer_list, "100,1000,10000", "coefficient counts n for rho", true});
    s.push_back({"walk_paths", ValueType::integer, "500", "sample paths of the uniform walk on {S, T, T^-1}", true});
    s.push_back({"walk_steps", ValueType::integer_list, "10,30", "steps k where d_G/d_rel is recorded", true});
    s.push_back({"ball_radius", ValueType::integer, "18", "radius of the enumerated word ball", true});
    s.push_back({"drift_step", ValueType::integer, "30", "step n of the drift estimates", true});
    return {"ratio-dichotomy",
            "word/relative length ratio along Lebesgue geodesics and along the uniform random walk, and both drifts",
            s,
            {5, 6, 7},
            {"lebesgue.csv", "walk.csv", "drift.csv"},
            run_ratio_dichotomy,
            verify_ratio_dichotomy};
}

Experiment psi_average_experiment() {
    Schema s = common_keys(200);
    s[1].help = "Lebesgue-random endpoints";
    s.push_back({"times", ValueType::real_list, "100,10000", "times T of the psi averages", true});
    s.push_back({"floor", ValueType::real, "10", "A in floor_A(E): excursions below A count as 0", true});
    s.push_back({"excursions", ValueType::integer, "1000", "closed excursions with E >= A compared with the band", true});
    s.push_back({"sweep_depth_max", ValueType::real, "40", "largest depth of the band sweep", true});
    s.push_back({"sweep_step", ValueType::real, "0.0005", "depth step of the band sweep", true});
    s.push_back({"band_slack", ValueType::real, "1.01", "multiplicative slack on the swept band", true});
    return {"psi-average",
            "psi integrals of single excursions against floor_A(E), and psi averages along Lebesgue geodesics",
            s,
            {15},
            {"band.csv", "excursions.csv", "psi.csv"},
            run_psi_average,
            verify_psi_average};
}

} // namespace cusp::cli::detail
