#include "cusp/flow.hpp"
#include "cusp/modular.hpp"
#include "cusp/random.hpp"
#include "cusp/stats.hpp"
#include "experiment_support.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

namespace cusp::cli::detail {

namespace {

// ---- gauss-stats ----

void run_gauss_stats(const Config& cfg, RunContext& ctx) {
    const std::uint64_t seed = cfg.seed();
    const auto total = static_cast<std::uint64_t>(cfg.integer("trials"));
    const auto per_seed = static_cast<std::uint64_t>(cfg.integer("coefficients_per_seed"));
    if (cfg.integer("burn_in") < 0) throw ConfigError("burn_in must be nonnegative");
    const auto burn_in = static_cast<std::uint64_t>(cfg.integer("burn_in"));
    const auto max_k = static_cast<std::uint64_t>(cfg.integer("max_k"));

    std::vector<std::uint64_t> counts(max_k + 2, 0); // index max_k + 1 holds the tail
    std::uint64_t drawn = 0;
    const Stopwatch clock;
    for (std::uint64_t i = 0; drawn < total; ++i) {
        Rng rng(derive_seed(seed, i));
        const std::uint64_t take = std::min(per_seed, total - drawn);
        const modular::ContinuedFraction cf = modular::sample_cf(rng, burn_in + take);
        for (std::uint64_t j = burn_in; j < burn_in + take; ++j) ++counts[std::min(cf.coeffs[j], max_k + 1)];
        drawn += take;
    }
    ctx.timings["sampling"] = clock.seconds();

    csv::Writer out(ctx.file("frequencies.csv"), {"k", "tail", "count", "frequency", "gauss_prob", "deviation"});
    double chi2 = 0.0;
    for (std::uint64_t k = 1; k <= max_k + 1; ++k) {
        const bool tail = k == max_k + 1;
        // P(a >= K) = log2(1 + 1/K) under the Gauss measure.
        const double p = tail ? std::log2(1.0 + 1.0 / static_cast<double>(k)) : modular::gauss_prob(k);
        const double f = static_cast<double>(counts[k]) / static_cast<double>(drawn);
        const double expected = p * static_cast<double>(drawn);
        chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
        out.field(k).field(tail ? 1 : 0).field(counts[k]).field(f).field(p).field(f - p);
        out.end_row();
    }
    ctx.summary["coefficients"] = drawn;
    ctx.summary["chi_squared"] = chi2;
    ctx.summary["chi_squared_dof"] = max_k;
}

std::vector<CriterionResult> verify_gauss_stats(const fs::path& dir, const Json& manifest) {
    const csv::Table t = load(dir, "frequencies.csv");
    const auto k = column(t, "k"), count = column(t, "count"), freq = column(t, "frequency"),
               prob = column(t, "gauss_prob");
    double total = 0.0, worst = 0.0;
    int seen = 0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        total += count[i];
        if (k[i] >= 1 && k[i] <= 5) {
            ++seen;
            worst = std::max(worst, std::abs(freq[i] - modular::gauss_prob(static_cast<std::uint64_t>(k[i]))));
            worst = std::max(worst, std::abs(prob[i] - modular::gauss_prob(static_cast<std::uint64_t>(k[i]))));
        }
    }
    const double secs = timing(manifest, "sampling");
    const bool pass = total >= 1e6 && seen == 5 && worst <= 0.005 && secs < 30.0;
    return {result(3, pass,
                   "coefficients " + num(total) + " (need 1e6), max |freq - gauss_prob| over k=1..5 " + num(worst) +
                       " (<= 0.005), " + num(secs) + " s (< 30 s)")};
}

// ---- khinchin ----

void run_khinchin(const Config& cfg, RunContext& ctx) {
    const std::uint64_t seed = cfg.seed();
    const auto trials = static_cast<std::size_t>(cfg.integer("trials"));
    std::vector<std::size_t> grid;
    for (auto n : cfg.integers("checkpoints")) {
        if (n <= 0) throw ConfigError("checkpoints must be positive");
        grid.push_back(static_cast<std::size_t>(n));
    }
    const std::size_t n_max = *std::max_element(grid.begin(), grid.end());
    const Stopwatch clock;
    csv::Writer out(ctx.file("khinchin.csv"), {"trial", "seed", "n", "mean_coefficient"});
    for (std::size_t i = 0; i < trials; ++i) {
        const std::uint64_t s = derive_seed(seed, i);
        const modular::ContinuedFraction cf = flow::sample_endpoint_cf(s, n_max);
        for (std::size_t n : grid) {
            out.field(i).field(s).field(n).field(flow::khinchin_average(cf, n));
            out.end_row();
        }
    }
    ctx.timings["sampling"] = clock.seconds();
}

std::vector<CriterionResult> verify_khinchin(const fs::path& dir, const Json& manifest) {
    const csv::Table t = load(dir, "khinchin.csv");
    const auto lo = select(t, "n", 100, "mean_coefficient");
    const auto hi = select(t, "n", 10000, "mean_coefficient");
    const double secs = timing(manifest, "sampling");
    if (lo.empty() || hi.empty())
        return {result(4, false, "needs checkpoints n = 100 and n = 10000")};
    const double m_lo = stats::median(lo), m_hi = stats::median(hi);
    const bool pass = lo.size() >= 200 && hi.size() >= 200 && m_hi > 1.5 * m_lo && secs < 60.0;
    return {result(4, pass,
                   "seeds " + std::to_string(hi.size()) + " (need 200), median at n=1e2 " + num(m_lo) +
                       ", at n=1e4 " + num(m_hi) + " (ratio " + num(m_hi / m_lo) + ", need > 1.5), " + num(secs) +
                       " s (< 60 s)")};
}

// ---- farey-count ----

void run_farey_count(const Config& cfg, RunContext& ctx) {
    const auto brute_max = static_cast<std::uint64_t>(cfg.integer("brute_max"));
    const auto T = static_cast<std::uint64_t>(cfg.integer("T"));
    csv::Writer out(ctx.file("farey.csv"), {"T", "count", "brute_count", "ratio", "target"});
    const double target = 3.0 / (std::numbers::pi * std::numbers::pi);
    std::uint64_t brute = 0;
    for (std::uint64_t q = 1; q <= brute_max; ++q) {
        for (std::uint64_t p = 1; p <= q; ++p)
            if (std::gcd(p, q) == 1) ++brute;
        const std::uint64_t c = modular::farey_count(q);
        out.field(q).field(c).field(brute).field(static_cast<double>(c) / (double(q) * double(q))).field(target);
        out.end_row();
    }
    if (T > brute_max) {
        const std::uint64_t c = modular::farey_count(T);
        out.field(T).field(c).field(std::string()).field(static_cast<double>(c) / (double(T) * double(T))).field(target);
        out.end_row();
    }
}

std::vector<CriterionResult> verify_farey_count(const fs::path& dir, const Json&) {
    const csv::Table t = load(dir, "farey.csv");
    const auto T = column(t, "T"), count = column(t, "count");
    const auto brute = t.numbers("brute_count");
    std::size_t matched = 0, mismatched = 0;
    std::set<double> covered;
    std::optional<double> at500;
    for (std::size_t i = 0; i < T.size(); ++i) {
        if (T[i] <= 200) {
            if (brute[i] && *brute[i] == count[i]) {
                ++matched;
                covered.insert(T[i]);
            } else {
                ++mismatched;
            }
        }
        if (T[i] == 500) at500 = count[i] / 250000.0;
    }
    const double target = 3.0 / (std::numbers::pi * std::numbers::pi);
    const double rel = at500 ? std::abs(*at500 - target) / target : 1.0;
    const bool pass = covered.size() == 200 && mismatched == 0 && at500 && rel < 0.05;
    return {result(11, pass,
                   "exact match with enumeration for " + std::to_string(covered.size()) + "/200 values of T (" +
                       std::to_string(mismatched) + " mismatches), count(500)/500^2 " + num(at500 ? *at500 : 0.0) +
                       " vs 3/pi^2 " + num(target) + " (rel " + num(rel) + ", < 0.05)")};
}

} // namespace

Experiment gauss_stats_experiment() {
    Schema s = common_keys(1000000);
    s[1].help = "number of continued-fraction coefficients counted";
    s.push_back({"coefficients_per_seed", ValueType::integer, "100", "coefficients taken from each sampled real", true});
    s.push_back({"burn_in", ValueType::integer, "10",
                 "leading coefficients skipped per real; the law of a_1 under Lebesgue measure is not Gauss", false});
    s.push_back({"max_k", ValueType::integer, "20", "largest coefficient value tabulated on its own", true});
    return {"gauss-stats",
            "continued-fraction coefficient frequencies of uniform reals against the Gauss measure",
            s,
            {3},
            {"frequencies.csv"},
            run_gauss_stats,
            verify_gauss_stats};
}

Experiment khinchin_experiment() {
    Schema s = common_keys(200);
    s.push_back({"checkpoints", ValueType::integer_list, "100,1000,10000", "coefficient counts n", true});
    return {"khinchin", "growth of the average coefficient (1/n) sum a_i for uniform reals", s, {4},
            {"khinchin.csv"}, run_khinchin, verify_khinchin};
}

Experiment farey_count_experiment() {
    Schema s;
    s.push_back({"brute_max", ValueType::integer, "200", "every T up to this is checked against enumeration", true});
    s.push_back({"T", ValueType::integer, "500", "large T compared with 3 T^2 / pi^2", true});
    return {"farey-count", "Farey fractions p/q in (0,1] with q <= T, exact count and quadratic asymptotics", s, {11},
            {"farey.csv"}, run_farey_count, verify_farey_count};
}

} // namespace cusp::cli::detail
