#include "cusp/group.hpp"
#include "cusp/random.hpp"
#include "cusp/stats.hpp"
#include "cusp/walk.hpp"
#include "experiment_support.hpp"

#include <algorithm>

namespace cusp::cli::detail {

namespace {

group::Presentation presentation_from(const Config& cfg) {
    const std::string& name = cfg.text("presentation");
    if (name == "modular") return group::Presentation::modular();
    try {
        return group::Presentation::load(name);
    } catch (const std::exception& e) {
        throw ConfigError("presentation '" + name + "': " + e.what());
    }
}

void run_tracking(const Config& cfg, RunContext& ctx) {
    const std::uint64_t seed = cfg.seed();
    const auto trials = static_cast<std::size_t>(cfg.integer("trials"));
    std::vector<std::size_t> ks;
    for (auto k : cfg.integers("checkpoints")) ks.push_back(static_cast<std::size_t>(k));
    if (ks.empty()) throw ConfigError("checkpoints must not be empty");
    const std::size_t k_max = *std::max_element(ks.begin(), ks.end());

    const group::Presentation p = presentation_from(cfg);
    const walk::StepDistribution mu = walk::StepDistribution::uniform(p);
    const hyp::Complex x0 = p.basepoint();

    const Stopwatch clock;
    csv::Writer out(ctx.file("tracking.csv"), {"path", "seed", "k", "deviation"});
    for (std::size_t i = 0; i < trials; ++i) {
        const walk::SamplePath path = walk::sample_path(mu, k_max + walk::kTrackingLead, derive_seed(seed, i));
        const std::vector<double> dev = walk::tracking_deviation(path, x0, k_max);
        for (std::size_t k : ks) {
            out.field(i).field(path.seed).field(k).field(dev[k - 1]);
            out.end_row();
        }
    }
    ctx.timings["tracking"] = clock.seconds();
}

std::vector<CriterionResult> verify_tracking(const fs::path& dir, const Json&) {
    const csv::Table t = load(dir, "tracking.csv");
    const auto d100 = select(t, "k", 100, "deviation");
    const auto d1000 = select(t, "k", 1000, "deviation");
    if (d100.empty() || d1000.empty()) return {result(8, false, "needs deviations at k = 100 and k = 1000")};
    const double m100 = stats::median(d100), m1000 = stats::median(d1000);
    const bool pass = d100.size() >= 100 && d1000.size() >= 100 && m1000 < 0.5 * m100;
    return {result(8, pass,
                   "median d(w_k x0, gamma)/k at k=100 " + num(m100) + ", k=1000 " + num(m1000) + " (ratio " +
                       num(m1000 / m100) + ", need < 0.5) over " + std::to_string(d1000.size()) +
                       " paths (need 100)")};
}

} // namespace

Experiment tracking_experiment() {
    Schema s = common_keys(100);
    s[1].help = "sample paths of the uniform walk";
    s.push_back({"checkpoints", ValueType::integer_list, "10,100,1000", "steps k where the deviation is recorded", true});
    s.push_back({"presentation", ValueType::text, "modular",
                 "'modular' for {S, T, T^-1} or the path of a presentation file", false});
    return {"tracking", "distance from the walk to the geodesic through its hitting point, divided by k", s, {8},
            {"tracking.csv"}, run_tracking, verify_tracking};
}

} // namespace cusp::cli::detail
