#include "fairgap/radar.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fairgap::report {

namespace {

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

// sample standard deviation (n-1); 0 for fewer than two points
double stddev_of(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

double cov_of(const std::vector<double>& xs, const std::vector<double>& ys, double mx,
              double my) {
    if (xs.size() < 2) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (xs[i] - mx) * (ys[i] - my);
    return s / static_cast<double>(xs.size() - 1);
}

RadarAxis make_axis(const std::vector<double>& errors, const std::vector<double>& deltas) {
    RadarAxis ax;
    ax.runs = deltas.size();
    ax.mean = mean_of(deltas);
    ax.stddev = stddev_of(deltas, ax.mean);
    const double me = mean_of(errors);
    ax.cov_with_error[0] = cov_of(errors, errors, me, me);
    ax.cov_with_error[1] = cov_of(errors, deltas, me, ax.mean);
    ax.cov_with_error[2] = ax.cov_with_error[1];
    ax.cov_with_error[3] = cov_of(deltas, deltas, ax.mean, ax.mean);
    return ax;
}

}  // namespace

RadarReport aggregate_radar(std::span<const train::RunRecord> records) {
    RadarReport report;

    std::map<std::string, std::vector<const train::RunRecord*>> groups;
    for (const auto& rec : records) groups[rec.objective_label].push_back(&rec);

    for (auto& [label, recs] : groups) {
        // canonical order makes the floating-point sums permutation-invariant
        std::sort(recs.begin(), recs.end(),
                  [](const train::RunRecord* x, const train::RunRecord* y) {
                      if (x->config_hash != y->config_hash) return x->config_hash < y->config_hash;
                      if (x->fold != y->fold) return x->fold < y->fold;
                      return x->seed < y->seed;
                  });

        RadarEntry entry;
        entry.objective = label;
        entry.runs = recs.size();

        std::vector<double> errors;
        for (const auto* r : recs) errors.push_back(r->test.error);
        entry.mean_error = mean_of(errors);
        entry.std_error = stddev_of(errors, entry.mean_error);

        auto collect = [&](auto field, const char* axis) {
            std::vector<double> errs, deltas;
            for (const auto* r : recs) {
                const auto& v = r->test.*field;
                if (v) {
                    errs.push_back(r->test.error);
                    deltas.push_back(*v);
                }
            }
            if (deltas.size() < recs.size())
                report.warnings.push_back("objective " + label + ", axis " + axis + ": " +
                                          std::to_string(recs.size() - deltas.size()) +
                                          " run(s) with an undefined delta skipped");
            return make_axis(errs, deltas);
        };
        entry.dtpr = collect(&train::EvalSummary::dtpr, "dTPR");
        entry.dfpr = collect(&train::EvalSummary::dfpr, "dFPR");
        entry.dppv = collect(&train::EvalSummary::dppv, "dPPV");
        entry.dnpv = collect(&train::EvalSummary::dnpv, "dNPV");
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace fairgap::report
