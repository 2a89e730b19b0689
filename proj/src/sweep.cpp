#include "fairgap/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "fairgap/errors.hpp"
#include "fairgap/rng.hpp"

namespace fairgap::approx {

namespace {

// Stored counterexamples are capped; the total is always counted. A sweep is
// expected to produce none, so the cap only matters for deliberately broken K.
constexpr std::size_t kMaxStoredCounterexamples = 1000;

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::array<double, 8> dirichlet_cells(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 rng(mix_seed(seed, index));
    std::array<double, 8> e{};
    double sum = 0.0;
    do {
        sum = 0.0;
        for (double& v : e) {
            v = -std::log1p(-rng.uniform());  // Exp(1)
            sum += v;
        }
    } while (!(sum > 0.0));
    for (double& v : e) v /= sum;
    return e;
}

// Unrank the index-th composition of `total` into 8 nonnegative parts
// (lexicographic by leading cells).
std::array<double, 8> grid_cells(int resolution, std::uint64_t index) {
    std::array<double, 8> cells{};
    int remaining = resolution;
    for (int part = 0; part < 7; ++part) {
        const int parts_left = 7 - part;  // after fixing this one
        for (int v = 0; v <= remaining; ++v) {
            const std::uint64_t count =
                binomial(static_cast<std::uint64_t>(remaining - v) + parts_left - 1,
                         static_cast<std::uint64_t>(parts_left) - 1);
            if (index < count) {
                cells[part] = static_cast<double>(v) / resolution;
                remaining -= v;
                break;
            }
            index -= count;
        }
    }
    cells[7] = static_cast<double>(remaining) / resolution;
    return cells;
}

struct PartialResult {
    std::uint64_t premise_satisfying = 0;
    std::uint64_t counterexample_count = 0;
    double max_needed_k = 0.0;
    std::vector<Counterexample> stored;
};

void evaluate_sample(const ApproxParams& params, double k_multiplier, std::uint64_t index,
                     const std::array<double, 8>& cells, PartialResult& out) {
    const JointDistribution d = JointDistribution::from_cells(cells);
    const TrichotomyVerdict verdict = verify_trichotomy(d, params, k_multiplier);
    if (!verdict.premises_hold) return;
    ++out.premise_satisfying;
    out.max_needed_k = std::max(out.max_needed_k, verdict.needed_k);
    if (!verdict.satisfied_case) {
        ++out.counterexample_count;
        if (out.stored.size() < kMaxStoredCounterexamples)
            out.stored.push_back({index, cells, verdict});
    }
}

void merge(PartialResult& into, PartialResult&& part) {
    into.premise_satisfying += part.premise_satisfying;
    into.counterexample_count += part.counterexample_count;
    into.max_needed_k = std::max(into.max_needed_k, part.max_needed_k);
    for (auto& ce : part.stored)
        if (into.stored.size() < kMaxStoredCounterexamples) into.stored.push_back(std::move(ce));
}

}  // namespace

std::uint64_t grid_point_count(int resolution) {
    if (resolution <= 0) return 0;
    return binomial(static_cast<std::uint64_t>(resolution) + 7, 7);
}

JointDistribution sweep_sample(const SamplerConfig& cfg, std::uint64_t index) {
    const std::uint64_t n_grid = grid_point_count(cfg.grid_resolution);
    if (index < n_grid)
        return JointDistribution::from_cells(grid_cells(cfg.grid_resolution, index));
    if (index - n_grid >= cfg.mc_samples) throw InputError("sweep_sample: index out of range");
    return JointDistribution::from_cells(dirichlet_cells(cfg.seed, index - n_grid));
}

SweepReport sweep_distributions(const ApproxParams& params, double k_multiplier,
                                const SamplerConfig& cfg) {
    params.validate();
    // fail before any worker starts; verify_trichotomy would reject this per sample
    if (params.epsilon == 0.0 && params.delta > 0.0)
        throw InputError("sweep: delta > 0 requires eps > 0 (delta = o(eps))");
    if (!(k_multiplier >= 0.0)) throw InputError("sweep: K must be nonnegative");
    if (cfg.grid_resolution < 0) throw InputError("sweep: grid resolution must be >= 0");
    if (cfg.threads < 1) throw InputError("sweep: thread count must be >= 1");

    SweepReport report;
    report.params = params;
    report.k_multiplier = k_multiplier;
    report.sampler = cfg;

    PartialResult total;

    // Grid pass: direct enumeration of compositions, serial (lexicographic,
    // matching grid_cells unranking).
    const std::uint64_t n_grid = grid_point_count(cfg.grid_resolution);
    if (cfg.grid_resolution > 0) {
        const int res = cfg.grid_resolution;
        std::array<int, 8> parts{};
        std::uint64_t index = 0;
        auto enumerate = [&](auto&& self, int depth, int remaining) -> void {
            if (depth == 7) {
                parts[7] = remaining;
                std::array<double, 8> cells{};
                for (int i = 0; i < 8; ++i) cells[i] = static_cast<double>(parts[i]) / res;
                evaluate_sample(params, k_multiplier, index, cells, total);
                ++index;
                return;
            }
            for (int v = 0; v <= remaining; ++v) {
                parts[depth] = v;
                self(self, depth + 1, remaining - v);
            }
        };
        enumerate(enumerate, 0, res);
    }

    // Monte Carlo pass: parallel over contiguous index chunks; per-sample RNG
    // depends only on (seed, sample index) so chunking cannot change results.
    if (cfg.mc_samples > 0) {
        const int threads = static_cast<int>(
            std::min<std::uint64_t>(static_cast<std::uint64_t>(cfg.threads), cfg.mc_samples));
        std::vector<PartialResult> parts(static_cast<std::size_t>(threads));
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (cfg.mc_samples + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                const std::uint64_t lo = static_cast<std::uint64_t>(t) * chunk;
                const std::uint64_t hi = std::min(cfg.mc_samples, lo + chunk);
                for (std::uint64_t i = lo; i < hi; ++i) {
                    evaluate_sample(params, k_multiplier, n_grid + i,
                                    dirichlet_cells(cfg.seed, i), parts[t]);
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& p : parts) merge(total, std::move(p));
    }

    report.n_evaluated = n_grid + cfg.mc_samples;
    report.n_premise_satisfying = total.premise_satisfying;
    report.n_counterexamples = total.counterexample_count;
    report.counterexamples = std::move(total.stored);
    std::sort(report.counterexamples.begin(), report.counterexamples.end(),
              [](const Counterexample& x, const Counterexample& y) { return x.index < y.index; });
    report.minimal_sufficient_k = total.max_needed_k;
    report.no_premise_samples = total.premise_satisfying == 0;
    return report;
}

}  // namespace fairgap::approx
