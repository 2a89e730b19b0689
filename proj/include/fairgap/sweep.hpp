#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fairgap/approx.hpp"

namespace fairgap::approx {

// Sampling plan for the theorem sweep: a structured grid over the 8-cell
// simplex (all cell vectors with entries k/resolution), Monte Carlo draws
// from Dirichlet(1,...,1), or both.
struct SamplerConfig {
    int grid_resolution = 0;          // 0 = no grid pass
    std::uint64_t mc_samples = 0;     // 0 = no Monte Carlo pass
    std::uint64_t seed = 0;
    int threads = 1;                  // sample evaluation is pure; merge is deterministic
};

struct Counterexample {
    std::uint64_t index = 0;          // grid samples first, then MC samples
    std::array<double, 8> cells{};
    TrichotomyVerdict verdict;
};

struct SweepReport {
    ApproxParams params;
    double k_multiplier = 0.0;
    SamplerConfig sampler;
    std::uint64_t n_evaluated = 0;
    std::uint64_t n_premise_satisfying = 0;
    std::uint64_t n_counterexamples = 0;          // total; stored list is capped
    std::vector<Counterexample> counterexamples;  // sorted by sample index
    // max over premise-satisfying samples of the per-sample minimal K; with
    // this multiplier the sweep has zero counterexamples. 0 when eps = 0 or
    // when no sample satisfied the premises.
    double minimal_sufficient_k = 0.0;
    bool no_premise_samples = false;
};

// Draw sample `index` of the plan (grid first, then MC). Exposed for tests.
JointDistribution sweep_sample(const SamplerConfig& cfg, std::uint64_t index);

// Number of grid points at the configured resolution (compositions of
// `resolution` into 8 nonnegative parts).
std::uint64_t grid_point_count(int resolution);

SweepReport sweep_distributions(const ApproxParams& params, double k_multiplier,
                                const SamplerConfig& cfg);

}  // namespace fairgap::approx
