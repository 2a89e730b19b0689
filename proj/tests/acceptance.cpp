// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
//
//   acceptance                 run everything
//   acceptance --criterion N   run a single criterion
//
// Training criteria honor FAIRGAP_THREADS (default 2) for suite parallelism;
// results are thread-count independent by construction.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairgap/approx.hpp"
#include "fairgap/dataset.hpp"
#include "fairgap/fixtures.hpp"
#include "fairgap/model.hpp"
#include "fairgap/radar.hpp"
#include "fairgap/rng.hpp"
#include "fairgap/soft_objectives.hpp"
#include "fairgap/sweep.hpp"
#include "fairgap/trainer.hpp"

using namespace fairgap;

namespace {

const std::string kDataDir = FAIRGAP_DATA_DIR;
const std::string kGoldenDir = FAIRGAP_GOLDEN_DIR;

int suite_threads() {
    const char* v = std::getenv("FAIRGAP_THREADS");
    const int t = v ? std::atoi(v) : 2;
    return t >= 1 ? t : 1;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - t0)
               .count() /
           1000.0;
}

JointDistribution random_distribution(std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::array<double, 8> cells{};
    double sum = 0.0;
    for (double& c : cells) {
        c = -std::log1p(-rng.uniform());
        sum += c;
    }
    for (double& c : cells) c /= sum;
    return JointDistribution::from_cells(cells);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
Outcome dataset_statistics_parity() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto compas =
        data::compute_stats(data::load_csv(kDataDir + "/compas.csv", data::compas_schema()));
    const auto nels =
        data::compute_stats(data::load_csv(kDataDir + "/nels.csv", data::nels_schema()));
    const auto synth = data::compute_stats(
        data::generate_colormnist_tabular(60000, 0.3, 16, 0.22, 2718));
    const double elapsed = seconds_since(t0);

    auto close = [](double got, double want, double tol) { return std::abs(got - want) <= tol; };
    bool ok = compas.n == 6172;
    ok = ok && close(*compas.p_y1_given_a0, 0.53, 0.01) && close(*compas.p_y1_given_a1, 0.39, 0.01);
    // the table prints gamma_0 at one decimal (1.1); the unrounded target is 0.53/0.47
    ok = ok && close(*compas.gamma0, 0.53 / 0.47, 0.01) && close(*compas.gamma1, 0.64, 0.01);
    ok = ok && nels.n == 4743;
    ok = ok && close(*nels.gamma0, 0.45, 0.01) && close(*nels.gamma1, 0.94, 0.01);
    ok = ok && close(*synth.p_y1_given_a0, 0.69, 0.02) && close(*synth.p_y1_given_a1, 0.29, 0.02);
    ok = ok && elapsed < 5.0;
    out.pass = ok;
    out.detail = "compas P(Y=1|A)=" + fmt(*compas.p_y1_given_a0) + "/" +
                 fmt(*compas.p_y1_given_a1) + " gamma=" + fmt(*compas.gamma0) + "/" +
                 fmt(*compas.gamma1) + "; nels gamma=" + fmt(*nels.gamma0) + "/" +
                 fmt(*nels.gamma1) + "; synthetic P(Y=1|A)=" + fmt(*synth.p_y1_given_a0) + "/" +
                 fmt(*synth.p_y1_given_a1) + "; " + fmt(elapsed) + " s";
    return out;
}

// ---------------------------------------------------------------- criterion 2
Outcome exact_theorem_sweep() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    approx::SamplerConfig cfg;
    cfg.grid_resolution = 20;
    cfg.mc_samples = 1000000;
    cfg.seed = 20240101;
    cfg.threads = 1;  // the 120 s bound below assumes one thread
    const approx::SweepReport r =
        approx::sweep_distributions(approx::ApproxParams{0.0, 0.0, 0.1}, 0.0, cfg);
    const double elapsed = seconds_since(t0);
    out.pass = r.n_counterexamples == 0 && !r.no_premise_samples && elapsed < 120.0;
    out.detail = std::to_string(r.n_evaluated) + " samples, " +
                 std::to_string(r.n_premise_satisfying) + " premise-satisfying, " +
                 std::to_string(r.n_counterexamples) + " counterexamples, " + fmt(elapsed) + " s";
    return out;
}

// ---------------------------------------------------------------- criterion 3
Outcome approximate_theorem_sweep() {
    Outcome out;
    approx::SamplerConfig cfg;
    cfg.mc_samples = 1000000;
    cfg.seed = 77001;
    cfg.threads = suite_threads();
    const approx::ApproxParams params{0.01, 1e-6, 0.1};
    // pass 1 finds the minimal sufficient K over the sweep
    const approx::SweepReport first = approx::sweep_distributions(params, 0.0, cfg);
    const double k = first.minimal_sufficient_k;
    // at that K the same sweep has zero counterexamples
    const approx::SweepReport at_k = approx::sweep_distributions(params, k, cfg);
    // rerunning with the same seed reproduces K exactly
    const approx::SweepReport rerun = approx::sweep_distributions(params, 0.0, cfg);

    bool ok = std::isfinite(k) && at_k.n_counterexamples == 0 &&
              rerun.minimal_sufficient_k == k;
    std::string baseline_note;
    std::ifstream in(kGoldenDir + "/sweep_k_baseline.json");
    if (in.good()) {
        nlohmann::json j;
        in >> j;
        const double recorded = j.at("minimal_sufficient_k").get<double>();
        const bool match = std::abs(recorded - k) <= 1e-9 * std::max(1.0, std::abs(recorded));
        ok = ok && match;
        baseline_note =
            match ? ", matches recorded baseline" : ", DIFFERS from baseline " + fmt(recorded);
    } else {
        baseline_note = ", baseline file missing";
        ok = false;
    }
    out.pass = ok;
    out.detail = "minimal sufficient K = " + fmt(k) + " over " +
                 std::to_string(first.n_premise_satisfying) + " premise-satisfying samples" +
                 baseline_note;
    return out;
}

// ---------------------------------------------------------------- criterion 4
Outcome bayes_and_claim1() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t bayes_checked = 0;
    for (std::uint64_t s = 0; s < 10000; ++s) {
        const GroupMetrics m = group_metrics(random_distribution(1000003 + s));
        for (int a = 0; a < 2; ++a) {
            const RateSet& r = m.group[a];
            if (r.fpr && m.rho[a] && r.fdr && r.ppv && *r.ppv > 0 && r.tpr) {
                if (std::abs(*r.fpr - *m.rho[a] * (*r.fdr / *r.ppv) * *r.tpr) > 1e-10) {
                    out.detail = "Bayes identity violated at sample " + std::to_string(s);
                    return out;
                }
                ++bayes_checked;
            }
            if (m.rho[a] && r.tnr && r.fnr && *r.fnr > 0 && r.for_ && r.npv && *r.npv > 0) {
                if (std::abs(*m.rho[a] - (*r.tnr / *r.fnr) * (*r.for_ / *r.npv)) > 1e-10) {
                    out.detail = "base-odds identity violated at sample " + std::to_string(s);
                    return out;
                }
            }
        }
    }
    SplitMix64 rng(424243);
    for (int i = 0; i < 100000; ++i) {
        const double eps = rng.uniform(1e-3, 0.3);
        const double c = rng.uniform(0.05, 0.45);
        const double delta = rng.uniform(0.0, eps * eps);
        const double v2 = rng.uniform(c * eps * 1.0001, 2.0);
        const double lo = std::max(c * eps, v2 * std::exp(-eps));
        const double v1 = rng.uniform(lo, v2 * std::exp(eps));
        if (!approx::claim1_ratio_bound(v1, v2, eps, delta, c)) {
            out.detail = "ratio bound violated at sample " + std::to_string(i);
            return out;
        }
    }
    const double elapsed = seconds_since(t0);
    out.pass = elapsed < 30.0;
    out.detail = std::to_string(bayes_checked) +
                 " Bayes-identity checks, 100000 ratio-bound checks, " + fmt(elapsed) + " s";
    return out;
}

// ---------------------------------------------------------------- criterion 5
Outcome gradient_correctness() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<soft::ObjectiveSpec> objectives = {
        {soft::ObjectiveKind::bce, 0.0, std::nullopt, true},
        {soft::ObjectiveKind::deo, 0.2, std::nullopt, true},
        {soft::ObjectiveKind::max_suff_sep_binary, 0.1, std::nullopt, true},
        {soft::ObjectiveKind::sep_max, 0.3, std::nullopt, true},
        {soft::ObjectiveKind::max_suff_sep, 0.3, std::nullopt, true},
    };
    const std::vector<nn::ModelSpec> families = {
        {6, 0, nn::Activation::relu, 0},  // logistic regression
        {6, 8, nn::Activation::relu, 0},  // one-hidden-layer perceptron
    };
    const double h = 1e-5;
    std::size_t checks = 0;

    for (const auto& objective : objectives) {
        for (nn::ModelSpec spec : families) {
            for (std::uint64_t trial = 0; trial < 100; ++trial) {
                // draw batch/params; redraw when a relu kink or sigmoid
                // saturation sits inside the finite-difference window
                soft::Batch batch;
                nn::ParameterVector params;
                for (std::uint64_t sub = 0;; ++sub) {
                    spec.seed = mix_seed(trial * 977 + 11, sub);
                    SplitMix64 rng(spec.seed ^ 0xABCD);
                    const std::size_t n = 24;
                    batch.features = nn::Matrix(n, 6);
                    for (double& v : batch.features.data) v = rng.normal();
                    batch.truths.assign(n, 0);
                    batch.groups.assign(n, 0);
                    for (std::size_t i = 0; i < n; ++i) {
                        batch.truths[i] = static_cast<int>(i & 1);
                        batch.groups[i] = static_cast<int>((i >> 1) & 1);
                    }
                    for (std::size_t i = n; i > 1; --i) {
                        const std::size_t j = rng.below(i);
                        std::swap(batch.truths[i - 1], batch.truths[j]);
                        std::swap(batch.groups[i - 1], batch.groups[j]);
                    }
                    params = nn::init_params(spec);
                    bool safe = true;
                    const auto d = static_cast<std::size_t>(spec.input_dim);
                    const auto hd = static_cast<std::size_t>(spec.hidden_dim);
                    const double* w = params.values.data();
                    for (std::size_t i = 0; i < n && safe; ++i) {
                        double z2;
                        if (hd == 0) {
                            z2 = w[d];
                            for (std::size_t j = 0; j < d; ++j)
                                z2 += w[j] * batch.features.at(i, j);
                        } else {
                            const double* b1 = w + hd * d;
                            const double* w2 = b1 + hd;
                            z2 = w2[hd];
                            for (std::size_t k = 0; k < hd; ++k) {
                                double z1 = b1[k];
                                for (std::size_t j = 0; j < d; ++j)
                                    z1 += w[k * d + j] * batch.features.at(i, j);
                                if (std::abs(z1) < 1e-3) safe = false;
                                z2 += w2[k] * std::max(z1, 0.0);
                            }
                        }
                        if (std::abs(z2) > 20.0) safe = false;
                    }
                    if (safe || sub > 50) break;
                }

                const nn::ParameterVector grad = soft::gradient(spec, params, batch, objective);
                double diff2 = 0.0, norm2 = 0.0;
                nn::ParameterVector work = params;
                for (std::size_t j = 0; j < params.size(); ++j) {
                    work.values[j] = params.values[j] + h;
                    const double up = soft::objective_value(spec, work, batch, objective);
                    work.values[j] = params.values[j] - h;
                    const double down = soft::objective_value(spec, work, batch, objective);
                    work.values[j] = params.values[j];
                    const double fd = (up - down) / (2 * h);
                    diff2 += (grad.values[j] - fd) * (grad.values[j] - fd);
                    norm2 += grad.values[j] * grad.values[j] + fd * fd;
                }
                const double rel = std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-8);
                if (rel >= 1e-5) {
                    out.detail = "relative error " + fmt(rel) + " for objective " +
                                 soft::to_string(objective.kind) + ", hidden_dim " +
                                 std::to_string(spec.hidden_dim) + ", trial " +
                                 std::to_string(trial);
                    return out;
                }
                ++checks;
            }
        }
    }
    const double elapsed = seconds_since(t0);
    out.pass = checks == objectives.size() * families.size() * 100 && elapsed < 60.0;
    out.detail =
        std::to_string(checks) + " finite-difference checks passed, " + fmt(elapsed) + " s";
    return out;
}

// ------------------------------------------------------- criteria 6/7 shared
train::TrainConfig compas_base_config() {
    train::TrainConfig c;
    c.model = {0, 64, nn::Activation::relu, 0};
    c.objective = {soft::ObjectiveKind::bce, 0.0, std::nullopt, true};
    c.epochs = 300;
    c.batch_size = 256;
    c.learning_rate = 0.05;
    c.scheduler_gamma = 0.95;
    c.scheduler_step = 50;
    c.weight_decay = 1e-4;
    c.seed = 1234;
    return c;
}

// ---------------------------------------------------------------- criterion 6
Outcome compas_multiobjective_behavior() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const data::Dataset full = data::load_csv(kDataDir + "/compas.csv", data::compas_schema());
    const data::SplitPlan plan = data::make_split(full, 3, 99);

    train::TrainConfig none = compas_base_config();
    train::TrainConfig deo = none;
    deo.objective = {soft::ObjectiveKind::deo, 0.1, std::nullopt, true};
    train::TrainConfig ours = none;
    ours.objective = {soft::ObjectiveKind::max_suff_sep_binary, 0.1, std::nullopt, true};

    const std::vector<train::TrainConfig> configs{none, deo, ours};
    const train::SuiteResult res =
        train::run_suite(configs, full, plan, 14, suite_threads());  // 42 runs per objective
    if (!res.failures.empty()) {
        out.detail = std::to_string(res.failures.size()) + " training failures";
        return out;
    }
    const report::RadarReport radar = report::aggregate_radar(res.records);
    const report::RadarEntry *e_none = nullptr, *e_deo = nullptr, *e_ours = nullptr;
    for (const auto& e : radar.entries) {
        if (e.objective == "None") e_none = &e;
        if (e.objective == "DEO") e_deo = &e;
        if (e.objective == "Ours") e_ours = &e;
    }
    if (!e_none || !e_deo || !e_ours) {
        out.detail = "missing objective group in the results";
        return out;
    }
    const double elapsed = seconds_since(t0);
    const bool a = e_ours->dtpr.mean <= e_none->dtpr.mean - 0.05;
    const bool b = e_ours->dfpr.mean <= e_deo->dfpr.mean;
    const bool c = (1.0 - e_ours->mean_error) >= (1.0 - e_none->mean_error) - 0.05;
    out.pass = a && b && c && elapsed < 900.0;
    out.detail = "dTPR ours/none " + fmt(e_ours->dtpr.mean) + "/" + fmt(e_none->dtpr.mean) +
                 (a ? " (ok)" : " (FAIL)") + "; dFPR ours/deo " + fmt(e_ours->dfpr.mean) + "/" +
                 fmt(e_deo->dfpr.mean) + (b ? " (ok)" : " (FAIL)") + "; acc ours/none " +
                 fmt(1 - e_ours->mean_error) + "/" + fmt(1 - e_none->mean_error) +
                 (c ? " (ok)" : " (FAIL)") + "; " + std::to_string(res.records.size() / 3) +
                 " runs each, " + fmt(elapsed) + " s";
    return out;
}

// ---------------------------------------------------------------- criterion 7
Outcome compas_finetune_behavior() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const data::Dataset full = data::load_csv(kDataDir + "/compas.csv", data::compas_schema());
    const data::SplitPlan plan = data::make_split(full, 3, 99);

    train::TrainConfig ft = compas_base_config();
    ft.finetune =
        train::FinetuneConfig{180, 5e-4, 0.5, soft::ObjectiveKind::max_suff_sep_binary};

    const std::vector<train::TrainConfig> configs{ft};
    const train::SuiteResult res =
        train::run_suite(configs, full, plan, 5, suite_threads());  // 15 runs
    if (!res.failures.empty() || res.records.size() < 15) {
        out.detail = std::to_string(res.failures.size()) + " training failures";
        return out;
    }
    std::vector<double> drops, accs;
    for (const auto& rec : res.records) {
        const int sw = *rec.switch_epoch;
        const double at_switch = rec.epochs[static_cast<std::size_t>(sw - 1)].max_gap;
        const double final_gap = rec.epochs.back().max_gap;
        drops.push_back(at_switch > 0 ? 1.0 - final_gap / at_switch : 0.0);
        accs.push_back(rec.epochs.back().accuracy);
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    const double med_drop = median(drops);
    const double med_acc = median(accs);
    const double elapsed = seconds_since(t0);
    out.pass = med_drop >= 0.30 && med_acc > 0.60;
    out.detail = "median post-switch gap drop " + fmt(med_drop * 100) +
                 "% (need >= 30%), median final train accuracy " + fmt(med_acc) +
                 " (need > 0.60), " + std::to_string(res.records.size()) + " runs, " +
                 fmt(elapsed) + " s";
    return out;
}

// ---------------------------------------------------------------- criterion 8
Outcome synthetic_balance_property() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const data::Dataset full = data::generate_colormnist_tabular(20000, 0.3, 16, 0.22, 2718);
    const data::SplitPlan plan = data::make_split(full, 5, 99);

    train::TrainConfig base;
    base.model = {0, 64, nn::Activation::relu, 0};
    base.epochs = 50;
    base.batch_size = 256;
    base.learning_rate = 0.1;
    base.scheduler_gamma = 0.95;
    base.scheduler_step = 20;
    base.weight_decay = 1e-4;
    base.seed = 4242;
    train::TrainConfig deo = base;
    deo.objective = {soft::ObjectiveKind::deo, 2.0, std::nullopt, true};
    train::TrainConfig ours = base;
    ours.objective = {soft::ObjectiveKind::max_suff_sep_binary, 2.0, std::nullopt, true};

    const std::vector<train::TrainConfig> configs{deo, ours};
    const train::SuiteResult res =
        train::run_suite(configs, full, plan, 5, suite_threads());  // 25 runs per objective
    if (!res.failures.empty()) {
        out.detail = std::to_string(res.failures.size()) + " training failures";
        return out;
    }
    const report::RadarReport radar = report::aggregate_radar(res.records);
    const report::RadarEntry *e_deo = nullptr, *e_ours = nullptr;
    for (const auto& e : radar.entries) {
        if (e.objective == "DEO") e_deo = &e;
        if (e.objective == "Ours") e_ours = &e;
    }
    if (!e_deo || !e_ours) {
        out.detail = "missing objective group";
        return out;
    }
    auto spread = [](const report::RadarEntry& e) {
        const double mx = std::max({e.dtpr.mean, e.dfpr.mean, e.dppv.mean, e.dnpv.mean});
        const double mn = std::min({e.dtpr.mean, e.dfpr.mean, e.dppv.mean, e.dnpv.mean});
        return mx - mn;
    };
    const double s_ours = spread(*e_ours);
    const double s_deo = spread(*e_deo);
    const double elapsed = seconds_since(t0);
    out.pass = s_ours < s_deo && s_ours <= 0.03;
    out.detail = "spread ours " + fmt(s_ours) + " (band limit 0.03) vs deo " + fmt(s_deo) +
                 "; ours deltas " + fmt(e_ours->dtpr.mean) + "/" + fmt(e_ours->dfpr.mean) + "/" +
                 fmt(e_ours->dppv.mean) + "/" + fmt(e_ours->dnpv.mean) + ", " +
                 std::to_string(res.records.size() / 2) + " runs each, " + fmt(elapsed) + " s";
    return out;
}

// ---------------------------------------------------------------- criterion 9
Outcome observation2_suite() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    SplitMix64 rng(31337);
    for (std::uint64_t s = 0; s < 10000; ++s) {
        const GroupMetrics m = group_metrics(random_distribution(31 * s + 5));
        if (!approx::check_observation2(m, rng.uniform(0.0, 0.3))) {
            out.detail = "implication failed at sample " + std::to_string(s);
            return out;
        }
    }
    const double elapsed = seconds_since(t0);
    out.pass = elapsed < 10.0;
    out.detail = "10000 random distributions, " + fmt(elapsed) + " s";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
    }

    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "dataset statistics parity", dataset_statistics_parity},
        {2, "exact-theorem property sweep", exact_theorem_sweep},
        {3, "approximate-theorem sweep with K baseline", approximate_theorem_sweep},
        {4, "Bayes-identity and ratio-bound suites", bayes_and_claim1},
        {5, "gradient correctness", gradient_correctness},
        {6, "multi-objective training behavior", compas_multiobjective_behavior},
        {7, "finetune training behavior", compas_finetune_behavior},
        {8, "synthetic balance property", synthetic_balance_property},
        {9, "accuracy implication suite", observation2_suite},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
