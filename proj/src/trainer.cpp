#include "fairgap/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "fairgap/errors.hpp"
#include "fairgap/rng.hpp"

namespace fairgap::train {

namespace {

void hash_mix(std::uint64_t& h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

std::uint64_t double_bits(double v) {
    std::uint64_t out;
    static_assert(sizeof(out) == sizeof(v));
    __builtin_memcpy(&out, &v, sizeof(out));
    return out;
}

soft::Batch to_batch(const data::Dataset& d) {
    return soft::Batch{d.features, d.truths, d.groups};
}

soft::Batch select_batch(const data::Dataset& d, std::span<const std::size_t> idx) {
    soft::Batch b;
    b.features = nn::Matrix(idx.size(), d.features.cols);
    b.truths.resize(idx.size());
    b.groups.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        b.truths[i] = d.truths[idx[i]];
        b.groups[i] = d.groups[idx[i]];
        for (std::size_t c = 0; c < d.features.cols; ++c)
            b.features.at(i, c) = d.features.at(idx[i], c);
    }
    return b;
}

// Stratified minibatch plan: shuffle each (y, a) stratum, deal round-robin so
// every batch sees every nonempty stratum whenever sizes permit.
std::vector<std::vector<std::size_t>> plan_batches(const data::Dataset& d, int batch_size,
                                                   std::uint64_t seed, int epoch) {
    const std::size_t n = d.size();
    if (batch_size <= 0 || static_cast<std::size_t>(batch_size) >= n)
        return {};  // empty = single full batch
    const std::size_t n_batches = (n + batch_size - 1) / static_cast<std::size_t>(batch_size);
    std::vector<std::size_t> strata[4];
    for (std::size_t i = 0; i < n; ++i)
        strata[2 * d.truths[i] + d.groups[i]].push_back(i);
    SplitMix64 rng(mix_seed(seed, 0xE90C + static_cast<std::uint64_t>(epoch)));
    std::vector<std::vector<std::size_t>> batches(n_batches);
    std::size_t cursor = 0;
    for (auto& stratum : strata) {
        for (std::size_t i = stratum.size(); i > 1; --i)
            std::swap(stratum[i - 1], stratum[rng.below(i)]);
        for (std::size_t idx : stratum) batches[cursor++ % n_batches].push_back(idx);
    }
    return batches;
}

double hard_max_gap(const GroupMetrics& m) {
    const FairnessGaps g = fairness_gaps(m);
    double gap = 0.0;
    if (g.suff_binary) gap = std::max(gap, *g.suff_binary);
    if (g.sep_binary) gap = std::max(gap, *g.sep_binary);
    return gap;
}

GroupMetrics hard_metrics(const std::vector<double>& probs, const data::Dataset& d) {
    std::vector<int> preds(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) preds[i] = probs[i] > 0.5 ? 1 : 0;
    return group_metrics(distribution_from_counts(
        counts_from_predictions(preds, d.truths, d.groups)));
}

struct Phase {
    soft::ObjectiveSpec objective;
    double lr0 = 0.0;
    double gamma = 1.0;
    int start_epoch = 0;
};

RunRecord run_training(const TrainConfig& config, const data::Dataset& train_data,
                       const data::Dataset& validation_data, const data::Dataset& test_data) {
    if (train_data.size() == 0) throw InputError("train: empty training set");

    // input width always comes from the data; configs may leave it at 0
    TrainConfig cfg = config;
    cfg.model.input_dim = static_cast<int>(train_data.features.cols);
    cfg.model.seed = cfg.seed;  // run seed drives initialization and shuffles
    cfg.validate();
    const nn::ModelSpec& model = cfg.model;
    nn::ParameterVector params = nn::init_params(model);

    Phase phase1{cfg.objective, cfg.learning_rate, cfg.scheduler_gamma, 0};
    std::optional<Phase> phase2;
    if (cfg.finetune) {
        // phase one of a finetune run is plain BCE regardless of kind
        phase1.objective = soft::ObjectiveSpec{soft::ObjectiveKind::bce, 0.0,
                                               cfg.objective.class_imbalance_weight, true};
        soft::ObjectiveSpec fair{cfg.finetune->finetune_objective, 0.0,
                                 std::nullopt, /*include_bce=*/false};
        phase2 = Phase{fair, cfg.finetune->finetune_lr, cfg.finetune->finetune_gamma,
                       cfg.finetune->switch_epoch};
    }

    RunRecord rec;
    rec.config_hash = cfg.hash();
    rec.seed = cfg.seed;
    if (cfg.finetune) rec.switch_epoch = cfg.finetune->switch_epoch;
    rec.objective_label = objective_label(cfg);
    rec.epochs.reserve(static_cast<std::size_t>(cfg.epochs));

    const soft::Batch full = to_batch(train_data);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const Phase& phase =
            (phase2 && epoch >= phase2->start_epoch) ? *phase2 : phase1;
        const int e = epoch - phase.start_epoch;
        const double lr = phase.lr0 * std::pow(phase.gamma, e / cfg.scheduler_step);

        auto apply = [&](const soft::Batch& batch) {
            nn::ParameterVector grad = soft::gradient(model, params, batch, phase.objective);
            for (std::size_t j = 0; j < params.size(); ++j)
                params.values[j] -=
                    lr * (grad.values[j] + 2.0 * cfg.weight_decay * params.values[j]);
            if (!params.all_finite())
                throw RunError("training diverged (non-finite parameters)", epoch);
        };

        try {
            const auto batches = plan_batches(train_data, cfg.batch_size, cfg.seed, epoch);
            if (batches.empty()) {
                apply(full);
            } else {
                for (const auto& idx : batches) apply(select_batch(train_data, idx));
            }
        } catch (const ObjectiveError& err) {
            throw RunError(std::string("objective undefined during training: ") + err.what(),
                           epoch);
        }

        EpochStats stats;
        stats.lr = lr;
        const std::vector<double> probs = nn::forward(model, params, train_data.features);
        stats.loss = soft::composite_loss(phase.objective,
                                          soft::SoftBatch{probs, train_data.truths,
                                                          train_data.groups});
        const GroupMetrics m = hard_metrics(probs, train_data);
        stats.accuracy = m.acc;
        stats.max_gap = hard_max_gap(m);
        rec.epochs.push_back(stats);

        if (!std::isfinite(stats.loss) || !params.all_finite())
            throw RunError("training diverged (non-finite loss or parameters)", epoch);
    }

    if (validation_data.size() > 0) rec.validation = evaluate(model, params, validation_data);
    rec.test = evaluate(model, params, test_data);  // exactly once, after training
    return rec;
}

}  // namespace

void TrainConfig::validate() const {
    model.validate();
    objective.validate();
    if (epochs < 0) throw InputError("TrainConfig: epochs must be nonnegative");
    if (batch_size < 0) throw InputError("TrainConfig: batch_size must be nonnegative");
    if (!(learning_rate > 0.0)) throw InputError("TrainConfig: learning rate must be positive");
    if (!(scheduler_gamma > 0.0 && scheduler_gamma <= 1.0))
        throw InputError("TrainConfig: scheduler gamma must lie in (0, 1]");
    if (scheduler_step < 1) throw InputError("TrainConfig: scheduler step must be >= 1");
    if (!(weight_decay >= 0.0)) throw InputError("TrainConfig: weight decay must be nonnegative");
    if (finetune) {
        if (finetune->switch_epoch < 0 || finetune->switch_epoch > epochs)
            throw InputError("TrainConfig: switch epoch must lie in [0, epochs]");
        if (!(finetune->finetune_lr > 0.0))
            throw InputError("TrainConfig: finetune lr must be positive");
        if (!(finetune->finetune_gamma > 0.0 && finetune->finetune_gamma <= 1.0))
            throw InputError("TrainConfig: finetune gamma must lie in (0, 1]");
    }
}

bool TrainConfig::within_grid_bounds() const {
    if (!(scheduler_gamma >= 0.1 && scheduler_gamma <= 0.99)) return false;
    if (!(weight_decay >= 1e-6 && weight_decay <= 1e-1)) return false;
    if (!(scheduler_step >= 20 && scheduler_step <= 200)) return false;
    if (!(learning_rate >= 1e-8 && learning_rate <= 1e-1)) return false;
    if (model.hidden_dim != 0 && !(model.hidden_dim >= 64 && model.hidden_dim <= 512))
        return false;
    if (finetune) {
        if (!(finetune->finetune_lr >= 1e-8 && finetune->finetune_lr <= 1e-1)) return false;
        if (!(finetune->finetune_gamma >= 0.1 && finetune->finetune_gamma <= 0.85)) return false;
    }
    return true;
}

std::uint64_t TrainConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    hash_mix(h, static_cast<std::uint64_t>(model.input_dim));
    hash_mix(h, static_cast<std::uint64_t>(model.hidden_dim));
    hash_mix(h, static_cast<std::uint64_t>(model.activation));
    hash_mix(h, static_cast<std::uint64_t>(objective.kind));
    hash_mix(h, double_bits(objective.lambda));
    hash_mix(h, double_bits(objective.class_imbalance_weight.value_or(-1.0)));
    hash_mix(h, objective.include_bce ? 1 : 0);
    hash_mix(h, static_cast<std::uint64_t>(epochs));
    hash_mix(h, static_cast<std::uint64_t>(batch_size));
    hash_mix(h, double_bits(learning_rate));
    hash_mix(h, double_bits(scheduler_gamma));
    hash_mix(h, static_cast<std::uint64_t>(scheduler_step));
    hash_mix(h, double_bits(weight_decay));
    if (finetune) {
        hash_mix(h, static_cast<std::uint64_t>(finetune->switch_epoch));
        hash_mix(h, double_bits(finetune->finetune_lr));
        hash_mix(h, double_bits(finetune->finetune_gamma));
        hash_mix(h, static_cast<std::uint64_t>(finetune->finetune_objective));
    }
    return h;
}

std::string objective_label(const TrainConfig& config) {
    const soft::ObjectiveKind kind =
        config.finetune ? config.finetune->finetune_objective : config.objective.kind;
    if (!config.finetune &&
        (kind == soft::ObjectiveKind::bce || config.objective.lambda == 0.0))
        return "None";
    switch (kind) {
        case soft::ObjectiveKind::bce: return "None";
        case soft::ObjectiveKind::deo: return "DEO";
        case soft::ObjectiveKind::max_suff_sep_binary: return "Ours";
        case soft::ObjectiveKind::sep_max: return "SepMax";
        case soft::ObjectiveKind::max_suff_sep: return "MaxSuffSep";
    }
    return "?";
}

EvalSummary evaluate(const nn::ModelSpec& spec, const nn::ParameterVector& params,
                     const data::Dataset& d) {
    EvalSummary s;
    if (d.size() == 0) throw InputError("evaluate: empty dataset");
    const std::vector<double> probs = nn::forward(spec, params, d.features);
    s.metrics = hard_metrics(probs, d);
    s.gaps = fairness_gaps(s.metrics);
    s.accuracy = s.metrics.acc;
    s.error = 1.0 - s.accuracy;
    const BinaryDeltas b = binary_deltas(s.metrics);
    s.dtpr = b.dtpr;
    s.dfpr = b.dfpr;
    s.dppv = b.dppv;
    s.dnpv = b.dnpv;
    return s;
}

RunRecord train_multiobjective(const TrainConfig& config, const data::Dataset& train_data,
                               const data::Dataset& validation_data,
                               const data::Dataset& test_data) {
    if (config.finetune)
        throw InputError("train_multiobjective: config carries a finetune section");
    return run_training(config, train_data, validation_data, test_data);
}

RunRecord train_finetune(const TrainConfig& config, const data::Dataset& train_data,
                         const data::Dataset& validation_data, const data::Dataset& test_data) {
    if (!config.finetune) throw InputError("train_finetune: config.finetune missing");
    return run_training(config, train_data, validation_data, test_data);
}

SuiteResult run_suite(std::span<const TrainConfig> configs, const data::Dataset& full,
                      const data::SplitPlan& plan, int n_seeds, int threads) {
    if (n_seeds < 1) throw InputError("run_suite: n_seeds must be >= 1");
    if (threads < 1) threads = 1;

    struct Job {
        std::size_t config_index;
        int fold;
        int seed_index;
    };
    std::vector<Job> jobs;
    for (std::size_t c = 0; c < configs.size(); ++c)
        for (int f = 0; f < plan.k; ++f)
            for (int s = 0; s < n_seeds; ++s) jobs.push_back({c, f, s});

    const data::Dataset train_data = data::take(full, plan.train);
    std::vector<data::Dataset> val_sets, test_sets;
    for (const auto& fold : plan.folds) {
        val_sets.push_back(data::take(full, fold.validation));
        test_sets.push_back(data::take(full, fold.test));
    }

    std::vector<std::optional<RunRecord>> slots(jobs.size());
    std::vector<std::optional<RunFailure>> fails(jobs.size());

    auto run_job = [&](std::size_t j) {
        const Job& job = jobs[j];
        TrainConfig cfg = configs[job.config_index];
        // per-run seed depends only on (config seed, fold, seed index)
        cfg.seed = mix_seed(cfg.seed, (static_cast<std::uint64_t>(job.fold) << 32) |
                                          static_cast<std::uint64_t>(job.seed_index));
        try {
            RunRecord rec = cfg.finetune
                                ? train_finetune(cfg, train_data, val_sets[job.fold],
                                                 test_sets[job.fold])
                                : train_multiobjective(cfg, train_data, val_sets[job.fold],
                                                       test_sets[job.fold]);
            rec.fold = job.fold;
            slots[j] = std::move(rec);
        } catch (const std::exception& e) {
            fails[j] = RunFailure{job.config_index, job.fold, cfg.seed, e.what()};
        }
    };

    if (threads == 1 || jobs.size() <= 1) {
        for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
    } else {
        std::vector<std::thread> pool;
        std::size_t stride = static_cast<std::size_t>(threads);
        for (std::size_t t = 0; t < stride; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t j = t; j < jobs.size(); j += stride) run_job(j);
            });
        for (auto& th : pool) th.join();
    }

    SuiteResult out;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (slots[j]) out.records.push_back(std::move(*slots[j]));
        if (fails[j]) out.failures.push_back(std::move(*fails[j]));
    }
    return out;
}

}  // namespace fairgap::train
