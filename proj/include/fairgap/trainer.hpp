#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairgap/core_metrics.hpp"
#include "fairgap/dataset.hpp"
#include "fairgap/soft_objectives.hpp"

namespace fairgap::train {

// Second phase of the finetuning regime: at switch_epoch the objective
// becomes the configured fairness loss alone, with its own learning rate and
// decay factor (the scheduler step size is shared with phase one).
struct FinetuneConfig {
    int switch_epoch = 0;
    double finetune_lr = 1e-3;
    double finetune_gamma = 0.5;
    soft::ObjectiveKind finetune_objective = soft::ObjectiveKind::max_suff_sep_binary;
};

struct TrainConfig {
    nn::ModelSpec model;
    soft::ObjectiveSpec objective;
    int epochs = 100;
    int batch_size = 0;  // 0 = full batch; minibatches are stratified over (y, a)
    double learning_rate = 1e-2;
    double scheduler_gamma = 1.0;  // lr(e) = lr0 * gamma^floor(e / step)
    int scheduler_step = 100;
    double weight_decay = 0.0;  // added to the gradient as 2 * wd * theta
    std::optional<FinetuneConfig> finetune;
    std::uint64_t seed = 0;

    void validate() const;
    // the published hyperparameter search ranges; preset configs must satisfy them
    bool within_grid_bounds() const;
    std::uint64_t hash() const;
};

struct EpochStats {
    double loss = 0.0;
    double accuracy = 0.0;
    double max_gap = 0.0;  // hard max(suff_binary, sep_binary) on the train set
    double lr = 0.0;
};

struct EvalSummary {
    double accuracy = 0.0;
    double error = 1.0;
    std::optional<double> dtpr, dfpr, dppv, dnpv;
    GroupMetrics metrics;
    FairnessGaps gaps;
};

struct RunRecord {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    int fold = -1;
    std::string objective_label;  // None / DEO / Ours / SepMax / MaxSuffSep
    std::optional<int> switch_epoch;
    std::vector<EpochStats> epochs;
    EvalSummary validation;
    EvalSummary test;  // computed once, after training completes
};

// Hard-prediction evaluation of a parameter vector on a dataset.
EvalSummary evaluate(const nn::ModelSpec& spec, const nn::ParameterVector& params,
                     const data::Dataset& d);

std::string objective_label(const TrainConfig& config);

// Single-phase training: minibatch SGD on BCE + lambda * fairness term with
// step-decay scheduling. Deterministic in (config, data, seed).
RunRecord train_multiobjective(const TrainConfig& config, const data::Dataset& train_data,
                               const data::Dataset& validation_data,
                               const data::Dataset& test_data);

// Two-phase training: BCE until switch_epoch, then the fairness term alone.
RunRecord train_finetune(const TrainConfig& config, const data::Dataset& train_data,
                         const data::Dataset& validation_data, const data::Dataset& test_data);

struct RunFailure {
    std::size_t config_index = 0;
    int fold = -1;
    std::uint64_t seed = 0;
    std::string message;
};

struct SuiteResult {
    std::vector<RunRecord> records;
    std::vector<RunFailure> failures;
};

// Executes every config over folds x seeds. Results are keyed by
// (config hash, fold, seed) and identical regardless of thread count.
SuiteResult run_suite(std::span<const TrainConfig> configs, const data::Dataset& full,
                      const data::SplitPlan& plan, int n_seeds, int threads = 1);

}  // namespace fairgap::train
