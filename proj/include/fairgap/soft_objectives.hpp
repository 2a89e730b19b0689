#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairgap/model.hpp"

namespace fairgap::soft {

// Predicted probabilities with labels and group indicators; the object all
// differentiable fairness surrogates are computed from.
struct SoftBatch {
    std::vector<double> probs;  // each in (0,1)
    std::vector<int> truths;    // 0/1
    std::vector<int> groups;    // 0/1

    std::size_t size() const { return probs.size(); }
    void validate() const;  // lengths equal and nonempty, domains respected
};

// Soft confusion rates: probability-mass sums in place of hard counts.
//   TPR_a = sum_{y=1,a} p / n_{1,a}      FPR_a = sum_{y=0,a} p / n_{0,a}
//   PPV_a = sum_{y=1,a} p / sum_a p      NPV_a = sum_{y=0,a}(1-p) / sum_a (1-p)
// A rate is unset when its group lacks the required members. PPV/NPV
// denominators are floored at 1e-12.
struct SoftGroupRates {
    std::optional<double> tpr[2], fpr[2], ppv[2], npv[2];
    std::optional<double> tpr_m, fpr_m, ppv_m, npv_m;  // pooled batch
};

inline constexpr double kDenominatorFloor = 1e-12;

SoftGroupRates soft_rates(const SoftBatch& batch);

enum class ObjectiveKind {
    bce,
    deo,                  // |softTPR_0 - softTPR_1|
    max_suff_sep_binary,  // max over the four between-group soft differences
    sep_max,              // max |group - marginal| over separation conditionals
    max_suff_sep,         // max(soft suff_max, soft sep_max)
};

ObjectiveKind objective_kind_from_string(const std::string& s);
std::string to_string(ObjectiveKind k);

struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::bce;
    double lambda = 0.0;
    std::optional<double> class_imbalance_weight;  // BCE positive-class weight
    // when false the fairness term is the whole objective (finetune phase 2)
    bool include_bce = true;

    void validate() const;
};

// Individual losses (throw ObjectiveError when a required rate is undefined).
double loss_deo(const SoftBatch& batch);
double loss_max_suff_sep_binary(const SoftBatch& batch);
double loss_sep_max(const SoftBatch& batch);
double loss_suff_max(const SoftBatch& batch);
double loss_max_suff_sep(const SoftBatch& batch);
double loss_bce(const SoftBatch& batch, std::optional<double> pos_weight = std::nullopt);

// BCE + lambda * fairness term (or the fairness term alone in finetune mode).
double composite_loss(const ObjectiveSpec& spec, const SoftBatch& batch);

struct LossEval {
    double value = 0.0;
    std::vector<double> dprobs;  // dLoss/dp_i
};

// Value and exact subgradient with respect to the probabilities.
LossEval composite_loss_grad(const ObjectiveSpec& spec, const SoftBatch& batch);

// Fixed tie-break choices at the nondifferentiable points.
struct SubgradientRule {
    bool uses_max = false;
    std::string tie_branch;           // branch taken at exact ties in max
    double abs_zero_subgradient = 0;  // d|x|/dx at x = 0
};
SubgradientRule subgradient_rule(ObjectiveKind kind);

// Full-objective helpers over a model: value and parameter gradient.
struct Batch {
    nn::Matrix features;
    std::vector<int> truths;
    std::vector<int> groups;
};

double objective_value(const nn::ModelSpec& spec, const nn::ParameterVector& params,
                       const Batch& batch, const ObjectiveSpec& objective);

nn::ParameterVector gradient(const nn::ModelSpec& spec, const nn::ParameterVector& params,
                             const Batch& batch, const ObjectiveSpec& objective);

}  // namespace fairgap::soft
