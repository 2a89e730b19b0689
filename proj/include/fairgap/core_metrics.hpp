#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

namespace fairgap {

// Probability mass on the 8 cells (yhat, y, a) of three binary variables:
// prediction, ground truth, sensitive group. All group-conditional rates and
// gap measures are functions of this object.
struct JointDistribution {
    // cell(yhat, y, a); entries nonnegative, sum to 1 within 1e-12
    double p[2][2][2];

    static JointDistribution from_cells(std::span<const double, 8> cells);
    static JointDistribution from_cells(const std::array<double, 8>& cells);

    double cell(int yhat, int y, int a) const { return p[yhat][y][a]; }
    std::array<double, 8> cells() const;

    double pr_a(int a) const;             // Pr[A=a]
    double pr_y(int y) const;             // Pr[Y=y]
    double pr_yhat(int yhat) const;       // Pr[Yhat=yhat]
    double pr_y_a(int y, int a) const;    // Pr[Y=y, A=a]
    double pr_yhat_a(int yhat, int a) const;
    double pr_yhat_y(int yhat, int y) const;
};

// Per-group confusion counts from hard predictions. Marginals are the sums.
struct ConfusionCounts {
    std::uint64_t tp[2] = {0, 0};
    std::uint64_t tn[2] = {0, 0};
    std::uint64_t fp[2] = {0, 0};
    std::uint64_t fn[2] = {0, 0};

    std::uint64_t total() const;
    std::uint64_t group_total(int a) const { return tp[a] + tn[a] + fp[a] + fn[a]; }
};

// The eight confusion-matrix rates. A rate whose conditioning event has zero
// probability is left unset rather than coerced to a number.
struct RateSet {
    std::optional<double> tpr;   // Pr[Yhat=1 | Y=1]
    std::optional<double> tnr;   // Pr[Yhat=0 | Y=0]
    std::optional<double> fnr;   // Pr[Yhat=0 | Y=1]
    std::optional<double> fpr;   // Pr[Yhat=1 | Y=0]
    std::optional<double> ppv;   // Pr[Y=1 | Yhat=1]
    std::optional<double> npv;   // Pr[Y=0 | Yhat=0]
    std::optional<double> fdr;   // Pr[Y=0 | Yhat=1]
    std::optional<double> for_;  // Pr[Y=1 | Yhat=0]
};

struct GroupMetrics {
    RateSet group[2];   // rates conditioned on A=a
    RateSet marginal;   // pooled rates
    std::optional<double> rho[2];  // base odds Pr[Y=1|A=a] / Pr[Y=0|A=a]
    std::optional<double> rho_marginal;
    double acc = 0.0;   // Pr[Yhat = Y]
};

// Gap measures. sep[yhat][y][a] = |Pr[Yhat=yhat|Y=y,A=a] - Pr[Yhat=yhat|Y=y]|,
// suff[y][yhat][a] = |Pr[Y=y|Yhat=yhat,A=a] - Pr[Y=y|Yhat=yhat]|. Undefined
// entries (zero-probability conditioning) are unset and excluded from maxima.
struct FairnessGaps {
    std::optional<double> sep[2][2][2];
    std::optional<double> suff[2][2][2];
    std::optional<double> sep_max;
    std::optional<double> suff_max;
    std::optional<double> sep_binary;    // max(|TPR_0-TPR_1|, |FPR_0-FPR_1|)
    std::optional<double> suff_binary;   // max(|PPV_0-PPV_1|, |NPV_0-NPV_1|)
    std::optional<double> deo;           // |TPR_0 - TPR_1|
};

ConfusionCounts counts_from_predictions(std::span<const int> preds,
                                        std::span<const int> truths,
                                        std::span<const int> groups);

JointDistribution distribution_from_counts(const ConfusionCounts& c);

GroupMetrics group_metrics(const JointDistribution& d);

FairnessGaps fairness_gaps(const GroupMetrics& m);

// Between-group absolute differences of the four radar rates, when defined.
struct BinaryDeltas {
    std::optional<double> dtpr, dfpr, dppv, dnpv;
};
BinaryDeltas binary_deltas(const GroupMetrics& m);

}  // namespace fairgap
