#include "fairgap/core_metrics.hpp"

#include <cmath>
#include <cstdlib>

#include "fairgap/errors.hpp"

namespace fairgap {

namespace {

constexpr double kSumTolerance = 1e-12;

std::optional<double> ratio(double num, double den) {
    if (den <= 0.0) return std::nullopt;
    return num / den;
}

std::optional<double> abs_diff(const std::optional<double>& x,
                               const std::optional<double>& y) {
    if (!x || !y) return std::nullopt;
    return std::abs(*x - *y);
}

void fold_max(std::optional<double>& acc, const std::optional<double>& v) {
    if (!v) return;
    if (!acc || *v > *acc) acc = *v;
}

}  // namespace

JointDistribution JointDistribution::from_cells(std::span<const double, 8> cells) {
    double sum = 0.0;
    for (double v : cells) {
        if (!(v >= 0.0)) throw InputError("joint distribution entries must be >= 0 and finite");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
        throw InputError("joint distribution entries must sum to 1 within 1e-12");
    JointDistribution d{};
    std::size_t i = 0;
    for (int yhat = 0; yhat < 2; ++yhat)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a) d.p[yhat][y][a] = cells[i++];
    return d;
}

JointDistribution JointDistribution::from_cells(const std::array<double, 8>& cells) {
    return from_cells(std::span<const double, 8>(cells));
}

std::array<double, 8> JointDistribution::cells() const {
    std::array<double, 8> out{};
    std::size_t i = 0;
    for (int yhat = 0; yhat < 2; ++yhat)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a) out[i++] = p[yhat][y][a];
    return out;
}

double JointDistribution::pr_a(int a) const {
    return p[0][0][a] + p[0][1][a] + p[1][0][a] + p[1][1][a];
}

double JointDistribution::pr_y(int y) const {
    return p[0][y][0] + p[0][y][1] + p[1][y][0] + p[1][y][1];
}

double JointDistribution::pr_yhat(int yhat) const {
    return p[yhat][0][0] + p[yhat][0][1] + p[yhat][1][0] + p[yhat][1][1];
}

double JointDistribution::pr_y_a(int y, int a) const { return p[0][y][a] + p[1][y][a]; }

double JointDistribution::pr_yhat_a(int yhat, int a) const {
    return p[yhat][0][a] + p[yhat][1][a];
}

double JointDistribution::pr_yhat_y(int yhat, int y) const {
    return p[yhat][y][0] + p[yhat][y][1];
}

std::uint64_t ConfusionCounts::total() const { return group_total(0) + group_total(1); }

ConfusionCounts counts_from_predictions(std::span<const int> preds,
                                        std::span<const int> truths,
                                        std::span<const int> groups) {
    if (preds.empty()) throw InputError("counts_from_predictions: empty input");
    if (preds.size() != truths.size() || preds.size() != groups.size())
        throw InputError("counts_from_predictions: length mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const int yhat = preds[i], y = truths[i], a = groups[i];
        if ((yhat | y | a) & ~1)
            throw InputError("counts_from_predictions: entries must be 0 or 1");
        if (yhat == 1 && y == 1)
            ++c.tp[a];
        else if (yhat == 0 && y == 0)
            ++c.tn[a];
        else if (yhat == 1 && y == 0)
            ++c.fp[a];
        else
            ++c.fn[a];
    }
    return c;
}

JointDistribution distribution_from_counts(const ConfusionCounts& c) {
    const std::uint64_t total = c.total();
    if (total == 0) throw InputError("distribution_from_counts: zero total count");
    const double n = static_cast<double>(total);
    JointDistribution d{};
    for (int a = 0; a < 2; ++a) {
        d.p[1][1][a] = static_cast<double>(c.tp[a]) / n;
        d.p[0][0][a] = static_cast<double>(c.tn[a]) / n;
        d.p[1][0][a] = static_cast<double>(c.fp[a]) / n;
        d.p[0][1][a] = static_cast<double>(c.fn[a]) / n;
    }
    return d;
}

namespace {

// Rates of a single (sub)population given its four cell masses.
RateSet rates_from_cells(double tp, double tn, double fp, double fn) {
    RateSet r;
    r.tpr = ratio(tp, tp + fn);
    r.fnr = ratio(fn, tp + fn);
    r.tnr = ratio(tn, tn + fp);
    r.fpr = ratio(fp, tn + fp);
    r.ppv = ratio(tp, tp + fp);
    r.fdr = ratio(fp, tp + fp);
    r.npv = ratio(tn, tn + fn);
    r.for_ = ratio(fn, tn + fn);
    return r;
}

}  // namespace

GroupMetrics group_metrics(const JointDistribution& d) {
    GroupMetrics m;
    for (int a = 0; a < 2; ++a) {
        m.group[a] = rates_from_cells(d.p[1][1][a], d.p[0][0][a], d.p[1][0][a], d.p[0][1][a]);
        // base odds; undefined when Pr[Y=0|A=a] = 0 (or the group is empty)
        m.rho[a] = ratio(d.pr_y_a(1, a), d.pr_y_a(0, a));
    }
    m.marginal = rates_from_cells(d.pr_yhat_y(1, 1), d.pr_yhat_y(0, 0),
                                  d.pr_yhat_y(1, 0), d.pr_yhat_y(0, 1));
    m.rho_marginal = ratio(d.pr_y(1), d.pr_y(0));
    m.acc = d.p[1][1][0] + d.p[1][1][1] + d.p[0][0][0] + d.p[0][0][1];
    return m;
}

namespace {

// Pick the rate matching Pr[Yhat=yhat | Y=y] from a RateSet.
std::optional<double> sep_rate(const RateSet& r, int yhat, int y) {
    if (y == 1) return yhat == 1 ? r.tpr : r.fnr;
    return yhat == 1 ? r.fpr : r.tnr;
}

// Pick the rate matching Pr[Y=y | Yhat=yhat].
std::optional<double> suff_rate(const RateSet& r, int y, int yhat) {
    if (yhat == 1) return y == 1 ? r.ppv : r.fdr;
    return y == 1 ? r.for_ : r.npv;
}

}  // namespace

BinaryDeltas binary_deltas(const GroupMetrics& m) {
    BinaryDeltas b;
    b.dtpr = abs_diff(m.group[0].tpr, m.group[1].tpr);
    b.dfpr = abs_diff(m.group[0].fpr, m.group[1].fpr);
    b.dppv = abs_diff(m.group[0].ppv, m.group[1].ppv);
    b.dnpv = abs_diff(m.group[0].npv, m.group[1].npv);
    return b;
}

FairnessGaps fairness_gaps(const GroupMetrics& m) {
    FairnessGaps g;
    for (int a = 0; a < 2; ++a) {
        for (int y = 0; y < 2; ++y)
            for (int yhat = 0; yhat < 2; ++yhat) {
                g.sep[yhat][y][a] =
                    abs_diff(sep_rate(m.group[a], yhat, y), sep_rate(m.marginal, yhat, y));
                g.suff[y][yhat][a] =
                    abs_diff(suff_rate(m.group[a], y, yhat), suff_rate(m.marginal, y, yhat));
                fold_max(g.sep_max, g.sep[yhat][y][a]);
                fold_max(g.suff_max, g.suff[y][yhat][a]);
            }
    }
    const BinaryDeltas b = binary_deltas(m);
    fold_max(g.sep_binary, b.dtpr);
    fold_max(g.sep_binary, b.dfpr);
    fold_max(g.suff_binary, b.dppv);
    fold_max(g.suff_binary, b.dnpv);
    g.deo = b.dtpr;
    return g;
}

}  // namespace fairgap
