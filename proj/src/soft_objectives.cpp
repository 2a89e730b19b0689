#include "fairgap/soft_objectives.hpp"

#include <algorithm>
#include <cmath>

#include "fairgap/errors.hpp"

namespace fairgap::soft {

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Batch-level sums from which every soft rate is assembled.
struct GroupSums {
    std::size_t n1[2] = {0, 0}, n0[2] = {0, 0};
    double sp1[2] = {0, 0}, sp0[2] = {0, 0};  // sum of p over (y=1,a) / (y=0,a)
    double sq1[2] = {0, 0}, sq0[2] = {0, 0};  // sum of 1-p

    std::size_t n1_all() const { return n1[0] + n1[1]; }
    std::size_t n0_all() const { return n0[0] + n0[1]; }
    double sp1_all() const { return sp1[0] + sp1[1]; }
    double sp0_all() const { return sp0[0] + sp0[1]; }
    double sq1_all() const { return sq1[0] + sq1[1]; }
    double sq0_all() const { return sq0[0] + sq0[1]; }
};

GroupSums collect(const SoftBatch& b) {
    GroupSums s;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const int a = b.groups[i];
        const double p = b.probs[i];
        if (b.truths[i] == 1) {
            ++s.n1[a];
            s.sp1[a] += p;
            s.sq1[a] += 1.0 - p;
        } else {
            ++s.n0[a];
            s.sp0[a] += p;
            s.sq0[a] += 1.0 - p;
        }
    }
    return s;
}

double floored(double v) { return std::max(v, kDenominatorFloor); }

// Rate accessors over the sums; -2 denotes the pooled batch.
bool group_empty(const GroupSums& s, int a) { return s.n1[a] + s.n0[a] == 0; }

// Gradient accumulation: adds coef * d(rate)/dp_i into grad.
class RateGrads {
public:
    RateGrads(const SoftBatch& b, const GroupSums& s, std::vector<double>* grad)
        : b_(b), s_(s), grad_(grad) {}

    void tpr(int a, double coef) {
        if (!grad_) return;
        const double inv = coef / static_cast<double>(a < 0 ? s_.n1_all() : s_.n1[a]);
        for_each([&](std::size_t i) {
            if (b_.truths[i] == 1 && (a < 0 || b_.groups[i] == a)) (*grad_)[i] += inv;
        });
    }

    void fpr(int a, double coef) {
        if (!grad_) return;
        const double inv = coef / static_cast<double>(a < 0 ? s_.n0_all() : s_.n0[a]);
        for_each([&](std::size_t i) {
            if (b_.truths[i] == 0 && (a < 0 || b_.groups[i] == a)) (*grad_)[i] += inv;
        });
    }

    void ppv(int a, double coef) {
        if (!grad_) return;
        const double s1 = a < 0 ? s_.sp1_all() : s_.sp1[a];
        const double s0 = a < 0 ? s_.sp0_all() : s_.sp0[a];
        const double den = floored(s1 + s0);
        const bool at_floor = s1 + s0 < kDenominatorFloor;
        for_each([&](std::size_t i) {
            if (a >= 0 && b_.groups[i] != a) return;
            if (at_floor) {
                if (b_.truths[i] == 1) (*grad_)[i] += coef / den;
            } else if (b_.truths[i] == 1) {
                (*grad_)[i] += coef * s0 / (den * den);
            } else {
                (*grad_)[i] -= coef * s1 / (den * den);
            }
        });
    }

    void npv(int a, double coef) {
        if (!grad_) return;
        const double q0 = a < 0 ? s_.sq0_all() : s_.sq0[a];
        const double q1 = a < 0 ? s_.sq1_all() : s_.sq1[a];
        const double den = floored(q0 + q1);
        const bool at_floor = q0 + q1 < kDenominatorFloor;
        for_each([&](std::size_t i) {
            if (a >= 0 && b_.groups[i] != a) return;
            if (at_floor) {
                if (b_.truths[i] == 0) (*grad_)[i] -= coef / den;
            } else if (b_.truths[i] == 0) {
                (*grad_)[i] -= coef * q1 / (den * den);
            } else {
                (*grad_)[i] += coef * q0 / (den * den);
            }
        });
    }

private:
    template <class F>
    void for_each(F&& f) {
        for (std::size_t i = 0; i < b_.size(); ++i) f(i);
    }

    const SoftBatch& b_;
    const GroupSums& s_;
    std::vector<double>* grad_;
};

struct RateValues {
    SoftGroupRates r;
    GroupSums sums;
};

RateValues rates_and_sums(const SoftBatch& batch) {
    batch.validate();
    RateValues out;
    out.sums = collect(batch);
    const GroupSums& s = out.sums;
    for (int a = 0; a < 2; ++a) {
        if (s.n1[a] > 0) out.r.tpr[a] = s.sp1[a] / static_cast<double>(s.n1[a]);
        if (s.n0[a] > 0) out.r.fpr[a] = s.sp0[a] / static_cast<double>(s.n0[a]);
        if (!group_empty(s, a)) {
            out.r.ppv[a] = s.sp1[a] / floored(s.sp1[a] + s.sp0[a]);
            out.r.npv[a] = s.sq0[a] / floored(s.sq0[a] + s.sq1[a]);
        }
    }
    if (s.n1_all() > 0) out.r.tpr_m = s.sp1_all() / static_cast<double>(s.n1_all());
    if (s.n0_all() > 0) out.r.fpr_m = s.sp0_all() / static_cast<double>(s.n0_all());
    out.r.ppv_m = s.sp1_all() / floored(s.sp1_all() + s.sp0_all());
    out.r.npv_m = s.sq0_all() / floored(s.sq0_all() + s.sq1_all());
    return out;
}

double require(const std::optional<double>& v, const char* what) {
    if (!v) throw ObjectiveError(std::string("undefined soft rate: ") + what);
    return *v;
}

// --- individual terms (value + optional gradient) ---

double eval_deo(const RateValues& rv, RateGrads* g) {
    const double d = require(rv.r.tpr[0], "TPR_0") - require(rv.r.tpr[1], "TPR_1");
    if (g) {
        const double s = sign_of(d);
        g->tpr(0, s);
        g->tpr(1, -s);
    }
    return std::abs(d);
}

double eval_binary(const RateValues& rv, RateGrads* g) {
    const double dppv = require(rv.r.ppv[0], "PPV_0") - require(rv.r.ppv[1], "PPV_1");
    const double dnpv = require(rv.r.npv[0], "NPV_0") - require(rv.r.npv[1], "NPV_1");
    const double dtpr = require(rv.r.tpr[0], "TPR_0") - require(rv.r.tpr[1], "TPR_1");
    const double dfpr = require(rv.r.fpr[0], "FPR_0") - require(rv.r.fpr[1], "FPR_1");
    const double suff = std::max(std::abs(dppv), std::abs(dnpv));
    const double sep = std::max(std::abs(dtpr), std::abs(dfpr));
    const double value = std::max(suff, sep);
    if (g) {
        // ties: sufficiency before separation; within each, the first maximand
        if (suff >= sep) {
            if (std::abs(dppv) >= std::abs(dnpv)) {
                const double s = sign_of(dppv);
                g->ppv(0, s);
                g->ppv(1, -s);
            } else {
                const double s = sign_of(dnpv);
                g->npv(0, s);
                g->npv(1, -s);
            }
        } else {
            if (std::abs(dtpr) >= std::abs(dfpr)) {
                const double s = sign_of(dtpr);
                g->tpr(0, s);
                g->tpr(1, -s);
            } else {
                const double s = sign_of(dfpr);
                g->fpr(0, s);
                g->fpr(1, -s);
            }
        }
    }
    return value;
}

enum class RateId { tpr, fpr, ppv, npv };

struct MaxEntry {
    RateId id;
    int group;
    double diff;  // group rate minus marginal rate
};

double eval_group_vs_marginal_max(const RateValues& rv, RateGrads* g, bool sufficiency) {
    // Enumeration fixes tie priority: group 0 before group 1, first rate id
    // first. The complement rows (FNR/TNR, FDR/FOR) carry identical absolute
    // gaps and subgradients, so the four entries per group cover all eight.
    MaxEntry entries[4];
    int count = 0;
    for (int a = 0; a < 2; ++a) {
        if (sufficiency) {
            entries[count++] = {RateId::ppv, a,
                                require(rv.r.ppv[a], "PPV_a") - require(rv.r.ppv_m, "PPV")};
            entries[count++] = {RateId::npv, a,
                                require(rv.r.npv[a], "NPV_a") - require(rv.r.npv_m, "NPV")};
        } else {
            entries[count++] = {RateId::tpr, a,
                                require(rv.r.tpr[a], "TPR_a") - require(rv.r.tpr_m, "TPR")};
            entries[count++] = {RateId::fpr, a,
                                require(rv.r.fpr[a], "FPR_a") - require(rv.r.fpr_m, "FPR")};
        }
    }
    int best = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(entries[i].diff) > std::abs(entries[best].diff)) best = i;
    const MaxEntry& e = entries[best];
    if (g) {
        const double s = sign_of(e.diff);
        switch (e.id) {
            case RateId::tpr: g->tpr(e.group, s); g->tpr(-1, -s); break;
            case RateId::fpr: g->fpr(e.group, s); g->fpr(-1, -s); break;
            case RateId::ppv: g->ppv(e.group, s); g->ppv(-1, -s); break;
            case RateId::npv: g->npv(e.group, s); g->npv(-1, -s); break;
        }
    }
    return std::abs(e.diff);
}

double eval_fairness_term(ObjectiveKind kind, const RateValues& rv, RateGrads* g) {
    switch (kind) {
        case ObjectiveKind::deo:
            return eval_deo(rv, g);
        case ObjectiveKind::max_suff_sep_binary:
            return eval_binary(rv, g);
        case ObjectiveKind::sep_max:
            return eval_group_vs_marginal_max(rv, g, /*sufficiency=*/false);
        case ObjectiveKind::max_suff_sep: {
            // evaluate both sides first; gradient flows through the winner,
            // sufficiency on ties
            const double suff = eval_group_vs_marginal_max(rv, nullptr, true);
            const double sep = eval_group_vs_marginal_max(rv, nullptr, false);
            if (g) eval_group_vs_marginal_max(rv, g, suff >= sep);
            return std::max(suff, sep);
        }
        case ObjectiveKind::bce:
            throw InputError("bce has no fairness term");
    }
    throw InputError("unknown objective kind");
}

double eval_bce(const SoftBatch& b, std::optional<double> pos_weight,
                std::vector<double>* grad) {
    const double w = pos_weight.value_or(1.0);
    const double inv_n = 1.0 / static_cast<double>(b.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double p = b.probs[i];
        if (b.truths[i] == 1) {
            loss -= w * std::log(p);
            if (grad) (*grad)[i] += inv_n * (-w / p);
        } else {
            loss -= std::log(1.0 - p);
            if (grad) (*grad)[i] += inv_n / (1.0 - p);
        }
    }
    return loss * inv_n;
}

}  // namespace

void SoftBatch::validate() const {
    if (probs.empty()) throw InputError("SoftBatch: empty batch");
    if (probs.size() != truths.size() || probs.size() != groups.size())
        throw InputError("SoftBatch: length mismatch");
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] > 0.0 && probs[i] < 1.0))
            throw InputError("SoftBatch: probabilities must lie strictly in (0,1)");
        if ((truths[i] | groups[i]) & ~1)
            throw InputError("SoftBatch: truths and groups must be 0 or 1");
    }
}

void ObjectiveSpec::validate() const {
    if (!(lambda >= 0.0)) throw InputError("ObjectiveSpec: lambda must be nonnegative");
    if (class_imbalance_weight && !(*class_imbalance_weight > 0.0))
        throw InputError("ObjectiveSpec: class imbalance weight must be positive");
    if (!include_bce && kind == ObjectiveKind::bce)
        throw InputError("ObjectiveSpec: nothing to optimize (bce excluded from bce objective)");
}

ObjectiveKind objective_kind_from_string(const std::string& s) {
    if (s == "bce" || s == "none") return ObjectiveKind::bce;
    if (s == "deo") return ObjectiveKind::deo;
    if (s == "max_suff_sep_binary") return ObjectiveKind::max_suff_sep_binary;
    if (s == "sep_max") return ObjectiveKind::sep_max;
    if (s == "max_suff_sep") return ObjectiveKind::max_suff_sep;
    throw InputError("unknown objective kind: " + s);
}

std::string to_string(ObjectiveKind k) {
    switch (k) {
        case ObjectiveKind::bce: return "bce";
        case ObjectiveKind::deo: return "deo";
        case ObjectiveKind::max_suff_sep_binary: return "max_suff_sep_binary";
        case ObjectiveKind::sep_max: return "sep_max";
        case ObjectiveKind::max_suff_sep: return "max_suff_sep";
    }
    return "?";
}

SoftGroupRates soft_rates(const SoftBatch& batch) { return rates_and_sums(batch).r; }

double loss_deo(const SoftBatch& batch) {
    return eval_deo(rates_and_sums(batch), nullptr);
}

double loss_max_suff_sep_binary(const SoftBatch& batch) {
    return eval_binary(rates_and_sums(batch), nullptr);
}

double loss_sep_max(const SoftBatch& batch) {
    return eval_group_vs_marginal_max(rates_and_sums(batch), nullptr, false);
}

double loss_suff_max(const SoftBatch& batch) {
    return eval_group_vs_marginal_max(rates_and_sums(batch), nullptr, true);
}

double loss_max_suff_sep(const SoftBatch& batch) {
    const RateValues rv = rates_and_sums(batch);
    return std::max(eval_group_vs_marginal_max(rv, nullptr, true),
                    eval_group_vs_marginal_max(rv, nullptr, false));
}

double loss_bce(const SoftBatch& batch, std::optional<double> pos_weight) {
    batch.validate();
    return eval_bce(batch, pos_weight, nullptr);
}

double composite_loss(const ObjectiveSpec& spec, const SoftBatch& batch) {
    spec.validate();
    batch.validate();
    if (spec.kind == ObjectiveKind::bce) return eval_bce(batch, spec.class_imbalance_weight, nullptr);
    const RateValues rv = rates_and_sums(batch);
    const double term = eval_fairness_term(spec.kind, rv, nullptr);
    if (!spec.include_bce) return term;
    return eval_bce(batch, spec.class_imbalance_weight, nullptr) + spec.lambda * term;
}

LossEval composite_loss_grad(const ObjectiveSpec& spec, const SoftBatch& batch) {
    spec.validate();
    batch.validate();
    LossEval out;
    out.dprobs.assign(batch.size(), 0.0);
    if (spec.kind == ObjectiveKind::bce) {
        out.value = eval_bce(batch, spec.class_imbalance_weight, &out.dprobs);
        return out;
    }
    const RateValues rv = rates_and_sums(batch);
    const double scale = spec.include_bce ? spec.lambda : 1.0;
    std::vector<double> term_grad(batch.size(), 0.0);
    RateGrads g(batch, rv.sums, &term_grad);
    const double term = eval_fairness_term(spec.kind, rv, &g);
    out.value = scale * term;
    for (std::size_t i = 0; i < batch.size(); ++i) out.dprobs[i] = scale * term_grad[i];
    if (spec.include_bce) {
        out.value += eval_bce(batch, spec.class_imbalance_weight, &out.dprobs);
    }
    return out;
}

SubgradientRule subgradient_rule(ObjectiveKind kind) {
    SubgradientRule r;
    r.abs_zero_subgradient = 0.0;
    switch (kind) {
        case ObjectiveKind::bce:
            r.uses_max = false;
            r.tie_branch = "";
            break;
        case ObjectiveKind::deo:
            r.uses_max = false;  // abs only
            r.tie_branch = "";
            break;
        case ObjectiveKind::max_suff_sep_binary:
        case ObjectiveKind::max_suff_sep:
            r.uses_max = true;
            r.tie_branch = "sufficiency";
            break;
        case ObjectiveKind::sep_max:
            r.uses_max = true;
            r.tie_branch = "first entry in (group, rate) enumeration order";
            break;
    }
    return r;
}

double objective_value(const nn::ModelSpec& spec, const nn::ParameterVector& params,
                       const Batch& batch, const ObjectiveSpec& objective) {
    SoftBatch sb{nn::forward(spec, params, batch.features), batch.truths, batch.groups};
    return composite_loss(objective, sb);
}

nn::ParameterVector gradient(const nn::ModelSpec& spec, const nn::ParameterVector& params,
                             const Batch& batch, const ObjectiveSpec& objective) {
    SoftBatch sb{nn::forward(spec, params, batch.features), batch.truths, batch.groups};
    const LossEval eval = composite_loss_grad(objective, sb);
    return nn::backward_from_prob_grad(spec, params, batch.features, eval.dprobs);
}

}  // namespace fairgap::soft
