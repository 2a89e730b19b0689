#include "fairgap/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairgap/errors.hpp"

namespace fairgap::approx {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void ApproxParams::validate() const {
    if (!(epsilon >= 0.0) || !(delta >= 0.0))
        throw InputError("ApproxParams: epsilon and delta must be nonnegative");
    if (!(c > 0.0 && c < 0.5)) throw InputError("ApproxParams: c must lie in (0, 0.5)");
    if (epsilon >= c) throw InputError("ApproxParams: epsilon must be smaller than c");
}

bool approx_equal(std::span<const double> values, double eps, double delta) {
    if (values.empty()) throw InputError("approx_equal: empty value set");
    double lo = kInf, hi = -kInf;
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0)
            throw InputError("approx_equal: values must be finite and nonnegative");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    // v_i <= v_j e^eps + delta for all pairs iff it holds for (max, min)
    return hi <= lo * std::exp(eps) + delta;
}

namespace {

PredicateResult pairwise_over_rates(const GroupMetrics& m, double eps, double delta,
                                    bool sufficiency) {
    PredicateResult res;
    res.all_defined = true;
    bool ok = true;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            std::optional<double> v0, v1;
            if (sufficiency) {
                // sets {Pr[Y=y | Yhat=yhat, A=a]}_a indexed by (y, yhat)
                v0 = j == 1 ? (i == 1 ? m.group[0].ppv : m.group[0].fdr)
                            : (i == 1 ? m.group[0].for_ : m.group[0].npv);
                v1 = j == 1 ? (i == 1 ? m.group[1].ppv : m.group[1].fdr)
                            : (i == 1 ? m.group[1].for_ : m.group[1].npv);
            } else {
                // sets {Pr[Yhat=yhat | Y=y, A=a]}_a indexed by (yhat, y)
                v0 = j == 1 ? (i == 1 ? m.group[0].tpr : m.group[0].fpr)
                            : (i == 1 ? m.group[0].fnr : m.group[0].tnr);
                v1 = j == 1 ? (i == 1 ? m.group[1].tpr : m.group[1].fpr)
                            : (i == 1 ? m.group[1].fnr : m.group[1].tnr);
            }
            if (!v0 || !v1) {
                res.all_defined = false;
                ok = false;
                continue;
            }
            const double pair[2] = {*v0, *v1};
            if (!approx_equal(pair, eps, delta)) ok = false;
        }
    res.satisfied = ok && res.all_defined;
    return res;
}

}  // namespace

PredicateResult satisfies_eps_delta_separation(const GroupMetrics& m, double eps, double delta) {
    return pairwise_over_rates(m, eps, delta, /*sufficiency=*/false);
}

PredicateResult satisfies_eps_delta_sufficiency(const GroupMetrics& m, double eps, double delta) {
    return pairwise_over_rates(m, eps, delta, /*sufficiency=*/true);
}

bool claim1_ratio_bound(double v1, double v2, double eps, double delta, double c) {
    if (!(eps > 0.0)) throw InputError("claim1_ratio_bound: eps must be positive");
    if (!(c > 0.0)) throw InputError("claim1_ratio_bound: c must be positive");
    if (!(v1 > 0.0 && v2 > 0.0))
        throw InputError("claim1_ratio_bound: values must be positive");
    const double pair[2] = {v1, v2};
    if (!approx_equal(pair, eps, delta))
        throw InputError("claim1_ratio_bound: values are not (eps,delta)-approximately equal");
    if (std::min(v1, v2) < c * eps)
        throw InputError("claim1_ratio_bound: min{v1,v2} < c*eps");
    const double bound = std::exp(eps + delta / (c * eps));
    const double r = v1 / v2;
    return r <= bound && r >= 1.0 / bound;
}

TrichotomyVerdict verify_trichotomy(const JointDistribution& d, const ApproxParams& params,
                                    double k_multiplier) {
    params.validate();
    if (params.epsilon == 0.0 && params.delta > 0.0)
        throw InputError("verify_trichotomy: delta > 0 requires eps > 0 (delta = o(eps))");
    if (!(k_multiplier >= 0.0)) throw InputError("verify_trichotomy: K must be nonnegative");

    TrichotomyVerdict v;
    const GroupMetrics m = group_metrics(d);

    // Premises: Pr[Y=y|A=a], Pr[Yhat=yhat|A=a] in (c, 1-c) plus both criteria.
    bool nondegenerate = true;
    for (int a = 0; a < 2 && nondegenerate; ++a) {
        const double pa = d.pr_a(a);
        if (pa <= 0.0) {
            nondegenerate = false;
            break;
        }
        for (int v1 = 0; v1 < 2; ++v1) {
            const double py = d.pr_y_a(v1, a) / pa;
            const double pyh = d.pr_yhat_a(v1, a) / pa;
            if (!(py > params.c && py < 1.0 - params.c)) nondegenerate = false;
            if (!(pyh > params.c && pyh < 1.0 - params.c)) nondegenerate = false;
        }
    }
    v.premises_hold = nondegenerate &&
                      satisfies_eps_delta_separation(m, params.epsilon, params.delta).satisfied &&
                      satisfies_eps_delta_sufficiency(m, params.epsilon, params.delta).satisfied;
    if (!v.premises_hold) return v;

    // Under the premises all eight rates and both base odds exist.
    double min_rate = kInf, max_rate = -kInf;
    for (int a = 0; a < 2; ++a) {
        for (double r : {*m.group[a].ppv, *m.group[a].npv, *m.group[a].tpr, *m.group[a].tnr}) {
            min_rate = std::min(min_rate, r);
            max_rate = std::max(max_rate, r);
        }
    }
    const double log_rho_gap = std::abs(std::log(*m.rho[0] / *m.rho[1]));

    const double b = params.epsilon > 0.0
                         ? params.epsilon + params.delta / params.epsilon
                         : 0.0;
    const double bound = k_multiplier * b;
    const double viol1 = 1.0 - min_rate;
    const double viol2 = max_rate;
    const double viol3 = log_rho_gap;
    v.case1_margin = viol1 - bound;
    v.case2_margin = viol2 - bound;
    v.case3_margin = viol3 - bound;
    if (v.case1_margin <= kCaseMarginSlack)
        v.satisfied_case = TriCase::near_perfect;
    else if (v.case2_margin <= kCaseMarginSlack)
        v.satisfied_case = TriCase::near_flipped;
    else if (v.case3_margin <= kCaseMarginSlack)
        v.satisfied_case = TriCase::equal_base_odds;
    v.needed_k = b > 0.0 ? std::min({viol1, viol2, viol3}) / b : 0.0;
    return v;
}

bool check_observation2(const GroupMetrics& m, double eps) {
    bool defined = true;
    for (int a = 0; a < 2; ++a)
        if (!m.group[a].tpr || !m.group[a].tnr) defined = false;
    if (!defined) return true;  // premise cannot apply

    bool all_high = true, all_low = true;
    for (int a = 0; a < 2; ++a) {
        if (!(*m.group[a].tpr >= 1.0 - eps && *m.group[a].tnr >= 1.0 - eps)) all_high = false;
        if (!(*m.group[a].tpr <= eps && *m.group[a].tnr <= eps)) all_low = false;
    }
    // tolerance matches the accuracy-decomposition arithmetic
    constexpr double slack = 1e-12;
    if (all_high) return m.acc >= 1.0 - eps - slack;
    if (all_low) return m.acc <= eps + slack;
    return true;
}

}  // namespace fairgap::approx
