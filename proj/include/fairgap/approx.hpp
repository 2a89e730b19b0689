#pragma once

#include <optional>
#include <span>

#include "fairgap/core_metrics.hpp"

namespace fairgap::approx {

// Parameters of the (epsilon, delta) relaxation. The trichotomy verifier
// requires epsilon < c; c is the non-degeneracy margin on the marginals.
struct ApproxParams {
    double epsilon = 0.0;
    double delta = 0.0;
    double c = 0.1;

    void validate() const;  // throws InputError
};

// True iff for every ordered pair (v_i, v_j): v_i <= v_j * e^eps + delta.
bool approx_equal(std::span<const double> values, double eps, double delta);

// Predicate outcome; all_defined=false is the reason code when a required
// group-conditional rate did not exist.
struct PredicateResult {
    bool satisfied = false;
    bool all_defined = false;
};

// (eps, delta)-separation: for each (yhat, y) the two group-conditional values
// Pr[Yhat=yhat | Y=y, A=a] are approximately equal.
PredicateResult satisfies_eps_delta_separation(const GroupMetrics& m, double eps, double delta);

// (eps, delta)-sufficiency: mirror over Pr[Y=y | Yhat=yhat, A=a].
PredicateResult satisfies_eps_delta_sufficiency(const GroupMetrics& m, double eps, double delta);

// Ratio bound for approximately equal values bounded below by c*eps:
// e^{-(eps + delta/(c eps))} <= v1/v2 <= e^{eps + delta/(c eps)}.
// Preconditions (approx equality, min >= c*eps, eps > 0) are enforced.
bool claim1_ratio_bound(double v1, double v2, double eps, double delta, double c);

enum class TriCase : int {
    near_perfect = 1,   // all of PPV, NPV, TPR, TNR >= 1 - K(eps + delta/eps)
    near_flipped = 2,   // all of them <= K(eps + delta/eps)
    equal_base_odds = 3 // {rho_0, rho_1} are (K(eps + delta/eps), 0)-approx equal
};

struct TrichotomyVerdict {
    bool premises_hold = false;
    // violation minus allowed bound; a case holds when its margin <= slack
    double case1_margin = 0.0;
    double case2_margin = 0.0;
    double case3_margin = 0.0;
    std::optional<TriCase> satisfied_case;
    // smallest K that would make each case hold (infinity when impossible);
    // meaningful only when eps > 0
    double needed_k = 0.0;
};

// Absolute slack applied to case margins so that exact-mode (eps = delta = 0)
// verdicts are immune to last-ulp rounding of the conditional probabilities.
inline constexpr double kCaseMarginSlack = 1e-12;

// Checks the premises (marginal non-degeneracy plus both (eps,delta) criteria)
// and which of the three conclusion cases holds at multiplier K. Cases are
// tried in order 1, 2, 3. eps = 0 requires delta = 0 (bound taken as 0).
TrichotomyVerdict verify_trichotomy(const JointDistribution& d, const ApproxParams& params,
                                    double k_multiplier);

// Accuracy implication: if TPR_a >= 1-eps and TNR_a >= 1-eps for all a then
// acc >= 1-eps; if TPR_a <= eps and TNR_a <= eps for all a then acc <= eps.
// Returns whether the applicable implication holds (true when neither premise
// applies or a needed rate is undefined).
bool check_observation2(const GroupMetrics& m, double eps);

}  // namespace fairgap::approx
