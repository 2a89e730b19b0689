#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "fairgap/core_metrics.hpp"
#include "fairgap/errors.hpp"
#include "fairgap/rng.hpp"

using namespace fairgap;

namespace {

// Brute-force oracle: every conditional probability recomputed from raw cell
// sums, independent of the GroupMetrics/FairnessGaps code paths.
struct Oracle {
    const JointDistribution& d;

    double mass_y_a(int y, int a) const { return d.p[0][y][a] + d.p[1][y][a]; }
    double mass_yhat_a(int yhat, int a) const { return d.p[yhat][0][a] + d.p[yhat][1][a]; }
    double mass_y(int y) const { return mass_y_a(y, 0) + mass_y_a(y, 1); }
    double mass_yhat(int yhat) const { return mass_yhat_a(yhat, 0) + mass_yhat_a(yhat, 1); }

    std::optional<double> sep_group(int yhat, int y, int a) const {
        const double den = mass_y_a(y, a);
        if (den <= 0.0) return std::nullopt;
        return d.p[yhat][y][a] / den;
    }
    std::optional<double> sep_marginal(int yhat, int y) const {
        const double den = mass_y(y);
        if (den <= 0.0) return std::nullopt;
        return (d.p[yhat][y][0] + d.p[yhat][y][1]) / den;
    }
    std::optional<double> suff_group(int y, int yhat, int a) const {
        const double den = mass_yhat_a(yhat, a);
        if (den <= 0.0) return std::nullopt;
        return d.p[yhat][y][a] / den;
    }
    std::optional<double> suff_marginal(int y, int yhat) const {
        const double den = mass_yhat(yhat);
        if (den <= 0.0) return std::nullopt;
        return (d.p[yhat][y][0] + d.p[yhat][y][1]) / den;
    }
    std::optional<double> gap_sep(int yhat, int y, int a) const {
        const auto g = sep_group(yhat, y, a), m = sep_marginal(yhat, y);
        if (!g || !m) return std::nullopt;
        return std::abs(*g - *m);
    }
    std::optional<double> gap_suff(int y, int yhat, int a) const {
        const auto g = suff_group(y, yhat, a), m = suff_marginal(y, yhat);
        if (!g || !m) return std::nullopt;
        return std::abs(*g - *m);
    }
};

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

// perfect classifier over chosen (Y, A) marginals
JointDistribution perfect_classifier() {
    std::array<double, 8> cells{};
    // order [yhat][y][a]
    auto at = [&](int yhat, int y, int a) -> double& {
        return cells[static_cast<std::size_t>(yhat * 4 + y * 2 + a)];
    };
    at(1, 1, 0) = 0.6 * 0.53;
    at(0, 0, 0) = 0.6 * 0.47;
    at(1, 1, 1) = 0.4 * 0.39;
    at(0, 0, 1) = 0.4 * 0.61;
    return JointDistribution::from_cells(cells);
}

JointDistribution flipped_classifier() {
    std::array<double, 8> cells{};
    auto at = [&](int yhat, int y, int a) -> double& {
        return cells[static_cast<std::size_t>(yhat * 4 + y * 2 + a)];
    };
    at(0, 1, 0) = 0.6 * 0.53;
    at(1, 0, 0) = 0.6 * 0.47;
    at(0, 1, 1) = 0.4 * 0.39;
    at(1, 0, 1) = 0.4 * 0.61;
    return JointDistribution::from_cells(cells);
}

}  // namespace

TEST_CASE("counts_from_predictions: single sample") {
    const std::vector<int> p{1}, t{1}, g{0};
    const ConfusionCounts c = counts_from_predictions(p, t, g);
    CHECK(c.tp[0] == 1);
    CHECK(c.total() == 1);
    CHECK(c.tn[0] + c.fp[0] + c.fn[0] + c.group_total(1) == 0);
}

TEST_CASE("counts_from_predictions: perfect classifier has no fp/fn") {
    const std::vector<int> t{1, 0, 1, 0, 1}, g{0, 0, 1, 1, 0};
    const ConfusionCounts c = counts_from_predictions(t, t, g);
    for (int a = 0; a < 2; ++a) {
        CHECK(c.fp[a] == 0);
        CHECK(c.fn[a] == 0);
    }
    CHECK(c.total() == 5);
}

TEST_CASE("counts_from_predictions: hand-enumerated four samples") {
    const std::vector<int> p{1, 0, 1, 0}, t{1, 1, 0, 0}, g{0, 0, 1, 1};
    const ConfusionCounts c = counts_from_predictions(p, t, g);
    CHECK(c.tp[0] == 1);
    CHECK(c.fn[0] == 1);
    CHECK(c.fp[1] == 1);
    CHECK(c.tn[1] == 1);
    CHECK(c.tp[1] == 0);
    CHECK(c.tn[0] == 0);
}

TEST_CASE("counts_from_predictions: input validation") {
    const std::vector<int> a{1, 0}, b{1};
    CHECK_THROWS_AS(counts_from_predictions(a, b, b), InputError);
    const std::vector<int> empty;
    CHECK_THROWS_AS(counts_from_predictions(empty, empty, empty), InputError);
    const std::vector<int> bad{2}, ok{1};
    CHECK_THROWS_AS(counts_from_predictions(bad, ok, ok), InputError);
}

TEST_CASE("distribution_from_counts examples") {
    ConfusionCounts c;
    c.tp[0] = 1;
    const JointDistribution d = distribution_from_counts(c);
    CHECK(d.p[1][1][0] == 1.0);

    ConfusionCounts u;
    for (int a = 0; a < 2; ++a) u.tp[a] = u.tn[a] = u.fp[a] = u.fn[a] = 1;
    const JointDistribution du = distribution_from_counts(u);
    for (const double v : du.cells()) CHECK(v == 0.125);

    ConfusionCounts two;
    two.tp[0] = 2;
    two.tn[1] = 2;
    const JointDistribution dt = distribution_from_counts(two);
    CHECK(dt.p[1][1][0] == 0.5);
    CHECK(dt.p[0][0][1] == 0.5);

    CHECK_THROWS_AS(distribution_from_counts(ConfusionCounts{}), InputError);
}

TEST_CASE("JointDistribution validation") {
    std::array<double, 8> cells{};
    cells[0] = 0.5;
    CHECK_THROWS_AS(JointDistribution::from_cells(cells), InputError);  // sums to 0.5
    cells[1] = 0.5 + 1e-9;
    CHECK_THROWS_AS(JointDistribution::from_cells(cells), InputError);
    cells[1] = 0.6;
    cells[0] = -0.1;
    CHECK_THROWS_AS(JointDistribution::from_cells(cells), InputError);
}

TEST_CASE("group_metrics: perfect classifier") {
    const GroupMetrics m = group_metrics(perfect_classifier());
    for (int a = 0; a < 2; ++a) {
        CHECK(*m.group[a].tpr == 1.0);
        CHECK(*m.group[a].tnr == 1.0);
        CHECK(*m.group[a].ppv == 1.0);
        CHECK(*m.group[a].npv == 1.0);
    }
    CHECK(m.acc == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("group_metrics: flipped classifier") {
    const GroupMetrics m = group_metrics(flipped_classifier());
    for (int a = 0; a < 2; ++a) {
        CHECK(*m.group[a].tpr == 0.0);
        CHECK(*m.group[a].tnr == 0.0);
        CHECK(*m.group[a].ppv == 0.0);
        CHECK(*m.group[a].npv == 0.0);
    }
    CHECK(m.acc == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("group_metrics: benchmark-table base odds") {
    const GroupMetrics m = group_metrics(perfect_classifier());
    CHECK(*m.rho[0] == doctest::Approx(1.1277).epsilon(1e-3));
    CHECK(*m.rho[1] == doctest::Approx(0.6393).epsilon(1e-3));
}

TEST_CASE("group_metrics: undefinedness is encoded, not coerced") {
    // no negatives at all: TNR/FPR conditioning event has zero probability
    std::array<double, 8> cells{};
    cells[1 * 4 + 1 * 2 + 0] = 0.5;  // yhat=1, y=1, a=0
    cells[0 * 4 + 1 * 2 + 1] = 0.5;  // yhat=0, y=1, a=1
    const GroupMetrics m = group_metrics(JointDistribution::from_cells(cells));
    CHECK(!m.group[0].tnr.has_value());
    CHECK(!m.group[0].fpr.has_value());
    CHECK(!m.rho[0].has_value());  // Pr[Y=0|A=0] = 0
    CHECK(m.group[0].tpr.has_value());
    CHECK(!m.group[1].ppv.has_value());  // group 1 never predicted positive
}

TEST_CASE("fairness_gaps: perfect classifier has zero gaps") {
    const FairnessGaps g = fairness_gaps(group_metrics(perfect_classifier()));
    CHECK(*g.sep_max == 0.0);
    CHECK(*g.suff_max == 0.0);
    CHECK(*g.sep_binary == 0.0);
    CHECK(*g.suff_binary == 0.0);
    CHECK(*g.deo == 0.0);
}

TEST_CASE("fairness_gaps: separation holds iff sep_max is zero") {
    // Yhat independent of A given Y: shared conditional q(yhat|y) across groups
    std::array<double, 8> cells{};
    auto at = [&](int yhat, int y, int a) -> double& {
        return cells[static_cast<std::size_t>(yhat * 4 + y * 2 + a)];
    };
    const double pa[2] = {0.6, 0.4};
    const double py1[2] = {0.5, 0.3};
    const double q1[2] = {0.25, 0.8};  // Pr[Yhat=1 | Y=y]
    for (int a = 0; a < 2; ++a)
        for (int y = 0; y < 2; ++y) {
            const double mass = pa[a] * (y == 1 ? py1[a] : 1.0 - py1[a]);
            at(1, y, a) = mass * q1[y];
            at(0, y, a) = mass * (1.0 - q1[y]);
        }
    const FairnessGaps g = fairness_gaps(group_metrics(JointDistribution::from_cells(cells)));
    CHECK(*g.sep_max == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(*g.deo == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fairness_gaps: three-decimal distribution matches the enumeration oracle") {
    const std::array<double, 8> cells{0.101, 0.083, 0.270, 0.090, 0.150, 0.070, 0.120, 0.116};
    const JointDistribution d = JointDistribution::from_cells(cells);
    const Oracle oracle{d};
    const FairnessGaps g = fairness_gaps(group_metrics(d));
    double want_sep_max = 0.0, want_suff_max = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int a = 0; a < 2; ++a) {
                const auto os = oracle.gap_sep(i, j, a);
                REQUIRE(g.sep[i][j][a].has_value() == os.has_value());
                if (os) {
                    CHECK(*g.sep[i][j][a] == doctest::Approx(*os).epsilon(1e-12));
                    want_sep_max = std::max(want_sep_max, *os);
                }
                const auto ou = oracle.gap_suff(i, j, a);
                REQUIRE(g.suff[i][j][a].has_value() == ou.has_value());
                if (ou) {
                    CHECK(*g.suff[i][j][a] == doctest::Approx(*ou).epsilon(1e-12));
                    want_suff_max = std::max(want_suff_max, *ou);
                }
            }
    CHECK(*g.sep_max == doctest::Approx(want_sep_max).epsilon(1e-12));
    CHECK(*g.suff_max == doctest::Approx(want_suff_max).epsilon(1e-12));
}

TEST_CASE("property: complements, Bayes identities, accuracy decomposition") {
    int bayes_checked = 0;
    for (std::uint64_t s = 0; s < 10000; ++s) {
        const JointDistribution d = random_distribution(s * 7919 + 3);
        const GroupMetrics m = group_metrics(d);

        for (int a = 0; a < 2; ++a) {
            const RateSet& r = m.group[a];
            if (r.tpr) CHECK(*r.tpr + *r.fnr == doctest::Approx(1.0).epsilon(1e-12));
            if (r.tnr) CHECK(*r.tnr + *r.fpr == doctest::Approx(1.0).epsilon(1e-12));
            if (r.ppv) CHECK(*r.ppv + *r.fdr == doctest::Approx(1.0).epsilon(1e-12));
            if (r.npv) CHECK(*r.npv + *r.for_ == doctest::Approx(1.0).epsilon(1e-12));

            // FPR = rho * (FDR/PPV) * TPR whenever all factors defined
            if (r.fpr && m.rho[a] && r.fdr && r.ppv && *r.ppv > 0.0 && r.tpr) {
                const double rhs = *m.rho[a] * (*r.fdr / *r.ppv) * *r.tpr;
                CHECK(std::abs(*r.fpr - rhs) < 1e-10);
                ++bayes_checked;
            }
            // rho = (TNR/FNR) * (FOR/NPV)
            if (m.rho[a] && r.tnr && r.fnr && *r.fnr > 0.0 && r.for_ && r.npv && *r.npv > 0.0) {
                const double rhs = (*r.tnr / *r.fnr) * (*r.for_ / *r.npv);
                CHECK(std::abs(*m.rho[a] - rhs) < 1e-10);
            }
        }

        // acc = sum_a TNR_a Pr[Y=0,A=a] + TPR_a Pr[Y=1,A=a]
        double acc = 0.0;
        bool defined = true;
        for (int a = 0; a < 2; ++a) {
            if (!m.group[a].tnr || !m.group[a].tpr) {
                defined = false;
                break;
            }
            acc += *m.group[a].tnr * d.pr_y_a(0, a) + *m.group[a].tpr * d.pr_y_a(1, a);
        }
        if (defined) CHECK(std::abs(acc - m.acc) < 1e-12);
    }
    CHECK(bayes_checked > 9000);  // random distributions almost surely define everything
}

TEST_CASE("property: gaps lie in [0,1], deo <= sep_binary, maxima are maxima") {
    for (std::uint64_t s = 0; s < 2000; ++s) {
        const JointDistribution d = random_distribution(s * 104729 + 17);
        const FairnessGaps g = fairness_gaps(group_metrics(d));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int a = 0; a < 2; ++a) {
                    if (g.sep[i][j][a]) {
                        CHECK(*g.sep[i][j][a] >= 0.0);
                        CHECK(*g.sep[i][j][a] <= 1.0);
                        CHECK(*g.sep[i][j][a] <= *g.sep_max);
                    }
                    if (g.suff[i][j][a]) CHECK(*g.suff[i][j][a] <= *g.suff_max);
                }
        if (g.deo && g.sep_binary) CHECK(*g.deo <= *g.sep_binary);
    }
}

TEST_CASE("counts -> distribution -> metrics agrees with direct count ratios") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        ConfusionCounts c;
        for (int a = 0; a < 2; ++a) {
            c.tp[a] = rng.below(50);
            c.tn[a] = rng.below(50);
            c.fp[a] = rng.below(50);
            c.fn[a] = rng.below(50);
        }
        if (c.total() == 0) continue;
        const GroupMetrics m = group_metrics(distribution_from_counts(c));
        for (int a = 0; a < 2; ++a) {
            const double pos = static_cast<double>(c.tp[a] + c.fn[a]);
            if (pos > 0)
                CHECK(*m.group[a].tpr ==
                      doctest::Approx(static_cast<double>(c.tp[a]) / pos).epsilon(1e-12));
            const double pred_pos = static_cast<double>(c.tp[a] + c.fp[a]);
            if (pred_pos > 0)
                CHECK(*m.group[a].ppv ==
                      doctest::Approx(static_cast<double>(c.tp[a]) / pred_pos).epsilon(1e-12));
        }
    }
}
