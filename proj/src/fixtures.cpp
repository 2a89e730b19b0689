#include "fairgap/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "fairgap/errors.hpp"
#include "fairgap/rng.hpp"

namespace fairgap::data {

namespace {

struct Cell {
    int y;
    int a;
};

// Fixed per-group label counts; marginals are exact by construction.
// COMPAS: 6,172 rows, P(A=0) = 0.600, P(Y=1|A=0) = 0.5301, P(Y=1|A=1) = 0.3900.
constexpr std::size_t kCompasN[2] = {3703, 2469};
constexpr std::size_t kCompasPos[2] = {1963, 963};
// NELS: 4,743 rows, P(A=0) = 0.0991, P(Y=1|A=0) = 0.3106, P(Y=1|A=1) = 0.4840.
constexpr std::size_t kNelsN[2] = {470, 4273};
constexpr std::size_t kNelsPos[2] = {146, 2068};

std::vector<Cell> row_plan(const std::size_t n[2], const std::size_t pos[2],
                           std::uint64_t seed) {
    std::vector<Cell> rows;
    for (int a = 0; a < 2; ++a) {
        for (std::size_t i = 0; i < n[a]; ++i)
            rows.push_back({i < pos[a] ? 1 : 0, a});
    }
    SplitMix64 rng(mix_seed(seed, 0x0BDE));
    for (std::size_t i = rows.size(); i > 1; --i)
        std::swap(rows[i - 1], rows[rng.below(i)]);
    return rows;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Risk features mix a well-separated latent concept (agreeing with the label
// up to group- and class-dependent flip noise) with an ambiguous low-signal
// band concentrated in group 1. An accuracy-driven model leaves the band on
// the negative side, which depresses TPR_1 and creates the benchmark's large
// between-group TPR difference; moving the band is cheap in accuracy but
// expensive in FPR, which is what separates the fairness objectives.
double compas_risk(int y, int a, SplitMix64& rng) {
    // ambiguous mass concentrated in group 1 just below the decision boundary:
    // the unconstrained fit leaves it predicted negative (suppressing TPR_1),
    // while a regularized objective can move it at little accuracy cost
    const double band_pos[2] = {0.05, 0.75};  // Pr[ambiguous | Y = 1, A = a]
    const double band_neg[2] = {0.05, 0.50};  // Pr[ambiguous | Y = 0, A = a]
    if (rng.uniform() < (y == 1 ? band_pos[a] : band_neg[a]))
        return -0.10 + 0.25 * rng.normal();
    const double flip_pos[2] = {0.25, 0.08};  // Pr[latent = 0 | Y = 1, A = a]
    const double flip_neg[2] = {0.06, 0.28};  // Pr[latent = 1 | Y = 0, A = a]
    const double q = y == 1 ? flip_pos[a] : flip_neg[a];
    const int latent = (rng.uniform() < q) ? 1 - y : y;
    const double half_sep = 1.2;
    return (latent == 1 ? half_sep : -half_sep) + 0.8 * rng.normal();
}

}  // namespace

Schema compas_schema() {
    Schema s;
    s.label_column = "two_year_recid";
    s.group_column = "race";
    s.feature_columns = {
        {"jail_in", ColumnType::numeric},
        {"jail_out", ColumnType::numeric},
        {"age", ColumnType::numeric},
        {"priors_count", ColumnType::numeric},
        {"days_b_screening_arrest", ColumnType::numeric},
        {"charge_degree", ColumnType::categorical},
        {"race", ColumnType::numeric},
        {"age_category", ColumnType::categorical},
        {"sex", ColumnType::categorical},
    };
    return s;
}

Schema nels_schema() {
    Schema s;
    s.label_column = "gpa_top";
    s.group_column = "race";
    s.feature_columns = {
        {"math_score", ColumnType::numeric},
        {"reading_score", ColumnType::numeric},
        {"science_score", ColumnType::numeric},
        {"social_score", ColumnType::numeric},
        {"ses", ColumnType::numeric},
        {"parent_education", ColumnType::numeric},
        {"homework_hours", ColumnType::numeric},
        {"attendance_rate", ColumnType::numeric},
        {"extracurriculars", ColumnType::numeric},
        {"absences", ColumnType::numeric},
        {"course_level", ColumnType::numeric},
        {"race", ColumnType::numeric},
    };
    return s;
}

void write_compas_fixture(const std::string& path, std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write " + path);
    out << "jail_in,jail_out,age,priors_count,days_b_screening_arrest,"
           "charge_degree,race,age_category,sex,two_year_recid\n";

    const std::vector<Cell> rows = row_plan(kCompasN, kCompasPos, seed);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        SplitMix64 rng(mix_seed(seed, 0xC0117A5 + i));
        const int y = rows[i].y, a = rows[i].a;
        const double r = compas_risk(y, a, rng);

        const long priors =
            std::max(0L, std::lround(2.0 + 1.9 * r + 1.2 * rng.normal()));
        const long age =
            std::lround(std::clamp(38.0 - 4.5 * r + 8.5 * rng.normal(), 18.0, 75.0));
        const long jail_days =
            std::max(0L, std::lround(std::exp(1.1 + 0.8 * r + 0.8 * rng.normal()) - 1.0));
        const long jail_in = static_cast<long>(rng.below(1000));
        const long screening =
            std::lround(std::clamp(2.5 * rng.normal(), -30.0, 30.0));
        const char* degree = rng.uniform() < sigmoid(0.3 + 0.7 * r) ? "F" : "M";
        const char* age_cat = age < 25 ? "Less25" : (age <= 45 ? "25to45" : "Greater45");
        const char* sex = rng.uniform() < 0.81 ? "Male" : "Female";

        out << jail_in << ',' << (jail_in + jail_days) << ',' << age << ',' << priors << ','
            << screening << ',' << degree << ',' << a << ',' << age_cat << ',' << sex << ','
            << y << '\n';
    }
}

void write_nels_fixture(const std::string& path, std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write " + path);
    out << "math_score,reading_score,science_score,social_score,ses,parent_education,"
           "homework_hours,attendance_rate,extracurriculars,absences,course_level,race,"
           "gpa_top\n";

    const std::vector<Cell> rows = row_plan(kNelsN, kNelsPos, seed);
    out.precision(6);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        SplitMix64 rng(mix_seed(seed, 0x9E15 + i));
        const int y = rows[i].y, a = rows[i].a;
        const double r = (y == 1 ? 0.8 : -0.8) + rng.normal();

        const double math = 50.0 + 8.0 * r + 4.0 * rng.normal();
        const double reading = 50.0 + 7.0 * r + 4.5 * rng.normal();
        const double science = 50.0 + 7.5 * r + 4.5 * rng.normal();
        const double social = 50.0 + 6.5 * r + 5.0 * rng.normal();
        const double ses = 0.2 * r + rng.normal();
        const long parent_ed = std::clamp(std::lround(3.0 + 0.8 * r + 1.2 * rng.normal()), 1L, 6L);
        const double homework = std::max(0.0, 5.0 + 2.0 * r + 2.0 * rng.normal());
        const double attendance = std::clamp(0.92 + 0.03 * r + 0.04 * rng.normal(), 0.4, 1.0);
        const long extra = std::clamp(std::lround(2.0 + 0.6 * r + 1.0 * rng.normal()), 0L, 8L);
        const long absences = std::max(0L, std::lround(6.0 - 2.5 * r + 3.0 * rng.normal()));
        const long course = std::clamp(std::lround(2.0 + 0.7 * r + 0.9 * rng.normal()), 1L, 4L);

        out << math << ',' << reading << ',' << science << ',' << social << ',' << ses << ','
            << parent_ed << ',' << homework << ',' << attendance << ',' << extra << ','
            << absences << ',' << course << ',' << a << ',' << y << '\n';
    }
}

void write_compas_baseline_predictions(const std::string&, const std::string& out_path,
                                       std::uint64_t seed) {
    std::ofstream out(out_path);
    if (!out) throw IngestError("cannot write " + out_path);
    const std::vector<Cell> rows = row_plan(kCompasN, kCompasPos, seed);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        SplitMix64 rng(mix_seed(seed, 0xBA5E11E + i));
        const int y = rows[i].y;
        const int pred = rng.uniform() < 0.72 ? y : 1 - y;
        out << pred << '\n';
    }
}

}  // namespace fairgap::data
