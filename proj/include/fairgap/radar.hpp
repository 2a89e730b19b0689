#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "fairgap/trainer.hpp"

namespace fairgap::report {

// One radar axis: mean and spread of a between-group violation over runs,
// plus its 2x2 covariance with the error axis for uncertainty ellipses.
struct RadarAxis {
    std::size_t runs = 0;  // records where this delta was defined
    double mean = 0.0;
    double stddev = 0.0;
    // row-major [var(error), cov(error, delta); cov, var(delta)]
    std::array<double, 4> cov_with_error{};
};

struct RadarEntry {
    std::string objective;
    std::size_t runs = 0;
    double mean_error = 0.0;
    double std_error = 0.0;
    RadarAxis dtpr, dfpr, dppv, dnpv;
};

struct RadarReport {
    std::vector<RadarEntry> entries;  // sorted by objective label
    std::vector<std::string> warnings;
};

// Groups test-set results by objective label. Records are canonically ordered
// before summation so the output does not depend on input permutation.
RadarReport aggregate_radar(std::span<const train::RunRecord> records);

}  // namespace fairgap::report
