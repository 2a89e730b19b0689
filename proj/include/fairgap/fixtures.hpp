#pragma once

#include <cstdint>
#include <string>

#include "fairgap/dataset.hpp"

namespace fairgap::data {

// Bundled benchmark fixtures. Both are written as raw CSV files matching the
// published preprocessing schemas and are regenerated deterministically from
// a seed; marginal label/group statistics match the benchmark descriptions
// exactly by construction (counts are fixed, not sampled).

Schema compas_schema();
Schema nels_schema();

// 6,172 rows, 9 raw feature columns (race doubles as the group), group-0
// share 0.6, recidivism rates 0.53 / 0.39 per group.
void write_compas_fixture(const std::string& path, std::uint64_t seed);

// 4,743 rows, group-0 share 0.099, positive rates 0.311 / 0.484 per group.
void write_nels_fixture(const std::string& path, std::uint64_t seed);

// Baseline hard predictions aligned row-for-row with the fixture written by
// write_compas_fixture with the same seed (one 0/1 per line).
void write_compas_baseline_predictions(const std::string& csv_path, const std::string& out_path,
                                       std::uint64_t seed);

}  // namespace fairgap::data
