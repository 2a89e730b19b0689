#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairgap/dataset.hpp"
#include "fairgap/trainer.hpp"

namespace fairgap::config {

// Where a run gets its data: a CSV with an inline schema, one of the bundled
// fixtures (schema implied), or the synthetic generator.
struct DatasetSource {
    enum class Kind { csv, compas_fixture, nels_fixture, synthetic_colormnist };
    Kind kind = Kind::csv;
    std::string path;     // csv and fixture kinds
    data::Schema schema;  // csv kind only
    // synthetic parameters
    std::size_t n = 0;
    double flip_prob = 0.3;
    int feature_dim = 16;
    double noise_scale = 0.35;
    std::uint64_t seed = 0;
};

struct RunConfig {
    std::string name;
    bool preset = false;  // preset configs must satisfy the hyperparameter grid
    DatasetSource dataset;
    int split_k = 3;
    std::uint64_t split_seed = 0;
    std::vector<train::TrainConfig> configs;  // one per objective entry
    int n_seeds = 1;
    std::string output = "results.jsonl";
};

// Parses and fully validates a run-config JSON file; throws InputError with
// the offending key before any training work starts.
RunConfig parse_run_config(const std::string& path);

data::Dataset load_dataset(const DatasetSource& src);

}  // namespace fairgap::config
