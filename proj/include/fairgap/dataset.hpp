#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairgap/model.hpp"

namespace fairgap::data {

enum class ColumnType { numeric, categorical };

struct ColumnSpec {
    std::string name;
    ColumnType type = ColumnType::numeric;
};

// Column layout of a CSV source: which column is the binary label, which the
// binary group, and the typed feature columns.
struct Schema {
    std::string label_column;
    std::string group_column;
    std::vector<ColumnSpec> feature_columns;
    char delimiter = ',';
};

// Origin and encoding parameters of one feature column.
struct ColumnMeta {
    std::string source;    // CSV column name
    std::string category;  // one-hot value, empty for numeric columns
    double mean = 0.0;     // standardization parameters (numeric columns)
    double stdev = 1.0;
};

struct Dataset {
    nn::Matrix features;
    std::vector<int> truths;
    std::vector<int> groups;
    std::string name;
    std::vector<ColumnMeta> columns;

    std::size_t size() const { return truths.size(); }
};

// Loads and encodes a CSV file: header row required, categorical columns
// one-hot encoded (categories sorted for determinism), numeric columns
// standardized to mean 0 / variance 1 over the full set with the parameters
// recorded in the column metadata. Label and group values must be 0 or 1.
Dataset load_csv(const std::string& path, const Schema& schema);

struct DatasetStats {
    std::size_t n = 0;
    double p_y0 = 0, p_y1 = 0, p_a0 = 0, p_a1 = 0;
    std::optional<double> p_y1_given_a0, p_y1_given_a1;
    std::optional<double> gamma0, gamma1;  // base odds per group
};

DatasetStats compute_stats(const Dataset& d);

struct SplitPlan {
    struct Fold {
        std::vector<std::size_t> validation;
        std::vector<std::size_t> test;
    };
    std::vector<std::size_t> train;  // two-thirds, stratified over the group
    std::vector<Fold> folds;         // validation pieces partition the held-out third
    std::uint64_t seed = 0;
    int k = 0;
};

// Stratified two-thirds/one-third split; the held-out third is partitioned
// into k folds stratified over the sensitive attribute. Fold i uses piece i
// as validation and the remaining pieces as test. Deterministic in the seed.
SplitPlan make_split(const Dataset& d, int k, std::uint64_t seed);

// Row subset preserving column metadata.
Dataset take(const Dataset& d, std::span<const std::size_t> indices);

// Tabular stand-in for the colored-digits dataset: 10 latent classes binarized
// into the label (classes 5-9 positive), group = label with probability
// 1 - flip_prob mapped so that group 0 is the majority-positive one, features
// a class-dependent mean vector plus a group-indicative coordinate plus noise.
Dataset generate_colormnist_tabular(std::size_t n, double flip_prob, int feature_dim,
                                    double noise_scale, std::uint64_t seed);

// Writes a dataset back out in the ingestion schema (raw feature values; the
// matrix is assumed to hold already-encoded numerics).
void write_csv(const Dataset& d, const std::string& path);

}  // namespace fairgap::data
