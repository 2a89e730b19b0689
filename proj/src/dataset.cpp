#include "fairgap/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fairgap/errors.hpp"
#include "fairgap/rng.hpp"

namespace fairgap::data {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == delim) {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_numeric(const std::string& cell, std::size_t row, const std::string& col) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
        return v;
    } catch (const std::exception&) {
        throw IngestError("unparseable numeric cell '" + cell + "' at row " +
                          std::to_string(row) + ", column '" + col + "'");
    }
}

int parse_binary(const std::string& cell, std::size_t row, const std::string& col) {
    if (cell == "0") return 0;
    if (cell == "1") return 1;
    throw IngestError("non-binary value '" + cell + "' at row " + std::to_string(row) +
                      ", column '" + col + "'");
}

}  // namespace

Dataset load_csv(const std::string& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw IngestError(path + ": missing header row");
    const std::vector<std::string> header = split_line(line, schema.delimiter);

    auto column_index = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw IngestError(path + ": missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };

    const std::size_t label_idx = column_index(schema.label_column);
    const std::size_t group_idx = column_index(schema.group_column);
    std::vector<std::size_t> feature_idx;
    for (const auto& c : schema.feature_columns) feature_idx.push_back(column_index(c.name));

    std::vector<std::vector<std::string>> raw;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        auto fields = split_line(line, schema.delimiter);
        if (fields.size() != header.size())
            throw IngestError(path + ": row " + std::to_string(row) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(header.size()));
        raw.push_back(std::move(fields));
    }
    if (raw.empty()) throw IngestError(path + ": no data rows");

    Dataset d;
    d.name = path;
    const std::size_t n = raw.size();
    d.truths.resize(n);
    d.groups.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.truths[i] = parse_binary(raw[i][label_idx], i + 2, schema.label_column);
        d.groups[i] = parse_binary(raw[i][group_idx], i + 2, schema.group_column);
    }

    // First pass over the feature columns to plan the encoded width.
    struct Encoded {
        const ColumnSpec* spec;
        std::size_t raw_idx;
        std::vector<std::string> categories;  // sorted, for categorical columns
    };
    std::vector<Encoded> plan;
    std::size_t width = 0;
    for (std::size_t c = 0; c < schema.feature_columns.size(); ++c) {
        Encoded e{&schema.feature_columns[c], feature_idx[c], {}};
        if (e.spec->type == ColumnType::categorical) {
            std::map<std::string, int> seen;
            for (const auto& r : raw) seen.emplace(r[e.raw_idx], 0);
            for (const auto& [k, v] : seen) e.categories.push_back(k);
            width += e.categories.size();
        } else {
            width += 1;
        }
        plan.push_back(std::move(e));
    }

    d.features = nn::Matrix(n, width);
    std::size_t col = 0;
    for (const auto& e : plan) {
        if (e.spec->type == ColumnType::categorical) {
            for (std::size_t i = 0; i < n; ++i) {
                const auto& cell = raw[i][e.raw_idx];
                const auto it = std::lower_bound(e.categories.begin(), e.categories.end(), cell);
                d.features.at(i, col + static_cast<std::size_t>(it - e.categories.begin())) = 1.0;
            }
            for (const auto& cat : e.categories)
                d.columns.push_back({e.spec->name, cat, 0.0, 1.0});
            col += e.categories.size();
        } else {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double v = parse_numeric(raw[i][e.raw_idx], i + 2, e.spec->name);
                d.features.at(i, col) = v;
                mean += v;
            }
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dv = d.features.at(i, col) - mean;
                var += dv * dv;
            }
            var /= static_cast<double>(n);
            const double stdev = var > 0.0 ? std::sqrt(var) : 1.0;
            for (std::size_t i = 0; i < n; ++i)
                d.features.at(i, col) = (d.features.at(i, col) - mean) / stdev;
            d.columns.push_back({e.spec->name, "", mean, stdev});
            ++col;
        }
    }
    return d;
}

DatasetStats compute_stats(const Dataset& d) {
    if (d.size() == 0) throw InputError("compute_stats: empty dataset");
    DatasetStats s;
    s.n = d.size();
    std::size_t ny1 = 0, na1 = 0, ny1a0 = 0, ny1a1 = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        ny1 += d.truths[i];
        na1 += d.groups[i];
        if (d.truths[i] == 1) (d.groups[i] == 0 ? ny1a0 : ny1a1) += 1;
    }
    const double n = static_cast<double>(s.n);
    const std::size_t na0 = s.n - na1;
    s.p_y1 = ny1 / n;
    s.p_y0 = 1.0 - s.p_y1;
    s.p_a1 = na1 / n;
    s.p_a0 = 1.0 - s.p_a1;
    if (na0 > 0) {
        const double p = static_cast<double>(ny1a0) / na0;
        s.p_y1_given_a0 = p;
        if (p < 1.0) s.gamma0 = p / (1.0 - p);
    }
    if (na1 > 0) {
        const double p = static_cast<double>(ny1a1) / na1;
        s.p_y1_given_a1 = p;
        if (p < 1.0) s.gamma1 = p / (1.0 - p);
    }
    return s;
}

namespace {

// Seeded Fisher-Yates.
void shuffle_indices(std::vector<std::size_t>& idx, SplitMix64& rng) {
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.below(i)]);
}

}  // namespace

SplitPlan make_split(const Dataset& d, int k, std::uint64_t seed) {
    if (k < 2) throw InputError("make_split: k must be >= 2");
    if (d.size() < static_cast<std::size_t>(3 * k))
        throw SplitError("make_split: dataset too small for k=" + std::to_string(k));

    std::vector<std::size_t> by_group[2];
    for (std::size_t i = 0; i < d.size(); ++i)
        by_group[d.groups[i]].push_back(i);
    const bool both_groups = !by_group[0].empty() && !by_group[1].empty();

    SplitPlan plan;
    plan.seed = seed;
    plan.k = k;
    plan.folds.resize(static_cast<std::size_t>(k));

    SplitMix64 rng(mix_seed(seed, 0x5117));
    std::vector<std::vector<std::size_t>> fold_members(static_cast<std::size_t>(k));
    for (int a = 0; a < 2; ++a) {
        auto& idx = by_group[a];
        if (idx.empty()) continue;
        shuffle_indices(idx, rng);
        // two-thirds to train, rounded half-up to keep group proportions
        const std::size_t n_train =
            static_cast<std::size_t>(std::llround(2.0 * static_cast<double>(idx.size()) / 3.0));
        for (std::size_t i = 0; i < n_train; ++i) plan.train.push_back(idx[i]);
        // remaining third dealt round-robin into the k folds
        std::size_t held = 0;
        for (std::size_t i = n_train; i < idx.size(); ++i, ++held)
            fold_members[held % static_cast<std::size_t>(k)].push_back(idx[i]);
        if (both_groups && held < static_cast<std::size_t>(k))
            throw SplitError("make_split: a fold would miss group " + std::to_string(a) +
                             "; use a smaller k");
    }

    for (int f = 0; f < k; ++f) {
        auto& fold = plan.folds[static_cast<std::size_t>(f)];
        fold.validation = fold_members[static_cast<std::size_t>(f)];
        for (int other = 0; other < k; ++other)
            if (other != f)
                fold.test.insert(fold.test.end(), fold_members[static_cast<std::size_t>(other)].begin(),
                                 fold_members[static_cast<std::size_t>(other)].end());
        std::sort(fold.validation.begin(), fold.validation.end());
        std::sort(fold.test.begin(), fold.test.end());
    }
    std::sort(plan.train.begin(), plan.train.end());
    return plan;
}

Dataset take(const Dataset& d, std::span<const std::size_t> indices) {
    Dataset out;
    out.name = d.name;
    out.columns = d.columns;
    out.features = nn::Matrix(indices.size(), d.features.cols);
    out.truths.resize(indices.size());
    out.groups.resize(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const std::size_t src = indices[i];
        if (src >= d.size()) throw InputError("take: index out of range");
        out.truths[i] = d.truths[src];
        out.groups[i] = d.groups[src];
        for (std::size_t c = 0; c < d.features.cols; ++c)
            out.features.at(i, c) = d.features.at(src, c);
    }
    return out;
}

Dataset generate_colormnist_tabular(std::size_t n, double flip_prob, int feature_dim,
                                    double noise_scale, std::uint64_t seed) {
    if (n < 2) throw InputError("generate_colormnist_tabular: n must be >= 2");
    if (!(flip_prob >= 0.0 && flip_prob < 0.5))
        throw InputError("generate_colormnist_tabular: flip_prob must lie in [0, 0.5)");
    if (feature_dim < 2) throw InputError("generate_colormnist_tabular: feature_dim must be >= 2");
    if (!(noise_scale >= 0.0))
        throw InputError("generate_colormnist_tabular: noise_scale must be nonnegative");

    // Class prototype directions are a fixed function of the seed.
    SplitMix64 proto_rng(mix_seed(seed, 0xC1A55));
    std::vector<std::vector<double>> prototypes(10, std::vector<double>(feature_dim));
    for (auto& proto : prototypes) {
        double norm2 = 0.0;
        for (double& v : proto) {
            v = proto_rng.normal();
            norm2 += v * v;
        }
        const double inv = 1.0 / std::sqrt(std::max(norm2, 1e-12));
        for (double& v : proto) v *= inv;
    }

    Dataset d;
    d.name = "colormnist-tabular";
    d.features = nn::Matrix(n, static_cast<std::size_t>(feature_dim));
    d.truths.resize(n);
    d.groups.resize(n);
    for (int j = 0; j < feature_dim; ++j)
        d.columns.push_back({"f" + std::to_string(j), "", 0.0, 1.0});

    for (std::size_t i = 0; i < n; ++i) {
        SplitMix64 rng(mix_seed(seed, i));
        const int cls = static_cast<int>(rng.below(10));
        const int y = cls >= 5 ? 1 : 0;
        const bool flip = rng.uniform() < flip_prob;
        // color red <-> group 0 is assigned to the positive class, then
        // flipped with probability flip_prob; group 0 stays majority-positive
        const int a = (y == 1) == !flip ? 0 : 1;
        d.truths[i] = y;
        d.groups[i] = a;
        const auto& proto = prototypes[static_cast<std::size_t>(cls)];
        for (int j = 0; j < feature_dim; ++j)
            d.features.at(i, static_cast<std::size_t>(j)) =
                proto[static_cast<std::size_t>(j)] + noise_scale * rng.normal();
        // group-indicative coordinate (the "color channel")
        d.features.at(i, 0) += a == 0 ? 0.5 : -0.5;
    }
    return d;
}

void write_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write " + path);
    for (std::size_t c = 0; c < d.features.cols; ++c) {
        const auto& meta = d.columns[c];
        out << (meta.category.empty() ? meta.source : meta.source + "_" + meta.category) << ',';
    }
    out << "label,group\n";
    out.precision(17);
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t c = 0; c < d.features.cols; ++c) out << d.features.at(i, c) << ',';
        out << d.truths[i] << ',' << d.groups[i] << '\n';
    }
}

}  // namespace fairgap::data
