#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairgap/approx.hpp"
#include "fairgap/errors.hpp"
#include "fairgap/fixtures.hpp"
#include "fairgap/radar.hpp"
#include "fairgap/report_json.hpp"
#include "fairgap/run_config.hpp"
#include "fairgap/sweep.hpp"
#include "fairgap/trainer.hpp"

namespace {

using fairgap::InputError;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFindings = 3;

int env_threads() {
    const char* v = std::getenv("FAIRGAP_THREADS");
    if (!v) return 1;
    const int t = std::atoi(v);
    return t >= 1 ? t : 1;
}

void write_or_print(const json& doc, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << doc.dump(2) << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw fairgap::IngestError("cannot write " + out_path);
    out << doc.dump(2) << '\n';
}

struct DatasetArgs {
    std::string path;
    std::string kind = "csv";
    std::string schema_json;  // csv kind: file holding the schema object

    fairgap::data::Dataset load() const {
        using fairgap::config::DatasetSource;
        if (kind == "compas_fixture")
            return fairgap::data::load_csv(path, fairgap::data::compas_schema());
        if (kind == "nels_fixture")
            return fairgap::data::load_csv(path, fairgap::data::nels_schema());
        if (kind != "csv") throw InputError("unknown dataset kind: " + kind);
        if (schema_json.empty()) throw InputError("csv datasets require --schema");
        std::ifstream in(schema_json);
        if (!in) throw InputError("cannot open schema file " + schema_json);
        json js;
        in >> js;
        fairgap::data::Schema schema;
        schema.label_column = js.at("label").get<std::string>();
        schema.group_column = js.at("group").get<std::string>();
        if (js.contains("delimiter")) schema.delimiter = js.at("delimiter").get<std::string>().at(0);
        for (const auto& f : js.at("features")) {
            fairgap::data::ColumnSpec col;
            col.name = f.at("name").get<std::string>();
            col.type = f.at("type").get<std::string>() == "categorical"
                           ? fairgap::data::ColumnType::categorical
                           : fairgap::data::ColumnType::numeric;
            schema.feature_columns.push_back(col);
        }
        return fairgap::data::load_csv(path, schema);
    }
};

std::vector<int> load_predictions(const std::string& path, std::size_t expected) {
    std::ifstream in(path);
    if (!in) throw fairgap::IngestError("cannot open predictions file " + path);
    std::vector<int> preds;
    double v;
    while (in >> v) preds.push_back(v > 0.5 ? 1 : 0);
    if (preds.size() != expected)
        throw fairgap::IngestError("predictions file has " + std::to_string(preds.size()) +
                                   " rows, dataset has " + std::to_string(expected));
    return preds;
}

int cmd_audit(const DatasetArgs& ds, const std::string& preds_path, double eps, double delta,
              const std::string& out_path) {
    const fairgap::data::Dataset d = ds.load();
    const std::vector<int> preds = load_predictions(preds_path, d.size());
    const auto counts = fairgap::counts_from_predictions(preds, d.truths, d.groups);
    const auto metrics = fairgap::group_metrics(fairgap::distribution_from_counts(counts));
    write_or_print(fairgap::report::audit_report_json(d.name, d.size(), metrics, eps, delta),
                   out_path);
    return kExitOk;
}

int cmd_verify(double eps, double delta, double c, double k, std::uint64_t samples,
               int grid_resolution, std::uint64_t seed, const std::string& out_path) {
    fairgap::approx::ApproxParams params{eps, delta, c};
    // sweep presets keep delta = o(eps); larger values are allowed but flagged
    if (eps > 0.0 && delta > eps * eps)
        std::cerr << "verify: note: delta exceeds eps^2; the delta = o(eps) regime does not hold\n";
    fairgap::approx::SamplerConfig cfg;
    cfg.grid_resolution = grid_resolution;
    cfg.mc_samples = samples;
    cfg.seed = seed;
    cfg.threads = env_threads();
    const auto report = fairgap::approx::sweep_distributions(params, k, cfg);
    write_or_print(fairgap::report::sweep_report_json(report), out_path);
    if (report.n_counterexamples > 0) {
        std::cerr << "verify: " << report.n_counterexamples
                  << " counterexample(s) at K=" << k
                  << " (minimal sufficient K over sweep: " << report.minimal_sufficient_k
                  << ")\n";
        return kExitFindings;
    }
    if (report.no_premise_samples)
        std::cerr << "verify: no premise-satisfying samples in the sweep\n";
    return kExitOk;
}

int cmd_train(const std::string& config_path, const std::string& out_override,
              std::optional<std::uint64_t> seed_override) {
    fairgap::config::RunConfig rc = fairgap::config::parse_run_config(config_path);
    if (seed_override)
        for (auto& cfg : rc.configs) cfg.seed = *seed_override;
    const std::string out_path = out_override.empty() ? rc.output : out_override;

    const fairgap::data::Dataset full = fairgap::config::load_dataset(rc.dataset);
    const fairgap::data::SplitPlan plan =
        fairgap::data::make_split(full, rc.split_k, rc.split_seed);
    const fairgap::train::SuiteResult result =
        fairgap::train::run_suite(rc.configs, full, plan, rc.n_seeds, env_threads());

    fairgap::report::append_records_jsonl(out_path, result.records);
    for (const auto& f : result.failures)
        std::cerr << "run failed (config " << f.config_index << ", fold " << f.fold << "): "
                  << f.message << '\n';

    const fairgap::report::RadarReport radar =
        fairgap::report::aggregate_radar(result.records);
    std::cout << "objective        runs  mean_err  dTPR    dFPR    dPPV    dNPV\n";
    for (const auto& e : radar.entries) {
        std::printf("%-16s %4zu  %7.4f  %6.4f  %6.4f  %6.4f  %6.4f\n", e.objective.c_str(),
                    e.runs, e.mean_error, e.dtpr.mean, e.dfpr.mean, e.dppv.mean, e.dnpv.mean);
    }
    std::cout << result.records.size() << " record(s) appended to " << out_path << '\n';
    return result.failures.empty() ? kExitOk : kExitInternal;
}

int cmd_report(const std::vector<std::string>& results_files, const std::string& out_prefix,
               const std::string& format) {
    std::vector<fairgap::train::RunRecord> records;
    for (const auto& path : results_files) {
        auto part = fairgap::report::load_records_jsonl(path);
        records.insert(records.end(), std::make_move_iterator(part.begin()),
                       std::make_move_iterator(part.end()));
    }
    const fairgap::report::RadarReport radar = fairgap::report::aggregate_radar(records);
    for (const auto& w : radar.warnings) std::cerr << "warning: " << w << '\n';
    const json doc = fairgap::report::radar_report_json(radar);
    const std::string csv = fairgap::report::radar_report_csv(radar);
    if (!out_prefix.empty()) {
        write_or_print(doc, out_prefix + ".json");
        std::ofstream out(out_prefix + ".csv");
        if (!out) throw fairgap::IngestError("cannot write " + out_prefix + ".csv");
        out << csv;
    }
    if (format == "csv")
        std::cout << csv;
    else
        std::cout << doc.dump(2) << '\n';
    return kExitOk;
}

int cmd_gen_data(std::size_t n, double flip_prob, int feature_dim, double noise_scale,
                 std::uint64_t seed, const std::string& fixture, const std::string& out_path) {
    if (!fixture.empty()) {
        if (fixture == "compas")
            fairgap::data::write_compas_fixture(out_path, seed);
        else if (fixture == "nels")
            fairgap::data::write_nels_fixture(out_path, seed);
        else
            throw InputError("unknown fixture: " + fixture);
        std::cout << "wrote " << out_path << '\n';
        return kExitOk;
    }
    const auto d = fairgap::data::generate_colormnist_tabular(n, flip_prob, feature_dim,
                                                              noise_scale, seed);
    fairgap::data::write_csv(d, out_path);
    std::cout << "wrote " << out_path << " (" << d.size() << " rows)\n";
    return kExitOk;
}

int cmd_stats(const DatasetArgs& ds, const std::string& out_path) {
    const fairgap::data::Dataset d = ds.load();
    write_or_print(fairgap::report::stats_json(d.name, fairgap::data::compute_stats(d)),
                   out_path);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairness auditing, impossibility-theorem sweeps and "
                 "fairness-constrained training on tabular data"};
    app.require_subcommand(1);

    // audit
    auto* audit = app.add_subcommand("audit", "confusion metrics, gaps and (eps,delta) checks "
                                              "for a prediction file");
    DatasetArgs audit_ds;
    std::string audit_preds, audit_out;
    double audit_eps = 0.0, audit_delta = 0.0;
    audit->add_option("--data", audit_ds.path, "dataset CSV")->required();
    audit->add_option("--kind", audit_ds.kind, "csv | compas_fixture | nels_fixture");
    audit->add_option("--schema", audit_ds.schema_json, "schema JSON (csv kind)");
    audit->add_option("--preds", audit_preds, "predictions file, one 0/1 per line")->required();
    audit->add_option("--eps", audit_eps, "epsilon for approximate equality");
    audit->add_option("--delta", audit_delta, "delta for approximate equality");
    audit->add_option("--out", audit_out, "write report JSON here instead of stdout");

    // verify
    auto* verify = app.add_subcommand("verify", "numerically check the impossibility trichotomy "
                                                "over sampled joint distributions");
    double v_eps = 0.0, v_delta = 0.0, v_c = 0.1, v_k = 0.0;
    std::uint64_t v_samples = 0, v_seed = 0;
    int v_grid = 0;
    std::string v_out;
    verify->add_option("--eps", v_eps, "epsilon");
    verify->add_option("--delta", v_delta, "delta");
    verify->add_option("--c", v_c, "non-degeneracy margin c");
    verify->add_option("--k-multiplier", v_k, "constant multiplier K");
    verify->add_option("--samples", v_samples, "Monte Carlo sample count");
    verify->add_option("--grid-resolution", v_grid, "simplex grid resolution (0 = off)");
    verify->add_option("--seed", v_seed, "Monte Carlo seed");
    verify->add_option("--out", v_out, "write sweep report JSON here");

    // train
    auto* train = app.add_subcommand("train", "run a training suite from a run-config file");
    std::string t_config, t_out;
    std::optional<std::uint64_t> t_seed;
    train->add_option("--config", t_config, "run-config JSON file")->required();
    train->add_option("--out", t_out, "results JSONL path (overrides config)");
    train->add_option("--seed", t_seed, "override the base trainer seed");

    // report
    auto* rep = app.add_subcommand("report", "aggregate results files into radar data");
    std::vector<std::string> r_files;
    std::string r_out, r_format = "json";
    rep->add_option("results", r_files, "results JSONL file(s)")->required();
    rep->add_option("--out", r_out, "output prefix (writes .json and .csv)");
    rep->add_option("--format", r_format, "stdout format")
        ->check(CLI::IsMember({"json", "csv"}));

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset or a fixture CSV");
    std::size_t g_n = 60000;
    double g_flip = 0.3, g_noise = 0.35;
    int g_dim = 16;
    std::uint64_t g_seed = 0;
    std::string g_fixture, g_out;
    gen->add_option("--n", g_n, "sample count");
    gen->add_option("--flip-prob", g_flip, "group flip probability");
    gen->add_option("--feature-dim", g_dim, "feature dimension");
    gen->add_option("--noise-scale", g_noise, "feature noise scale");
    gen->add_option("--seed", g_seed, "generator seed");
    gen->add_option("--fixture", g_fixture, "write a bundled fixture instead: compas | nels");
    gen->add_option("--out", g_out, "output CSV path")->required();

    // stats
    auto* stats = app.add_subcommand("stats", "dataset statistics (base rates and group odds)");
    DatasetArgs stats_ds;
    std::string stats_out;
    stats->add_option("--data", stats_ds.path, "dataset CSV")->required();
    stats->add_option("--kind", stats_ds.kind, "csv | compas_fixture | nels_fixture");
    stats->add_option("--schema", stats_ds.schema_json, "schema JSON (csv kind)");
    stats->add_option("--out", stats_out, "write stats JSON here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints usage, exits 0
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*audit) return cmd_audit(audit_ds, audit_preds, audit_eps, audit_delta, audit_out);
        if (*verify)
            return cmd_verify(v_eps, v_delta, v_c, v_k, v_samples, v_grid, v_seed, v_out);
        if (*train) return cmd_train(t_config, t_out, t_seed);
        if (*rep) return cmd_report(r_files, r_out, r_format);
        if (*gen) return cmd_gen_data(g_n, g_flip, g_dim, g_noise, g_seed, g_fixture, g_out);
        if (*stats) return cmd_stats(stats_ds, stats_out);
    } catch (const fairgap::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fairgap::IngestError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}
