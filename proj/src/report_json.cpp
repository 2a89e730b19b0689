#include "fairgap/report_json.hpp"

#include <fstream>
#include <sstream>

#include "fairgap/errors.hpp"

namespace fairgap::report {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

std::optional<double> opt_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

json eval_summary_json(const train::EvalSummary& s) {
    return json{{"accuracy", s.accuracy}, {"error", s.error},      {"dtpr", opt(s.dtpr)},
                {"dfpr", opt(s.dfpr)},    {"dppv", opt(s.dppv)},   {"dnpv", opt(s.dnpv)},
                {"metrics", metrics_json(s.metrics)}, {"gaps", gaps_json(s.gaps)}};
}

train::EvalSummary eval_summary_from(const json& j) {
    train::EvalSummary s;
    s.accuracy = j.at("accuracy").get<double>();
    s.error = j.at("error").get<double>();
    s.dtpr = opt_from(j.at("dtpr"));
    s.dfpr = opt_from(j.at("dfpr"));
    s.dppv = opt_from(j.at("dppv"));
    s.dnpv = opt_from(j.at("dnpv"));
    // metrics/gaps blocks are emitted for consumers; aggregation needs the
    // scalar fields only, so they are not parsed back
    return s;
}

json axis_json(const RadarAxis& a) {
    return json{{"runs", a.runs},
                {"mean", a.mean},
                {"std", a.stddev},
                {"cov_with_error", a.cov_with_error}};
}

}  // namespace

json rate_set_json(const RateSet& r) {
    return json{{"tpr", opt(r.tpr)}, {"tnr", opt(r.tnr)}, {"fnr", opt(r.fnr)},
                {"fpr", opt(r.fpr)}, {"ppv", opt(r.ppv)}, {"npv", opt(r.npv)},
                {"fdr", opt(r.fdr)}, {"for", opt(r.for_)}};
}

json metrics_json(const GroupMetrics& m) {
    return json{{"group0", rate_set_json(m.group[0])},
                {"group1", rate_set_json(m.group[1])},
                {"marginal", rate_set_json(m.marginal)},
                {"rho0", opt(m.rho[0])},
                {"rho1", opt(m.rho[1])},
                {"rho_marginal", opt(m.rho_marginal)},
                {"accuracy", m.acc}};
}

json gaps_json(const FairnessGaps& g) {
    json sep = json::array(), suff = json::array();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int a = 0; a < 2; ++a) {
                sep.push_back(json{{"yhat", i}, {"y", j}, {"a", a}, {"gap", opt(g.sep[i][j][a])}});
                suff.push_back(json{{"y", i}, {"yhat", j}, {"a", a}, {"gap", opt(g.suff[i][j][a])}});
            }
    return json{{"sep", sep},
                {"suff", suff},
                {"sep_max", opt(g.sep_max)},
                {"suff_max", opt(g.suff_max)},
                {"sep_binary", opt(g.sep_binary)},
                {"suff_binary", opt(g.suff_binary)},
                {"deo", opt(g.deo)}};
}

json audit_report_json(const std::string& dataset_name, std::size_t n, const GroupMetrics& m,
                       double eps, double delta) {
    const FairnessGaps g = fairness_gaps(m);
    const BinaryDeltas b = binary_deltas(m);
    const approx::PredicateResult sep = approx::satisfies_eps_delta_separation(m, eps, delta);
    const approx::PredicateResult suff = approx::satisfies_eps_delta_sufficiency(m, eps, delta);
    return json{{"schema_version", kReportSchemaVersion},
                {"dataset", json{{"name", dataset_name}, {"n", n}}},
                {"metrics", metrics_json(m)},
                {"gaps", gaps_json(g)},
                {"deltas", json{{"dtpr", opt(b.dtpr)},
                                {"dfpr", opt(b.dfpr)},
                                {"dppv", opt(b.dppv)},
                                {"dnpv", opt(b.dnpv)}}},
                {"eps_delta",
                 json{{"eps", eps},
                      {"delta", delta},
                      {"separation",
                       json{{"satisfied", sep.satisfied}, {"all_defined", sep.all_defined}}},
                      {"sufficiency",
                       json{{"satisfied", suff.satisfied}, {"all_defined", suff.all_defined}}}}}};
}

json sweep_report_json(const approx::SweepReport& r) {
    json counterexamples = json::array();
    for (const auto& ce : r.counterexamples) {
        counterexamples.push_back(
            json{{"index", ce.index},
                 {"cells", ce.cells},
                 {"case1_margin", ce.verdict.case1_margin},
                 {"case2_margin", ce.verdict.case2_margin},
                 {"case3_margin", ce.verdict.case3_margin}});
    }
    return json{{"schema_version", kReportSchemaVersion},
                {"params", json{{"eps", r.params.epsilon},
                                {"delta", r.params.delta},
                                {"c", r.params.c},
                                {"k_multiplier", r.k_multiplier}}},
                {"sampler", json{{"grid_resolution", r.sampler.grid_resolution},
                                 {"mc_samples", r.sampler.mc_samples},
                                 {"seed", r.sampler.seed},
                                 {"threads", r.sampler.threads}}},
                {"n_evaluated", r.n_evaluated},
                {"n_premise_satisfying", r.n_premise_satisfying},
                {"n_counterexamples", r.n_counterexamples},
                {"counterexamples", counterexamples},
                {"minimal_sufficient_k", r.minimal_sufficient_k},
                {"no_premise_samples", r.no_premise_samples}};
}

json stats_json(const std::string& dataset_name, const data::DatasetStats& s) {
    return json{{"schema_version", kReportSchemaVersion},
                {"dataset", dataset_name},
                {"n", s.n},
                {"p_y0", s.p_y0},
                {"p_y1", s.p_y1},
                {"p_a0", s.p_a0},
                {"p_a1", s.p_a1},
                {"p_y1_given_a0", opt(s.p_y1_given_a0)},
                {"p_y1_given_a1", opt(s.p_y1_given_a1)},
                {"gamma0", opt(s.gamma0)},
                {"gamma1", opt(s.gamma1)}};
}

json run_record_json(const train::RunRecord& r) {
    json epochs = json::array();
    for (const auto& e : r.epochs)
        epochs.push_back(json{{"loss", e.loss},
                              {"accuracy", e.accuracy},
                              {"max_gap", e.max_gap},
                              {"lr", e.lr}});
    json j{{"schema_version", kReportSchemaVersion},
           {"config_hash", r.config_hash},
           {"seed", r.seed},
           {"fold", r.fold},
           {"objective", r.objective_label},
           {"epochs", epochs},
           {"validation", eval_summary_json(r.validation)},
           {"test", eval_summary_json(r.test)}};
    j["switch_epoch"] = r.switch_epoch ? json(*r.switch_epoch) : json(nullptr);
    return j;
}

train::RunRecord run_record_from_json(const json& j) {
    train::RunRecord r;
    r.config_hash = j.at("config_hash").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.fold = j.at("fold").get<int>();
    r.objective_label = j.at("objective").get<std::string>();
    if (!j.at("switch_epoch").is_null()) r.switch_epoch = j.at("switch_epoch").get<int>();
    for (const auto& e : j.at("epochs")) {
        train::EpochStats s;
        s.loss = e.at("loss").get<double>();
        s.accuracy = e.at("accuracy").get<double>();
        s.max_gap = e.at("max_gap").get<double>();
        s.lr = e.at("lr").get<double>();
        r.epochs.push_back(s);
    }
    r.validation = eval_summary_from(j.at("validation"));
    r.test = eval_summary_from(j.at("test"));
    return r;
}

void append_records_jsonl(const std::string& path,
                          const std::vector<train::RunRecord>& records) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw IngestError("cannot write " + path);
    for (const auto& r : records) out << run_record_json(r).dump() << '\n';
}

std::vector<train::RunRecord> load_records_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path);
    std::vector<train::RunRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(run_record_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw IngestError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

json radar_report_json(const RadarReport& r) {
    json entries = json::array();
    for (const auto& e : r.entries) {
        entries.push_back(json{{"objective", e.objective},
                               {"runs", e.runs},
                               {"mean_error", e.mean_error},
                               {"std_error", e.std_error},
                               {"dtpr", axis_json(e.dtpr)},
                               {"dfpr", axis_json(e.dfpr)},
                               {"dppv", axis_json(e.dppv)},
                               {"dnpv", axis_json(e.dnpv)}});
    }
    return json{{"schema_version", kReportSchemaVersion},
                {"entries", entries},
                {"warnings", r.warnings}};
}

json params_json(const nn::ParameterVector& p) {
    return json{{"schema_version", kReportSchemaVersion},
                {"input_dim", p.input_dim},
                {"hidden_dim", p.hidden_dim},
                {"values", p.values}};
}

nn::ParameterVector params_from_json(const json& j) {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion)
        throw InputError("parameter vector: unsupported schema version");
    nn::ParameterVector p;
    p.input_dim = j.at("input_dim").get<int>();
    p.hidden_dim = j.at("hidden_dim").get<int>();
    p.values = j.at("values").get<std::vector<double>>();
    const nn::ModelSpec spec{p.input_dim, p.hidden_dim, nn::Activation::relu, 0};
    if (p.values.size() != nn::param_count(spec))
        throw InputError("parameter vector: length does not match the shape header");
    return p;
}

std::string radar_report_csv(const RadarReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << "objective,runs,mean_error,std_error";
    for (const char* axis : {"dtpr", "dfpr", "dppv", "dnpv"})
        out << ',' << axis << "_mean," << axis << "_std," << axis << "_cov_ee," << axis
            << "_cov_ed," << axis << "_cov_dd";
    out << '\n';
    for (const auto& e : r.entries) {
        out << e.objective << ',' << e.runs << ',' << e.mean_error << ',' << e.std_error;
        for (const RadarAxis* ax : {&e.dtpr, &e.dfpr, &e.dppv, &e.dnpv})
            out << ',' << ax->mean << ',' << ax->stddev << ',' << ax->cov_with_error[0] << ','
                << ax->cov_with_error[1] << ',' << ax->cov_with_error[3];
        out << '\n';
    }
    return out.str();
}

}  // namespace fairgap::report
