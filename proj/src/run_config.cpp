#include "fairgap/run_config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "fairgap/errors.hpp"
#include "fairgap/fixtures.hpp"

namespace fairgap::config {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& why) {
    throw InputError("run config: " + where + ": " + why);
}

const json& need(const json& j, const char* key, const std::string& where) {
    const auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing key '") + key + "'");
    return *it;
}

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) fail(where, "unknown key '" + key + "'");
}

DatasetSource parse_dataset(const json& j) {
    DatasetSource src;
    const std::string kind = need(j, "kind", "dataset").get<std::string>();
    if (kind == "csv") {
        src.kind = DatasetSource::Kind::csv;
        reject_unknown(j, {"kind", "path", "schema"}, "dataset");
        src.path = need(j, "path", "dataset").get<std::string>();
        const json& js = need(j, "schema", "dataset");
        reject_unknown(js, {"label", "group", "features", "delimiter"}, "dataset.schema");
        src.schema.label_column = need(js, "label", "dataset.schema").get<std::string>();
        src.schema.group_column = need(js, "group", "dataset.schema").get<std::string>();
        if (js.contains("delimiter")) {
            const std::string d = js.at("delimiter").get<std::string>();
            if (d.size() != 1) fail("dataset.schema.delimiter", "must be one character");
            src.schema.delimiter = d[0];
        }
        for (const json& f : need(js, "features", "dataset.schema")) {
            reject_unknown(f, {"name", "type"}, "dataset.schema.features[]");
            data::ColumnSpec col;
            col.name = need(f, "name", "feature column").get<std::string>();
            const std::string type = need(f, "type", "feature column").get<std::string>();
            if (type == "numeric")
                col.type = data::ColumnType::numeric;
            else if (type == "categorical")
                col.type = data::ColumnType::categorical;
            else
                fail("dataset.schema.features[].type", "must be numeric or categorical");
            src.schema.feature_columns.push_back(std::move(col));
        }
        if (src.schema.feature_columns.empty())
            fail("dataset.schema.features", "at least one feature column required");
    } else if (kind == "compas_fixture" || kind == "nels_fixture") {
        src.kind = kind == "compas_fixture" ? DatasetSource::Kind::compas_fixture
                                            : DatasetSource::Kind::nels_fixture;
        reject_unknown(j, {"kind", "path"}, "dataset");
        src.path = need(j, "path", "dataset").get<std::string>();
    } else if (kind == "synthetic_colormnist") {
        src.kind = DatasetSource::Kind::synthetic_colormnist;
        reject_unknown(j, {"kind", "n", "flip_prob", "feature_dim", "noise_scale", "seed"},
                       "dataset");
        src.n = need(j, "n", "dataset").get<std::size_t>();
        if (j.contains("flip_prob")) src.flip_prob = j.at("flip_prob").get<double>();
        if (j.contains("feature_dim")) src.feature_dim = j.at("feature_dim").get<int>();
        if (j.contains("noise_scale")) src.noise_scale = j.at("noise_scale").get<double>();
        if (j.contains("seed")) src.seed = j.at("seed").get<std::uint64_t>();
    } else {
        fail("dataset.kind", "unknown kind '" + kind + "'");
    }
    return src;
}

soft::ObjectiveSpec parse_objective(const json& j) {
    reject_unknown(j, {"kind", "lambda", "class_imbalance_weight"}, "objectives[]");
    soft::ObjectiveSpec spec;
    spec.kind = soft::objective_kind_from_string(need(j, "kind", "objectives[]").get<std::string>());
    if (j.contains("lambda")) spec.lambda = j.at("lambda").get<double>();
    if (j.contains("class_imbalance_weight"))
        spec.class_imbalance_weight = j.at("class_imbalance_weight").get<double>();
    return spec;
}

}  // namespace

RunConfig parse_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("run config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError(std::string("run config: invalid JSON: ") + e.what());
    }

    reject_unknown(j,
                   {"schema_version", "name", "preset", "dataset", "split", "model",
                    "objectives", "trainer", "n_seeds", "output"},
                   "top level");
    if (need(j, "schema_version", "top level").get<int>() != 1)
        fail("schema_version", "expected 1");

    RunConfig rc;
    rc.name = need(j, "name", "top level").get<std::string>();
    if (j.contains("preset")) rc.preset = j.at("preset").get<bool>();
    rc.dataset = parse_dataset(need(j, "dataset", "top level"));

    const json& split = need(j, "split", "top level");
    reject_unknown(split, {"k", "seed"}, "split");
    rc.split_k = need(split, "k", "split").get<int>();
    rc.split_seed = need(split, "seed", "split").get<std::uint64_t>();
    if (rc.split_k < 2) fail("split.k", "must be >= 2");

    const json& model = need(j, "model", "top level");
    reject_unknown(model, {"hidden_dim", "activation", "seed"}, "model");
    nn::ModelSpec spec;
    spec.hidden_dim = need(model, "hidden_dim", "model").get<int>();
    if (model.contains("activation"))
        spec.activation = nn::activation_from_string(model.at("activation").get<std::string>());
    if (spec.hidden_dim < 0) fail("model.hidden_dim", "must be >= 0");

    const json& trainer = need(j, "trainer", "top level");
    reject_unknown(trainer,
                   {"epochs", "batch_size", "learning_rate", "scheduler_gamma",
                    "scheduler_step", "weight_decay", "seed", "finetune"},
                   "trainer");
    train::TrainConfig base;
    base.model = spec;
    base.epochs = need(trainer, "epochs", "trainer").get<int>();
    if (trainer.contains("batch_size")) base.batch_size = trainer.at("batch_size").get<int>();
    base.learning_rate = need(trainer, "learning_rate", "trainer").get<double>();
    if (trainer.contains("scheduler_gamma"))
        base.scheduler_gamma = trainer.at("scheduler_gamma").get<double>();
    if (trainer.contains("scheduler_step"))
        base.scheduler_step = trainer.at("scheduler_step").get<int>();
    if (trainer.contains("weight_decay"))
        base.weight_decay = trainer.at("weight_decay").get<double>();
    if (trainer.contains("seed")) base.seed = trainer.at("seed").get<std::uint64_t>();
    if (trainer.contains("finetune")) {
        const json& ft = trainer.at("finetune");
        reject_unknown(ft, {"switch_epoch", "lr", "gamma", "objective"}, "trainer.finetune");
        train::FinetuneConfig f;
        f.switch_epoch = need(ft, "switch_epoch", "trainer.finetune").get<int>();
        f.finetune_lr = need(ft, "lr", "trainer.finetune").get<double>();
        f.finetune_gamma = need(ft, "gamma", "trainer.finetune").get<double>();
        f.finetune_objective = soft::objective_kind_from_string(
            need(ft, "objective", "trainer.finetune").get<std::string>());
        base.finetune = f;
    }

    const json& objectives = need(j, "objectives", "top level");
    if (!objectives.is_array() || objectives.empty())
        fail("objectives", "must be a nonempty array");
    for (const json& o : objectives) {
        train::TrainConfig cfg = base;
        cfg.objective = parse_objective(o);
        rc.configs.push_back(std::move(cfg));
    }

    if (j.contains("n_seeds")) rc.n_seeds = j.at("n_seeds").get<int>();
    if (rc.n_seeds < 1) fail("n_seeds", "must be >= 1");
    if (j.contains("output")) rc.output = j.at("output").get<std::string>();

    // defer model/trainer numeric validation to TrainConfig (input_dim is
    // filled from the data later); validate everything that can be checked now
    for (const auto& cfg : rc.configs) {
        train::TrainConfig probe = cfg;
        probe.model.input_dim = 1;
        probe.validate();
        if (rc.preset && !probe.within_grid_bounds())
            fail("trainer", "preset config violates the published hyperparameter grid bounds");
    }
    return rc;
}

data::Dataset load_dataset(const DatasetSource& src) {
    switch (src.kind) {
        case DatasetSource::Kind::csv:
            return data::load_csv(src.path, src.schema);
        case DatasetSource::Kind::compas_fixture:
            return data::load_csv(src.path, data::compas_schema());
        case DatasetSource::Kind::nels_fixture:
            return data::load_csv(src.path, data::nels_schema());
        case DatasetSource::Kind::synthetic_colormnist:
            return data::generate_colormnist_tabular(src.n, src.flip_prob, src.feature_dim,
                                                     src.noise_scale, src.seed);
    }
    throw InputError("load_dataset: unknown kind");
}

}  // namespace fairgap::config
