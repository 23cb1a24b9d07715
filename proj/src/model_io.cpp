#include "persona/model_io.hpp"

#include <map>

#include "json.hpp"
#include "persona/error.hpp"

namespace persona {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view model_format_tag = "persona-model/1";

} // namespace

std::string emit_model(const ClusterModel& model, const CategoricalDataset& dataset, std::string_view schema) {
    if (model.assignments.size() != dataset.n()) {
        throw AlignmentError("model assignments do not match the dataset rows");
    }
    const auto& config = model.config;
    ordered_json doc;
    doc["format"] = model_format_tag;
    doc["schema"] = schema;

    ordered_json policy;
    policy["mode"] = to_string(config.policy.mode);
    policy["gamma"] = config.policy.gamma_mode == GammaMode::automatic ? ordered_json("auto")
                                                                       : ordered_json(config.policy.gamma_value);
    ordered_json echo;
    echo["k"] = config.k;
    echo["policy"] = std::move(policy);
    echo["init"] = to_string(config.init);
    echo["seed"] = config.seed;
    echo["max_epochs"] = config.max_epochs;
    echo["restarts"] = config.restarts;
    doc["config"] = std::move(echo);

    doc["attributes"] = ordered_json::array();
    for (const auto& attr : dataset.attrs) {
        doc["attributes"].push_back(attr.name);
    }
    doc["modes"] = ordered_json::array();
    for (const auto& mode : model.modes) {
        doc["modes"].push_back(mode.values);
    }
    doc["assignments"] = ordered_json::array();
    for (std::size_t i = 0; i < dataset.n(); ++i) {
        doc["assignments"].push_back({{"row_id", dataset.rows[i].row_id}, {"cluster", model.assignments[i]}});
    }
    doc["cost"] = model.cost;
    doc["epochs_run"] = model.epochs_run;
    doc["converged"] = model.converged;
    return doc.dump(2) + "\n";
}

ModelDocument parse_model(std::string_view document) {
    ModelDocument out;
    try {
        const auto doc = ordered_json::parse(document);
        if (doc.at("format").get<std::string>() != model_format_tag) {
            throw InputError("unsupported model format");
        }
        out.schema = doc.at("schema").get<std::string>();
        const auto& echo = doc.at("config");
        auto& config = out.model.config;
        config.k = echo.at("k").get<std::size_t>();
        config.policy.mode = parse_dissimilarity_mode(echo.at("policy").at("mode").get<std::string>());
        const auto& gamma = echo.at("policy").at("gamma");
        if (gamma.is_string()) {
            if (gamma.get<std::string>() != "auto") {
                throw InputError("model gamma must be \"auto\" or a number");
            }
            config.policy.gamma_mode = GammaMode::automatic;
        } else {
            config.policy.gamma_mode = GammaMode::fixed;
            config.policy.gamma_value = gamma.get<double>();
        }
        config.init = parse_init_strategy(echo.at("init").get<std::string>());
        config.seed = echo.at("seed").get<std::uint64_t>();
        config.max_epochs = echo.at("max_epochs").get<std::size_t>();
        config.restarts = echo.at("restarts").get<std::size_t>();

        out.attributes = doc.at("attributes").get<std::vector<std::string>>();
        const auto& modes = doc.at("modes");
        for (std::size_t l = 0; l < modes.size(); ++l) {
            out.model.modes.push_back({modes[l].get<std::vector<double>>(), l});
        }
        for (const auto& entry : doc.at("assignments")) {
            out.row_ids.push_back(entry.at("row_id").get<std::string>());
            const auto cluster = entry.at("cluster").get<std::size_t>();
            if (cluster >= out.model.modes.size()) {
                throw InputError("model assignment refers to cluster " + std::to_string(cluster));
            }
            out.model.assignments.push_back(cluster);
        }
        out.model.cost = doc.at("cost").get<double>();
        out.model.epochs_run = doc.at("epochs_run").get<std::size_t>();
        out.model.converged = doc.at("converged").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed model document: ") + e.what());
    }
    if (out.model.modes.size() != out.model.config.k) {
        throw InputError("model holds " + std::to_string(out.model.modes.size()) + " modes for k = " +
                         std::to_string(out.model.config.k));
    }
    return out;
}

ClusterModel align_model(const ModelDocument& document, const CategoricalDataset& dataset) {
    if (document.attributes.size() != dataset.m()) {
        throw InputError("model attributes do not match the data columns");
    }
    for (std::size_t j = 0; j < dataset.m(); ++j) {
        if (document.attributes[j] != dataset.attrs[j].name) {
            throw InputError("model attribute '" + document.attributes[j] + "' does not match column '" +
                             dataset.attrs[j].name + "'");
        }
    }
    if (document.row_ids.size() != dataset.n()) {
        throw InputError("model covers " + std::to_string(document.row_ids.size()) + " rows, data has " +
                         std::to_string(dataset.n()));
    }
    std::map<std::string, std::size_t> cluster_of;
    for (std::size_t i = 0; i < document.row_ids.size(); ++i) {
        cluster_of.emplace(document.row_ids[i], document.model.assignments[i]);
    }
    ClusterModel model = document.model;
    for (std::size_t i = 0; i < dataset.n(); ++i) {
        auto it = cluster_of.find(dataset.rows[i].row_id);
        if (it == cluster_of.end()) {
            throw InputError("row '" + dataset.rows[i].row_id + "' is not covered by the model");
        }
        model.assignments[i] = it->second;
    }
    return model;
}

} // namespace persona
