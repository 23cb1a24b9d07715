#include "persona/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "persona/error.hpp"
#include "persona/kmodes.hpp"
#include "persona/model_io.hpp"
#include "persona/report.hpp"
#include "persona/survey.hpp"

namespace persona::cli {

namespace {

struct DataOptions {
    std::string schema;
    std::string input = "-";
    std::string delimiter = ",";
    std::string missing = "drop";
};

struct FitOptions {
    std::size_t k = 0;
    std::string policy = "simple";
    std::string gamma = "auto";
    std::string init = "random_rows";
    std::uint64_t seed = 0;
    std::size_t restarts = 1;
    std::size_t max_epochs = 100;
};

struct Options {
    DataOptions data;
    FitOptions fit;
    std::size_t k_min = 1;
    std::size_t k_max = 0;
    double epsilon = 0.05;
    std::string format;
    std::string aggregate = "share";
    std::string model_path;
    bool labels = false;
    std::vector<std::string> fuse_inputs;
    double fuse_weight = 0.5;
    std::size_t gen_n = 0;
    std::string mixture = "uniform";
    double noise = 0.0;
    std::string schema_target;
    bool list_presets = false;
    std::string output;
};

char parse_delimiter(const std::string& text) {
    if (text == "tab" || text == "\\t" || text == "\t") {
        return '\t';
    }
    if (text.size() != 1) {
        throw InputError("delimiter must be a single character or 'tab'");
    }
    return text.front();
}

MissingPolicy parse_missing(const std::string& text) {
    if (text == "drop") {
        return MissingPolicy::drop_row;
    }
    if (text == "impute") {
        return MissingPolicy::impute_mode;
    }
    throw InputError("--missing must be drop or impute");
}

DissimilarityPolicy parse_policy(const FitOptions& options) {
    DissimilarityPolicy policy;
    policy.mode = parse_dissimilarity_mode(options.policy);
    if (options.gamma == "auto") {
        policy.gamma_mode = GammaMode::automatic;
    } else {
        policy.gamma_mode = GammaMode::fixed;
        std::size_t used = 0;
        try {
            policy.gamma_value = std::stod(options.gamma, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != options.gamma.size()) {
            throw InputError("--gamma must be 'auto' or a non-negative number");
        }
    }
    policy.validate();
    return policy;
}

FitConfig make_config(const FitOptions& options) {
    FitConfig config;
    config.k = options.k;
    config.policy = parse_policy(options);
    config.init = parse_init_strategy(options.init);
    config.seed = options.seed;
    config.restarts = options.restarts;
    config.max_epochs = options.max_epochs;
    if (config.restarts == 0 || config.max_epochs == 0) {
        throw InputError("--restarts and --max-epochs must be at least 1");
    }
    return config;
}

std::string read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw InputError("cannot read '" + path + "'");
    }
    std::ostringstream text;
    text << file.rdbuf();
    return text.str();
}

ParsedResponses load_responses(const DataOptions& options, const SurveySchema& schema, std::istream& in,
                               std::ostream& err) {
    const char delimiter = parse_delimiter(options.delimiter);
    const MissingPolicy missing = parse_missing(options.missing);
    ParsedResponses parsed;
    if (options.input == "-") {
        parsed = parse_responses(in, schema, delimiter, missing);
    } else {
        std::ifstream file(options.input, std::ios::binary);
        if (!file) {
            throw InputError("cannot read '" + options.input + "'");
        }
        parsed = parse_responses(file, schema, delimiter, missing);
    }
    if (const char* verbose = std::getenv("PERSONA_VERBOSE"); verbose != nullptr && *verbose != '\0') {
        err << "rows read " << parsed.report.rows_read << ", kept " << parsed.report.rows_kept
                  << ", dropped " << parsed.report.rows_dropped << ", imputed cells "
                  << parsed.report.cells_imputed << '\n';
    }
    if (parsed.dataset.n() == 0) {
        throw InputError("no complete responses to work with");
    }
    return parsed;
}

std::vector<double> parse_mixture(const std::string& text, std::size_t dimensions) {
    if (text == "uniform") {
        return std::vector<double>(dimensions, 1.0 / static_cast<double>(dimensions));
    }
    std::vector<double> weights;
    std::stringstream stream(text);
    std::string part;
    while (std::getline(stream, part, ',')) {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != part.size()) {
            throw InputError("--mixture must be 'uniform' or comma-separated weights");
        }
        weights.push_back(value);
    }
    return weights;
}

std::string emit_elbow(const std::vector<ElbowPoint>& curve, std::size_t selected, double epsilon,
                       ReportFormat format) {
    if (format == ReportFormat::json) {
        nlohmann::ordered_json doc;
        doc["curve"] = nlohmann::ordered_json::array();
        for (const auto& point : curve) {
            doc["curve"].push_back({{"k", point.k}, {"wcd", point.wcd}});
        }
        doc["epsilon"] = epsilon;
        doc["selected_k"] = selected;
        return doc.dump(2) + "\n";
    }
    if (format == ReportFormat::piedata) {
        throw InputError("elbow output supports json and text");
    }
    std::string out = "k\twcd\n";
    for (const auto& point : curve) {
        out += std::to_string(point.k) + "\t" + format_fixed3(point.wcd) + "\n";
    }
    out += "selected_k\t" + std::to_string(selected) + "\n";
    return out;
}

std::string emit_scores(const ResponseTable& table, const std::vector<TraitProfile>& profiles,
                        const SurveySchema& schema, ReportFormat format) {
    if (format == ReportFormat::json) {
        nlohmann::ordered_json doc = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < profiles.size(); ++i) {
            nlohmann::ordered_json raw;
            nlohmann::ordered_json percent;
            for (std::size_t d = 0; d < schema.dimensions.size(); ++d) {
                raw[schema.dimensions[d]] = profiles[i].raw[d];
                percent[schema.dimensions[d]] = profiles[i].percent[d];
            }
            doc.push_back({{"id", table.ids[i]}, {"raw", raw}, {"percent", percent}});
        }
        return doc.dump(2) + "\n";
    }
    if (format == ReportFormat::piedata) {
        throw InputError("score output supports json and text");
    }
    std::string out = "id";
    for (const auto& dim : schema.dimensions) {
        out += "\t" + dim + "_raw\t" + dim + "_pct";
    }
    out += "\n";
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        out += table.ids[i];
        for (std::size_t d = 0; d < schema.dimensions.size(); ++d) {
            out += "\t" + format_fixed3(profiles[i].raw[d]) + "\t" + format_fixed3(profiles[i].percent[d]);
        }
        out += "\n";
    }
    return out;
}

void add_data_options(CLI::App* command, DataOptions& data) {
    command->add_option("input", data.input, "Response file ('-' for standard input)");
    command->add_option("--schema", data.schema, "Preset name or schema document path")->required();
    command->add_option("--delimiter", data.delimiter, "Field delimiter (a character or 'tab')");
    command->add_option("--missing", data.missing, "drop | impute");
}

void add_fit_options(CLI::App* command, FitOptions& fit) {
    command->add_option("--policy", fit.policy, "simple | weighted | mixed");
    command->add_option("--gamma", fit.gamma, "auto | <non-negative value> (mixed policy)");
    command->add_option("--init", fit.init, "random_rows | density");
    command->add_option("--seed", fit.seed, "Random seed");
    command->add_option("--restarts", fit.restarts, "Independent restarts; the lowest cost wins");
    command->add_option("--max-epochs", fit.max_epochs, "Reallocation sweep limit");
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"k-modes clustering and personality survey reports", "persona"};
    app.require_subcommand(1);

    auto* fit_cmd = app.add_subcommand("fit", "Cluster survey responses and write the model document");
    add_data_options(fit_cmd, opt.data);
    add_fit_options(fit_cmd, opt.fit);
    fit_cmd->add_option("--k", opt.fit.k, "Cluster count")->required();

    auto* elbow_cmd = app.add_subcommand("elbow", "Within-cluster difference over a k range and the elbow k");
    add_data_options(elbow_cmd, opt.data);
    add_fit_options(elbow_cmd, opt.fit);
    elbow_cmd->add_option("--k-min", opt.k_min, "Smallest k");
    elbow_cmd->add_option("--k-max", opt.k_max, "Largest k")->required();
    elbow_cmd->add_option("--epsilon", opt.epsilon, "Relative improvement threshold");
    elbow_cmd->add_option("--format", opt.format, "text | json");

    auto* score_cmd = app.add_subcommand("score", "Per-respondent trait scores");
    add_data_options(score_cmd, opt.data);
    score_cmd->add_option("--format", opt.format, "text | json");

    auto* report_cmd = app.add_subcommand("report", "Cluster, label and report personality percentages");
    add_data_options(report_cmd, opt.data);
    add_fit_options(report_cmd, opt.fit);
    report_cmd->add_option("--k", opt.fit.k, "Cluster count (unless --model is given)");
    report_cmd->add_option("--model", opt.model_path, "Reuse a model document written by fit");
    report_cmd->add_option("--format", opt.format, "json | text | piedata");
    report_cmd->add_option("--aggregate", opt.aggregate, "share | mean");
    report_cmd->add_flag("--labels", opt.labels, "Emit the per-cluster labelling instead");

    auto* fuse_cmd = app.add_subcommand("fuse", "Convex combination of two report documents");
    fuse_cmd->add_option("reports", opt.fuse_inputs, "Two report documents")->required()->expected(2);
    fuse_cmd->add_option("--w", opt.fuse_weight, "Weight of the first report");
    fuse_cmd->add_option("--format", opt.format, "json | text | piedata");

    auto* gen_cmd = app.add_subcommand("gen", "Synthetic survey responses");
    gen_cmd->add_option("--schema", opt.data.schema, "Preset name or schema document path")->required();
    gen_cmd->add_option("--n", opt.gen_n, "Respondent count")->required();
    gen_cmd->add_option("--mixture", opt.mixture, "uniform | comma-separated weights per dimension");
    gen_cmd->add_option("--noise", opt.noise, "Probability of replacing an answer at random");
    gen_cmd->add_option("--seed", opt.fit.seed, "Random seed");
    gen_cmd->add_option("--delimiter", opt.data.delimiter, "Field delimiter (a character or 'tab')");

    auto* schema_cmd = app.add_subcommand("schema", "Validate a schema and print its canonical document");
    schema_cmd->add_option("schema", opt.schema_target, "Preset name or schema document path");
    schema_cmd->add_flag("--list", opt.list_presets, "List the built-in presets");

    for (auto* command : {fit_cmd, elbow_cmd, score_cmd, report_cmd, fuse_cmd, gen_cmd, schema_cmd}) {
        command->add_option("-o,--output", opt.output, "Write the result to a file instead of standard output");
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "persona: " << e.what() << '\n';
        return input_error;
    }

    std::string result;
    try {
        if (*fit_cmd) {
            const FitConfig config = make_config(opt.fit);
            const auto schema = resolve_schema(opt.data.schema);
            const auto parsed = load_responses(opt.data, schema, in, err);
            const auto model = fit(parsed.dataset, config);
            result = emit_model(model, parsed.dataset, schema.name);
        } else if (*elbow_cmd) {
            const FitConfig config = make_config(opt.fit);
            const auto format = parse_report_format(opt.format.empty() ? "text" : opt.format);
            if (!(opt.epsilon > 0.0 && opt.epsilon < 1.0)) {
                throw InputError("--epsilon must lie in (0, 1)");
            }
            const auto schema = resolve_schema(opt.data.schema);
            const auto parsed = load_responses(opt.data, schema, in, err);
            const auto curve = elbow_scan(parsed.dataset, opt.k_min, opt.k_max, config.policy, config.seed,
                                          config.restarts, config.init);
            const std::size_t selected = curve.size() >= 2 ? select_k(curve, opt.epsilon) : curve.front().k;
            result = emit_elbow(curve, selected, opt.epsilon, format);
        } else if (*score_cmd) {
            const auto format = parse_report_format(opt.format.empty() ? "text" : opt.format);
            if (format == ReportFormat::piedata) {
                throw InputError("score output supports json and text");
            }
            const auto schema = resolve_schema(opt.data.schema);
            const auto parsed = load_responses(opt.data, schema, in, err);
            result = emit_scores(parsed.table, score_table(parsed.table, schema), schema, format);
        } else if (*report_cmd) {
            const auto format = parse_report_format(opt.format.empty() ? "json" : opt.format);
            if (opt.aggregate != "share" && opt.aggregate != "mean") {
                throw InputError("--aggregate must be share or mean");
            }
            const bool reuse = !opt.model_path.empty();
            if (!reuse && opt.fit.k == 0) {
                throw InputError("report needs --k or --model");
            }
            const FitConfig config = reuse ? FitConfig{} : make_config(opt.fit);
            const auto schema = resolve_schema(opt.data.schema);
            const auto model_text = reuse ? read_file(opt.model_path) : std::string();
            const auto parsed = load_responses(opt.data, schema, in, err);
            const ClusterModel model =
                reuse ? align_model(parse_model(model_text), parsed.dataset) : fit(parsed.dataset, config);
            const auto profiles = score_table(parsed.table, schema);
            const auto labeling = label_clusters(model, profiles, schema);
            if (opt.labels) {
                result = emit_labeling(labeling, format);
            } else {
                PercentReport report = opt.aggregate == "mean" ? mean_percentages(profiles, schema)
                                                               : personality_percentages(labeling);
                report.metadata.k = model.config.k;
                report.metadata.seed = model.config.seed;
                report.metadata.policy = to_string(model.config.policy.mode);
                report.metadata.schema = schema.name;
                result = emit_report(report, format);
            }
        } else if (*fuse_cmd) {
            const auto format = parse_report_format(opt.format.empty() ? "json" : opt.format);
            const auto a = parse_report(read_file(opt.fuse_inputs.at(0)));
            const auto b = parse_report(read_file(opt.fuse_inputs.at(1)));
            result = emit_report(fuse_profiles(a, b, opt.fuse_weight), format);
        } else if (*gen_cmd) {
            const char delimiter = parse_delimiter(opt.data.delimiter);
            const auto schema = resolve_schema(opt.data.schema);
            const auto mixture = parse_mixture(opt.mixture, schema.dimensions.size());
            const auto sample = generate_synthetic(opt.gen_n, schema, mixture, opt.fit.seed, opt.noise);
            result = write_responses(sample.table, delimiter);
        } else if (*schema_cmd) {
            if (opt.list_presets) {
                for (const auto& name : preset_names()) {
                    result += name + "\n";
                }
            } else if (opt.schema_target.empty()) {
                throw InputError("schema needs a preset name, a path, or --list");
            } else {
                result = emit_schema(resolve_schema(opt.schema_target));
            }
        }
    } catch (const InfeasibleError& e) {
        err << "persona: infeasible configuration: " << e.what() << '\n';
        return infeasible;
    } catch (const Error& e) {
        err << "persona: " << e.what() << '\n';
        return input_error;
    }

    if (opt.output.empty()) {
        out << result;
        return ok;
    }
    std::ofstream file(opt.output, std::ios::binary);
    if (!file || !(file << result)) {
        err << "persona: cannot write '" << opt.output << "'\n";
        return input_error;
    }
    return ok;
}

} // namespace persona::cli
