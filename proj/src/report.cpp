#include "persona/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "persona/error.hpp"

namespace persona {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view report_format_tag = "persona-report/1";

std::size_t argmax_first(const std::vector<double>& values) {
    std::size_t best = 0;
    for (std::size_t d = 1; d < values.size(); ++d) {
        if (values[d] > values[best]) {
            best = d;
        }
    }
    return best;
}

Provenance parse_provenance(const std::string& text) {
    if (text == "questionnaire") {
        return Provenance::questionnaire;
    }
    if (text == "external") {
        return Provenance::external;
    }
    if (text == "fused") {
        return Provenance::fused;
    }
    throw InputError("unknown provenance '" + text + "'");
}

std::string pad_right(const std::string& text, std::size_t width) {
    return text.size() >= width ? text : text + std::string(width - text.size(), ' ');
}

std::string pad_left(const std::string& text, std::size_t width) {
    return text.size() >= width ? text : std::string(width - text.size(), ' ') + text;
}

std::size_t label_width(const std::vector<std::string>& labels, std::size_t minimum) {
    std::size_t width = minimum;
    for (const auto& label : labels) {
        width = std::max(width, label.size());
    }
    return width;
}

} // namespace

std::size_t ClusterLabeling::total() const {
    std::size_t n = 0;
    for (const auto& cluster : clusters) {
        n += cluster.size;
    }
    return n;
}

const char* to_string(Provenance provenance) {
    switch (provenance) {
    case Provenance::questionnaire:
        return "questionnaire";
    case Provenance::external:
        return "external";
    case Provenance::fused:
        return "fused";
    }
    return "questionnaire";
}

void PercentReport::validate() const {
    if (dimensions.empty() || dimensions.size() != percent.size()) {
        throw InputError("report must carry one percentage per dimension");
    }
    double total = 0.0;
    for (std::size_t d = 0; d < percent.size(); ++d) {
        if (!std::isfinite(percent[d]) || percent[d] < 0.0 || percent[d] > 100.0) {
            throw InputError("percentage for '" + dimensions[d] + "' outside [0, 100]");
        }
        total += percent[d];
    }
    if (std::abs(total - 100.0) > 1e-9) {
        throw InputError("report percentages sum to " + std::to_string(total) + ", not 100");
    }
}

ClusterLabeling label_clusters(const ClusterModel& model, const std::vector<TraitProfile>& profiles,
                               const SurveySchema& schema) {
    if (profiles.size() != model.assignments.size()) {
        throw AlignmentError("got " + std::to_string(profiles.size()) + " profiles for " +
                             std::to_string(model.assignments.size()) + " assigned rows");
    }
    const std::size_t dims = schema.dimensions.size();
    ClusterLabeling labeling;
    labeling.dimensions = schema.dimensions;
    labeling.clusters.assign(model.modes.size(), ClusterLabel{0, std::vector<double>(dims, 0.0), 0});
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        if (profiles[i].percent.size() != dims) {
            throw AlignmentError("profile " + std::to_string(i) + " does not match the schema dimensions");
        }
        auto& cluster = labeling.clusters.at(model.assignments[i]);
        ++cluster.size;
        for (std::size_t d = 0; d < dims; ++d) {
            cluster.mean_percent[d] += profiles[i].percent[d];
        }
    }
    for (auto& cluster : labeling.clusters) {
        if (cluster.size == 0) {
            throw EmptyClusterError("cannot label an empty cluster");
        }
        for (auto& value : cluster.mean_percent) {
            value /= static_cast<double>(cluster.size);
        }
        cluster.dominant = argmax_first(cluster.mean_percent);
    }
    return labeling;
}

PercentReport personality_percentages(const ClusterLabeling& labeling) {
    const std::size_t n = labeling.total();
    if (n == 0) {
        throw InputError("labeling has no members");
    }
    PercentReport report;
    report.dimensions = labeling.dimensions;
    std::vector<std::size_t> members(labeling.dimensions.size(), 0);
    for (const auto& cluster : labeling.clusters) {
        members.at(cluster.dominant) += cluster.size;
    }
    for (std::size_t count : members) {
        report.percent.push_back(100.0 * static_cast<double>(count) / static_cast<double>(n));
    }
    report.metadata.aggregate = "share";
    return report;
}

PercentReport mean_percentages(const std::vector<TraitProfile>& profiles, const SurveySchema& schema) {
    if (profiles.empty()) {
        throw InputError("no profiles to average");
    }
    PercentReport report;
    report.dimensions = schema.dimensions;
    report.percent.assign(schema.dimensions.size(), 0.0);
    for (const auto& profile : profiles) {
        if (profile.percent.size() != report.percent.size()) {
            throw AlignmentError("profile does not match the schema dimensions");
        }
        for (std::size_t d = 0; d < report.percent.size(); ++d) {
            report.percent[d] += profile.percent[d];
        }
    }
    for (auto& value : report.percent) {
        value /= static_cast<double>(profiles.size());
    }
    report.metadata.aggregate = "mean";
    return report;
}

PercentReport fuse_profiles(const PercentReport& a, const PercentReport& b, double w) {
    if (!(w >= 0.0 && w <= 1.0)) {
        throw InputError("fusion weight must lie in [0, 1]");
    }
    if (a.dimensions != b.dimensions) {
        throw InputError("cannot fuse reports over different dimensions");
    }
    if (a.percent.size() != a.dimensions.size() || b.percent.size() != b.dimensions.size()) {
        throw InputError("report must carry one percentage per dimension");
    }
    PercentReport out;
    out.dimensions = a.dimensions;
    out.provenance = Provenance::fused;
    for (std::size_t d = 0; d < a.percent.size(); ++d) {
        const double x = a.percent[d];
        const double y = b.percent[d];
        // Equal inputs and boundary weights are reproduced exactly.
        if (x == y || w == 1.0) {
            out.percent.push_back(x);
        } else if (w == 0.0) {
            out.percent.push_back(y);
        } else {
            out.percent.push_back(std::clamp(w * x + (1.0 - w) * y, std::min(x, y), std::max(x, y)));
        }
    }
    if (a.metadata.schema == b.metadata.schema) {
        out.metadata.schema = a.metadata.schema;
    }
    out.metadata.aggregate = "fused";
    return out;
}

ReportFormat parse_report_format(std::string_view text) {
    if (text == "json") {
        return ReportFormat::json;
    }
    if (text == "text") {
        return ReportFormat::text;
    }
    if (text == "piedata") {
        return ReportFormat::piedata;
    }
    throw InputError("unknown output format '" + std::string(text) + "'");
}

std::string format_fixed3(double value) {
    // to_chars with a precision rounds the exact binary value; exact ties go to even.
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::fixed, 3);
    std::string text(buffer, result.ptr);
    if (text == "-0.000") {
        text = "0.000";
    }
    return text;
}

std::string emit_report(const PercentReport& report, ReportFormat format) {
    report.validate();
    switch (format) {
    case ReportFormat::json: {
        ordered_json doc;
        doc["format"] = report_format_tag;
        doc["provenance"] = to_string(report.provenance);
        doc["dimensions"] = ordered_json::array();
        for (std::size_t d = 0; d < report.dimensions.size(); ++d) {
            ordered_json entry;
            entry["name"] = report.dimensions[d];
            entry["percent"] = report.percent[d];
            doc["dimensions"].push_back(std::move(entry));
        }
        ordered_json meta;
        meta["k"] = report.metadata.k ? ordered_json(*report.metadata.k) : ordered_json(nullptr);
        meta["seed"] = report.metadata.seed ? ordered_json(*report.metadata.seed) : ordered_json(nullptr);
        meta["policy"] = report.metadata.policy;
        meta["schema"] = report.metadata.schema;
        meta["aggregate"] = report.metadata.aggregate;
        doc["metadata"] = std::move(meta);
        return doc.dump(2) + "\n";
    }
    case ReportFormat::text: {
        const std::size_t width = label_width(report.dimensions, 9);
        std::ostringstream out;
        out << pad_right("dimension", width) << "  " << pad_left("percent", 7) << '\n';
        for (std::size_t d = 0; d < report.dimensions.size(); ++d) {
            out << pad_right(report.dimensions[d], width) << "  " << pad_left(format_fixed3(report.percent[d]), 7)
                << '\n';
        }
        out << "provenance: " << to_string(report.provenance) << '\n';
        if (!report.metadata.schema.empty()) {
            out << "schema: " << report.metadata.schema << '\n';
        }
        if (report.metadata.k) {
            out << "k: " << *report.metadata.k << '\n';
        }
        if (report.metadata.seed) {
            out << "seed: " << *report.metadata.seed << '\n';
        }
        if (!report.metadata.policy.empty()) {
            out << "policy: " << report.metadata.policy << '\n';
        }
        if (!report.metadata.aggregate.empty()) {
            out << "aggregate: " << report.metadata.aggregate << '\n';
        }
        return out.str();
    }
    case ReportFormat::piedata: {
        std::string out = "dimension,percentage\n";
        for (std::size_t d = 0; d < report.dimensions.size(); ++d) {
            out += report.dimensions[d] + "," + format_fixed3(report.percent[d]) + "\n";
        }
        return out;
    }
    }
    throw InputError("unknown output format");
}

std::string emit_labeling(const ClusterLabeling& labeling, ReportFormat format) {
    const std::size_t n = labeling.total();
    switch (format) {
    case ReportFormat::json: {
        ordered_json doc;
        doc["dimensions"] = labeling.dimensions;
        doc["clusters"] = ordered_json::array();
        for (std::size_t l = 0; l < labeling.clusters.size(); ++l) {
            const auto& cluster = labeling.clusters[l];
            ordered_json entry;
            entry["cluster"] = l;
            entry["size"] = cluster.size;
            entry["dominant"] = labeling.dimensions.at(cluster.dominant);
            entry["mean_percent"] = cluster.mean_percent;
            doc["clusters"].push_back(std::move(entry));
        }
        return doc.dump(2) + "\n";
    }
    case ReportFormat::text: {
        const std::size_t width = label_width(labeling.dimensions, 8);
        std::ostringstream out;
        out << pad_left("cluster", 7) << "  " << pad_left("size", 6) << "  " << pad_right("dominant", width);
        for (const auto& dim : labeling.dimensions) {
            out << "  " << pad_left(dim, 8);
        }
        out << '\n';
        for (std::size_t l = 0; l < labeling.clusters.size(); ++l) {
            const auto& cluster = labeling.clusters[l];
            out << pad_left(std::to_string(l), 7) << "  " << pad_left(std::to_string(cluster.size), 6) << "  "
                << pad_right(labeling.dimensions.at(cluster.dominant), width);
            for (std::size_t d = 0; d < labeling.dimensions.size(); ++d) {
                out << "  " << pad_left(format_fixed3(cluster.mean_percent[d]), std::max<std::size_t>(8, labeling.dimensions[d].size()));
            }
            out << '\n';
        }
        return out.str();
    }
    case ReportFormat::piedata: {
        std::string out = "cluster,dominant,percentage\n";
        for (std::size_t l = 0; l < labeling.clusters.size(); ++l) {
            const auto& cluster = labeling.clusters[l];
            const double share = n == 0 ? 0.0 : 100.0 * static_cast<double>(cluster.size) / static_cast<double>(n);
            out += std::to_string(l) + "," + labeling.dimensions.at(cluster.dominant) + "," + format_fixed3(share) +
                   "\n";
        }
        return out;
    }
    }
    throw InputError("unknown output format");
}

PercentReport parse_report(std::string_view document) {
    PercentReport report;
    try {
        const auto doc = ordered_json::parse(document);
        const auto tag = doc.value("format", std::string(report_format_tag));
        if (tag != report_format_tag) {
            throw InputError("unsupported report format '" + tag + "'");
        }
        report.provenance = parse_provenance(doc.at("provenance").get<std::string>());
        for (const auto& entry : doc.at("dimensions")) {
            report.dimensions.push_back(entry.at("name").get<std::string>());
            report.percent.push_back(entry.at("percent").get<double>());
        }
        if (doc.contains("metadata")) {
            const auto& meta = doc.at("metadata");
            if (meta.contains("k") && !meta.at("k").is_null()) {
                report.metadata.k = meta.at("k").get<std::size_t>();
            }
            if (meta.contains("seed") && !meta.at("seed").is_null()) {
                report.metadata.seed = meta.at("seed").get<std::uint64_t>();
            }
            report.metadata.policy = meta.value("policy", std::string());
            report.metadata.schema = meta.value("schema", std::string());
            report.metadata.aggregate = meta.value("aggregate", std::string());
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed report document: ") + e.what());
    }
    report.validate();
    return report;
}

} // namespace persona
