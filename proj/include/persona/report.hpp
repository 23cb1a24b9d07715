#ifndef PERSONA_REPORT_HPP
#define PERSONA_REPORT_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "persona/kmodes.hpp"
#include "persona/survey.hpp"

namespace persona {

struct ClusterLabel {
    std::size_t size = 0;
    std::vector<double> mean_percent;
    std::size_t dominant = 0;

    friend bool operator==(const ClusterLabel&, const ClusterLabel&) = default;
};

struct ClusterLabeling {
    std::vector<std::string> dimensions;
    std::vector<ClusterLabel> clusters;

    std::size_t total() const;
};

enum class Provenance { questionnaire, external, fused };

const char* to_string(Provenance provenance);

struct ReportMetadata {
    std::optional<std::size_t> k;
    std::optional<std::uint64_t> seed;
    std::string policy;
    std::string schema;
    std::string aggregate;

    friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

/// Population personality percentages, one per dimension.
struct PercentReport {
    std::vector<std::string> dimensions;
    std::vector<double> percent;
    Provenance provenance = Provenance::questionnaire;
    ReportMetadata metadata;

    /// Throws InputError unless values are in [0, 100] and sum to 100 within 1e-9.
    void validate() const;

    friend bool operator==(const PercentReport&, const PercentReport&) = default;
};

/// Mean member percent vector per cluster; dominant = argmax, earliest dimension on ties.
ClusterLabeling label_clusters(const ClusterModel& model, const std::vector<TraitProfile>& profiles,
                               const SurveySchema& schema);

/// Share of the population sitting in clusters labelled with each dimension.
PercentReport personality_percentages(const ClusterLabeling& labeling);

/// Population mean of the individual percent vectors (the `--aggregate mean` alternative).
PercentReport mean_percentages(const std::vector<TraitProfile>& profiles, const SurveySchema& schema);

/// Convex combination w*a + (1-w)*b per dimension.
PercentReport fuse_profiles(const PercentReport& a, const PercentReport& b, double w = 0.5);

enum class ReportFormat { json, text, piedata };

ReportFormat parse_report_format(std::string_view text);

/// Fixed-point with three decimals, ties to even.
std::string format_fixed3(double value);

std::string emit_report(const PercentReport& report, ReportFormat format);
std::string emit_labeling(const ClusterLabeling& labeling, ReportFormat format);

/// Reads a json report document (emit_report output or an external profile).
PercentReport parse_report(std::string_view document);

} // namespace persona

#endif
