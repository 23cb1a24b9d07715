#ifndef PERSONA_SURVEY_HPP
#define PERSONA_SURVEY_HPP

#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "persona/dataset.hpp"

namespace persona {

enum class Keying { positive, negative };

struct SurveyItem {
    std::string column;
    std::string dimension;
    Keying keying = Keying::positive;

    friend bool operator==(const SurveyItem&, const SurveyItem&) = default;
};

struct SurveySchema {
    std::string name;
    std::vector<std::string> dimensions;
    std::vector<SurveyItem> items;
    int likert_min = 1;
    int likert_max = 5;
    int missing_code = 0;

    /// Throws SchemaError naming the offending item.
    void validate() const;
    std::size_t dimension_index(std::string_view label) const;
    std::size_t items_in(std::size_t dimension) const;

    friend bool operator==(const SurveySchema&, const SurveySchema&) = default;
};

/// Parses and validates a schema JSON document.
SurveySchema load_schema(std::string_view document);
/// Canonical JSON document; load_schema(emit_schema(s)) == s.
std::string emit_schema(const SurveySchema& schema);

/// Names of the schemas compiled into the library.
std::vector<std::string> preset_names();
/// Shipped document for a preset; throws SchemaError for unknown names.
std::string_view preset_document(std::string_view name);
SurveySchema preset_schema(std::string_view name);

/// A preset name, or else a path to a schema document.
SurveySchema resolve_schema(const std::string& name_or_path);

struct ResponseTable {
    std::vector<std::string> ids;
    std::vector<std::string> columns;
    /// Row-major, aligned with columns.
    std::vector<std::vector<int>> values;

    friend bool operator==(const ResponseTable&, const ResponseTable&) = default;
};

enum class MissingPolicy { drop_row, impute_mode };

struct ParseReport {
    std::size_t rows_read = 0;
    std::size_t rows_kept = 0;
    std::size_t rows_dropped = 0;
    /// 1-based line numbers of dropped rows.
    std::vector<std::size_t> dropped_lines;
    std::size_t cells_imputed = 0;
};

struct ParsedResponses {
    ResponseTable table;
    CategoricalDataset dataset;
    ParseReport report;
};

/**
 * Reads delimiter-separated responses with a mandatory header row. All
 * schema columns must be present; other columns are ignored except that
 * the first non-schema column, if any, supplies respondent ids (otherwise
 * the 1-based row ordinal is used). Likert values become category codes
 * unchanged. Errors carry the 1-based line number.
 */
ParsedResponses parse_responses(std::istream& input, const SurveySchema& schema, char delimiter = ',',
                                MissingPolicy missing = MissingPolicy::drop_row);

/// Header "id" followed by the schema columns, then one line per respondent.
std::string write_responses(const ResponseTable& table, char delimiter = ',');

/// Dataset view of a response table: one categorical attribute per column,
/// dictionary = the full Likert range.
CategoricalDataset to_dataset(const ResponseTable& table, const SurveySchema& schema);

struct TraitProfile {
    std::vector<std::string> dimensions;
    std::vector<double> raw;
    std::vector<double> percent;

    friend bool operator==(const TraitProfile&, const TraitProfile&) = default;
};

/// 100 * raw / sum(raw). Throws DegenerateProfileError for an all-zero vector.
std::vector<double> normalize_profile(const std::vector<double>& raw);

/// Sums keyed item scores per dimension; negative items score min + max - v.
TraitProfile score_profile(const std::vector<int>& row, const SurveySchema& schema);

std::vector<TraitProfile> score_table(const ResponseTable& table, const SurveySchema& schema);

struct SyntheticResponses {
    ResponseTable table;
    /// Dominant dimension index drawn for each respondent.
    std::vector<std::size_t> latent;
};

/**
 * Each respondent draws a dominant dimension from the mixture. Items of that
 * dimension are answered at the keyed extreme (positive items high, negative
 * low), every other item at the opposite extreme. With probability `noise`
 * an answer is replaced by a uniform Likert value.
 */
SyntheticResponses generate_synthetic(std::size_t n, const SurveySchema& schema,
                                      const std::vector<double>& mixture, std::uint64_t seed,
                                      double noise = 0.0);

} // namespace persona

#endif
