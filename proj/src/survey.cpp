#include "persona/survey.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "persona/error.hpp"
#include "persona/kmodes.hpp"
#include "persona/random.hpp"

namespace persona {

namespace {

#include "persona/presets.inc"

using ordered_json = nlohmann::ordered_json;

std::string line_prefix(std::size_t line) {
    return "line " + std::to_string(line) + ": ";
}

/// Splits one line on the delimiter; double-quoted fields may contain the delimiter.
std::vector<std::string> split_fields(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string quote_if_needed(const std::string& field, char delimiter) {
    if (field.find(delimiter) == std::string::npos && field.find('"') == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return out + "\"";
}

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t");
    return text.substr(first, last - first + 1);
}

int parse_cell(std::string_view cell, std::size_t line, const std::string& column) {
    const auto text = trim(cell);
    int value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
        throw InputError(line_prefix(line) + "column '" + column + "': non-integer value '" + std::string(cell) +
                         "'");
    }
    return value;
}

const char* keying_name(Keying keying) {
    return keying == Keying::positive ? "positive" : "negative";
}

} // namespace

void SurveySchema::validate() const {
    if (dimensions.empty()) {
        throw SchemaError("schema '" + name + "': no dimensions");
    }
    std::set<std::string> dims;
    for (const auto& dim : dimensions) {
        if (!dims.insert(dim).second) {
            throw SchemaError("schema '" + name + "': duplicate dimension '" + dim + "'");
        }
    }
    if (items.empty()) {
        throw SchemaError("schema '" + name + "': no items");
    }
    if (likert_min >= likert_max) {
        throw SchemaError("schema '" + name + "': likert_min (" + std::to_string(likert_min) +
                          ") must be below likert_max (" + std::to_string(likert_max) + ")");
    }
    if (missing_code >= likert_min && missing_code <= likert_max) {
        throw SchemaError("schema '" + name + "': missing_code lies inside the Likert range");
    }
    std::set<std::string> columns;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& item = items[i];
        if (item.column.empty()) {
            throw SchemaError("schema '" + name + "', item " + std::to_string(i) + ": empty column name");
        }
        if (!columns.insert(item.column).second) {
            throw SchemaError("schema '" + name + "', item '" + item.column + "': duplicate column");
        }
        if (!dims.contains(item.dimension)) {
            throw SchemaError("schema '" + name + "', item '" + item.column + "': unknown dimension '" +
                              item.dimension + "'");
        }
    }
}

std::size_t SurveySchema::dimension_index(std::string_view label) const {
    for (std::size_t d = 0; d < dimensions.size(); ++d) {
        if (dimensions[d] == label) {
            return d;
        }
    }
    throw SchemaError("schema '" + name + "': unknown dimension '" + std::string(label) + "'");
}

std::size_t SurveySchema::items_in(std::size_t dimension) const {
    std::size_t count = 0;
    for (const auto& item : items) {
        count += item.dimension == dimensions.at(dimension) ? 1 : 0;
    }
    return count;
}

SurveySchema load_schema(std::string_view document) {
    SurveySchema schema;
    try {
        const auto doc = ordered_json::parse(document);
        schema.name = doc.at("name").get<std::string>();
        schema.dimensions = doc.at("dimensions").get<std::vector<std::string>>();
        schema.likert_min = doc.value("likert_min", 1);
        schema.likert_max = doc.value("likert_max", 5);
        schema.missing_code = doc.value("missing_code", 0);
        for (const auto& entry : doc.at("items")) {
            SurveyItem item;
            item.column = entry.at("column").get<std::string>();
            item.dimension = entry.at("dimension").get<std::string>();
            const auto keying = entry.value("keying", std::string("positive"));
            if (keying == "positive") {
                item.keying = Keying::positive;
            } else if (keying == "negative") {
                item.keying = Keying::negative;
            } else {
                throw SchemaError("item '" + item.column + "': keying must be positive or negative");
            }
            schema.items.push_back(std::move(item));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed schema document: ") + e.what());
    }
    schema.validate();
    return schema;
}

std::string emit_schema(const SurveySchema& schema) {
    ordered_json doc;
    doc["name"] = schema.name;
    doc["dimensions"] = schema.dimensions;
    doc["likert_min"] = schema.likert_min;
    doc["likert_max"] = schema.likert_max;
    doc["missing_code"] = schema.missing_code;
    doc["items"] = ordered_json::array();
    for (const auto& item : schema.items) {
        ordered_json entry;
        entry["column"] = item.column;
        entry["dimension"] = item.dimension;
        entry["keying"] = keying_name(item.keying);
        doc["items"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& preset : kPresets) {
        names.emplace_back(preset.name);
    }
    return names;
}

std::string_view preset_document(std::string_view name) {
    for (const auto& preset : kPresets) {
        if (preset.name == name) {
            return preset.document;
        }
    }
    throw SchemaError("unknown schema preset '" + std::string(name) + "'");
}

SurveySchema preset_schema(std::string_view name) {
    return load_schema(preset_document(name));
}

SurveySchema resolve_schema(const std::string& name_or_path) {
    for (const auto& preset : kPresets) {
        if (preset.name == name_or_path) {
            return load_schema(preset.document);
        }
    }
    std::ifstream file(name_or_path);
    if (!file) {
        throw SchemaError("schema '" + name_or_path + "' is neither a preset nor a readable file");
    }
    std::ostringstream text;
    text << file.rdbuf();
    return load_schema(text.str());
}

ParsedResponses parse_responses(std::istream& input, const SurveySchema& schema, char delimiter,
                                MissingPolicy missing) {
    schema.validate();
    ParsedResponses out;
    std::string line;
    std::size_t line_number = 0;

    std::vector<std::string> header;
    while (std::getline(input, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!trim(line).empty()) {
            header = split_fields(line, delimiter);
            break;
        }
    }
    if (header.empty()) {
        throw InputError("response file has no header row");
    }
    for (auto& name : header) {
        name = std::string(trim(name));
    }

    std::map<std::string, std::size_t> position;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (!position.emplace(header[c], c).second) {
            throw InputError(line_prefix(line_number) + "duplicate header column '" + header[c] + "'");
        }
    }
    std::vector<std::size_t> item_positions;
    std::set<std::string> schema_columns;
    for (const auto& item : schema.items) {
        auto it = position.find(item.column);
        if (it == position.end()) {
            throw InputError(line_prefix(line_number) + "missing header column '" + item.column + "'");
        }
        item_positions.push_back(it->second);
        schema_columns.insert(item.column);
        out.table.columns.push_back(item.column);
    }
    std::optional<std::size_t> id_position;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (!schema_columns.contains(header[c])) {
            id_position = c;
            break;
        }
    }

    std::set<std::string> seen_ids;
    std::vector<std::size_t> source_lines;
    while (std::getline(input, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        ++out.report.rows_read;
        const auto fields = split_fields(line, delimiter);
        if (fields.size() != header.size()) {
            throw InputError(line_prefix(line_number) + "expected " + std::to_string(header.size()) +
                             " fields, found " + std::to_string(fields.size()));
        }
        std::string id = id_position ? std::string(trim(fields[*id_position]))
                                     : std::to_string(out.report.rows_read);
        std::vector<int> values;
        bool has_missing = false;
        for (std::size_t c = 0; c < item_positions.size(); ++c) {
            const int value = parse_cell(fields[item_positions[c]], line_number, schema.items[c].column);
            if (value == schema.missing_code) {
                has_missing = true;
            } else if (value < schema.likert_min || value > schema.likert_max) {
                throw InputError(line_prefix(line_number) + "column '" + schema.items[c].column + "': value " +
                                 std::to_string(value) + " outside [" + std::to_string(schema.likert_min) + ", " +
                                 std::to_string(schema.likert_max) + "]");
            }
            values.push_back(value);
        }
        if (has_missing && missing == MissingPolicy::drop_row) {
            ++out.report.rows_dropped;
            out.report.dropped_lines.push_back(line_number);
            continue;
        }
        if (!seen_ids.insert(id).second) {
            throw InputError(line_prefix(line_number) + "duplicate respondent id '" + id + "'");
        }
        out.table.ids.push_back(std::move(id));
        out.table.values.push_back(std::move(values));
        source_lines.push_back(line_number);
    }

    if (missing == MissingPolicy::impute_mode) {
        for (std::size_t c = 0; c < out.table.columns.size(); ++c) {
            std::vector<CategoryCode> observed;
            for (const auto& row : out.table.values) {
                if (row[c] != schema.missing_code) {
                    observed.push_back(row[c]);
                }
            }
            if (observed.size() == out.table.values.size()) {
                continue;
            }
            if (observed.empty()) {
                throw InputError("column '" + out.table.columns[c] + "' has no observed values to impute from");
            }
            const CategoryCode mode = update_mode_attribute(observed);
            for (auto& row : out.table.values) {
                if (row[c] == schema.missing_code) {
                    row[c] = mode;
                    ++out.report.cells_imputed;
                }
            }
        }
    }

    out.report.rows_kept = out.table.values.size();
    out.dataset = to_dataset(out.table, schema);
    return out;
}

std::string write_responses(const ResponseTable& table, char delimiter) {
    std::string out = "id";
    for (const auto& column : table.columns) {
        out += delimiter;
        out += quote_if_needed(column, delimiter);
    }
    out += '\n';
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        out += quote_if_needed(table.ids.at(i), delimiter);
        for (int value : table.values[i]) {
            out += delimiter;
            out += std::to_string(value);
        }
        out += '\n';
    }
    return out;
}

CategoricalDataset to_dataset(const ResponseTable& table, const SurveySchema& schema) {
    if (table.columns.size() != schema.items.size()) {
        throw AlignmentError("response table columns do not match the schema items");
    }
    CategoricalDataset dataset;
    std::vector<CategoryCode> dictionary;
    for (int v = schema.likert_min; v <= schema.likert_max; ++v) {
        dictionary.push_back(v);
    }
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        dataset.attrs.push_back({j, AttributeKind::categorical, dictionary, table.columns[j]});
    }
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        if (table.values[i].size() != table.columns.size()) {
            throw AlignmentError("response row " + std::to_string(i) + " is not aligned with the columns");
        }
        dataset.rows.push_back({{table.values[i].begin(), table.values[i].end()}, table.ids.at(i)});
    }
    dataset.validate();
    return dataset;
}

std::vector<double> normalize_profile(const std::vector<double>& raw) {
    double total = 0.0;
    for (double value : raw) {
        if (!std::isfinite(value) || value < 0.0) {
            throw InputError("raw trait scores must be finite and non-negative");
        }
        total += value;
    }
    if (total == 0.0) {
        throw DegenerateProfileError("all raw trait scores are zero");
    }
    std::vector<double> percent;
    percent.reserve(raw.size());
    for (double value : raw) {
        percent.push_back(100.0 * (value / total));
    }
    return percent;
}

TraitProfile score_profile(const std::vector<int>& row, const SurveySchema& schema) {
    if (row.size() != schema.items.size()) {
        throw AlignmentError("response row has " + std::to_string(row.size()) + " values, schema has " +
                             std::to_string(schema.items.size()) + " items");
    }
    TraitProfile profile;
    profile.dimensions = schema.dimensions;
    profile.raw.assign(schema.dimensions.size(), 0.0);
    for (std::size_t i = 0; i < row.size(); ++i) {
        const int value = row[i];
        if (value < schema.likert_min || value > schema.likert_max) {
            throw InputError("item '" + schema.items[i].column + "': value " + std::to_string(value) +
                             " outside the Likert range");
        }
        const auto& item = schema.items[i];
        const int scored =
            item.keying == Keying::positive ? value : schema.likert_min + schema.likert_max - value;
        profile.raw[schema.dimension_index(item.dimension)] += scored;
    }
    profile.percent = normalize_profile(profile.raw);
    return profile;
}

std::vector<TraitProfile> score_table(const ResponseTable& table, const SurveySchema& schema) {
    std::vector<TraitProfile> profiles;
    profiles.reserve(table.values.size());
    for (const auto& row : table.values) {
        profiles.push_back(score_profile(row, schema));
    }
    return profiles;
}

SyntheticResponses generate_synthetic(std::size_t n, const SurveySchema& schema,
                                      const std::vector<double>& mixture, std::uint64_t seed, double noise) {
    schema.validate();
    if (n == 0) {
        throw InputError("synthetic sample size must be at least 1");
    }
    if (mixture.size() != schema.dimensions.size()) {
        throw InputError("mixture has " + std::to_string(mixture.size()) + " weights for " +
                         std::to_string(schema.dimensions.size()) + " dimensions");
    }
    double total = 0.0;
    for (double weight : mixture) {
        if (!std::isfinite(weight) || weight < 0.0) {
            throw InputError("mixture weights must be finite and non-negative");
        }
        total += weight;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw InputError("mixture weights must sum to 1");
    }
    if (!(noise >= 0.0 && noise <= 1.0)) {
        throw InputError("noise must lie in [0, 1]");
    }

    std::vector<std::size_t> item_dimension;
    for (const auto& item : schema.items) {
        item_dimension.push_back(schema.dimension_index(item.dimension));
    }
    const std::size_t width = std::to_string(n).size();
    const auto span = static_cast<std::uint64_t>(schema.likert_max - schema.likert_min + 1);

    SyntheticResponses out;
    for (const auto& item : schema.items) {
        out.table.columns.push_back(item.column);
    }
    Rng rng(seed);
    for (std::size_t r = 0; r < n; ++r) {
        const double draw = uniform_unit(rng);
        std::size_t dominant = mixture.size();
        double cumulative = 0.0;
        for (std::size_t d = 0; d < mixture.size(); ++d) {
            cumulative += mixture[d];
            if (mixture[d] > 0.0 && draw < cumulative) {
                dominant = d;
                break;
            }
        }
        if (dominant == mixture.size()) {
            // Rounding left the draw past the last cumulative bound.
            for (std::size_t d = mixture.size(); d-- > 0;) {
                if (mixture[d] > 0.0) {
                    dominant = d;
                    break;
                }
            }
        }

        std::vector<int> answers;
        answers.reserve(schema.items.size());
        for (std::size_t i = 0; i < schema.items.size(); ++i) {
            const bool high = (item_dimension[i] == dominant) == (schema.items[i].keying == Keying::positive);
            int answer = high ? schema.likert_max : schema.likert_min;
            if (noise > 0.0 && uniform_unit(rng) < noise) {
                answer = schema.likert_min + static_cast<int>(uniform_index(rng, span));
            }
            answers.push_back(answer);
        }

        std::string id = std::to_string(r + 1);
        out.table.ids.push_back("R" + std::string(width - id.size(), '0') + id);
        out.table.values.push_back(std::move(answers));
        out.latent.push_back(dominant);
    }
    return out;
}

} // namespace persona
