#include "persona/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <unordered_map>

#include "persona/error.hpp"

namespace persona {

void CategoricalDataset::validate() const {
    std::set<std::size_t> seen_index;
    for (const auto& attr : attrs) {
        if (!seen_index.insert(attr.index).second) {
            throw InputError("duplicate attribute index " + std::to_string(attr.index));
        }
        if (attr.is_categorical()) {
            std::set<CategoryCode> codes(attr.categories.begin(), attr.categories.end());
            if (codes.size() != attr.categories.size()) {
                throw InputError("attribute '" + attr.name + "' has duplicate category codes");
            }
            if (!codes.empty() && *codes.begin() < 0) {
                throw InputError("attribute '" + attr.name + "' has a negative category code");
            }
        }
    }

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.values.size() != attrs.size()) {
            throw AlignmentError("row " + std::to_string(i) + " has " + std::to_string(row.values.size()) +
                                 " values, expected " + std::to_string(attrs.size()));
        }
        for (std::size_t j = 0; j < attrs.size(); ++j) {
            const double v = row.values[j];
            if (!std::isfinite(v)) {
                throw InputError("row " + std::to_string(i) + ", attribute '" + attrs[j].name +
                                 "': non-finite value");
            }
            if (attrs[j].is_categorical()) {
                const auto& cats = attrs[j].categories;
                if (v != std::floor(v) || std::find(cats.begin(), cats.end(), as_code(v)) == cats.end()) {
                    throw InputError("row " + std::to_string(i) + ", attribute '" + attrs[j].name +
                                     "': value is not a known category code");
                }
            }
        }
    }
}

CategoricalDataset encode_categorical(const std::vector<std::string>& names,
                                      const std::vector<std::vector<std::string>>& cells,
                                      const std::vector<std::string>& row_ids) {
    if (row_ids.size() != cells.size()) {
        throw AlignmentError("row id count does not match row count");
    }
    CategoricalDataset out;
    std::vector<std::unordered_map<std::string, CategoryCode>> dictionaries(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
        out.attrs.push_back({j, AttributeKind::categorical, {}, names[j]});
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].size() != names.size()) {
            throw AlignmentError("row " + std::to_string(i) + " is not aligned with the attribute list");
        }
        Record record{{}, row_ids[i]};
        record.values.reserve(names.size());
        for (std::size_t j = 0; j < names.size(); ++j) {
            auto& dict = dictionaries[j];
            auto [it, inserted] = dict.emplace(cells[i][j], static_cast<CategoryCode>(dict.size()));
            if (inserted) {
                out.attrs[j].categories.push_back(it->second);
            }
            record.values.push_back(it->second);
        }
        out.rows.push_back(std::move(record));
    }
    return out;
}

CategoricalDataset make_categorical(const std::vector<std::vector<CategoryCode>>& rows) {
    CategoricalDataset out;
    const std::size_t m = rows.empty() ? 0 : rows.front().size();
    std::vector<std::set<CategoryCode>> seen(m);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m) {
            throw AlignmentError("row " + std::to_string(i) + " is not aligned with the first row");
        }
        Record record{{}, std::to_string(i)};
        for (std::size_t j = 0; j < m; ++j) {
            seen[j].insert(rows[i][j]);
            record.values.push_back(rows[i][j]);
        }
        out.rows.push_back(std::move(record));
    }
    for (std::size_t j = 0; j < m; ++j) {
        out.attrs.push_back({j, AttributeKind::categorical, {seen[j].begin(), seen[j].end()},
                             "a" + std::to_string(j)});
    }
    return out;
}

} // namespace persona
