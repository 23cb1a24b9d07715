#include "persona/dissimilarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "persona/error.hpp"

namespace persona {

namespace {

void check_aligned(std::size_t record, std::size_t prototype, std::size_t attrs) {
    if (record != attrs || prototype != attrs) {
        throw AlignmentError("record has " + std::to_string(record) + " values and prototype " +
                             std::to_string(prototype) + ", expected " + std::to_string(attrs));
    }
}

void require_all_categorical(std::span<const AttributeSpec> attrs, const char* measure) {
    for (const auto& attr : attrs) {
        if (!attr.is_categorical()) {
            throw PolicyError(std::string(measure) + " requires categorical attributes; '" + attr.name +
                              "' is numeric");
        }
    }
}

std::size_t count_mismatches(const Record& a, const Prototype& b, std::span<const AttributeSpec> attrs) {
    std::size_t mismatches = 0;
    for (std::size_t j = 0; j < attrs.size(); ++j) {
        if (attrs[j].is_categorical() && a.values[j] != b.values[j]) {
            ++mismatches;
        }
    }
    return mismatches;
}

double numeric_distance(const Record& a, const Prototype& b, std::span<const AttributeSpec> attrs) {
    double sum = 0.0;
    for (std::size_t j = 0; j < attrs.size(); ++j) {
        if (attrs[j].is_numeric()) {
            const double diff = a.values[j] - b.values[j];
            sum += diff * diff;
        }
    }
    return std::sqrt(sum);
}

} // namespace

CategoryWeightTable::CategoryWeightTable(double default_weight) : default_weight_(default_weight) {
    if (!(default_weight >= 0.0 && default_weight <= 1.0)) {
        throw PolicyError("default weight must lie in [0, 1]");
    }
}

void CategoryWeightTable::set(std::size_t attribute, CategoryCode code, std::size_t cluster, double weight) {
    if (!(weight >= 0.0 && weight <= 1.0)) {
        throw PolicyError("category weight must lie in [0, 1]");
    }
    entries_[Key{attribute, code, cluster}] = weight;
}

double CategoryWeightTable::get(std::size_t attribute, CategoryCode code, std::size_t cluster) const {
    auto it = entries_.find(Key{attribute, code, cluster});
    return it == entries_.end() ? default_weight_ : it->second;
}

void DissimilarityPolicy::validate() const {
    if (!std::isfinite(gamma_value) || gamma_value < 0.0) {
        throw PolicyError("gamma must be a finite non-negative number");
    }
}

const char* to_string(DissimilarityMode mode) {
    switch (mode) {
    case DissimilarityMode::simple:
        return "simple";
    case DissimilarityMode::weighted:
        return "weighted";
    case DissimilarityMode::mixed:
        return "mixed";
    }
    return "simple";
}

DissimilarityMode parse_dissimilarity_mode(std::string_view text) {
    if (text == "simple") {
        return DissimilarityMode::simple;
    }
    if (text == "weighted") {
        return DissimilarityMode::weighted;
    }
    if (text == "mixed") {
        return DissimilarityMode::mixed;
    }
    throw PolicyError("unknown dissimilarity policy '" + std::string(text) + "'");
}

std::size_t simple_matching(const Record& a, const Prototype& b, std::span<const AttributeSpec> attrs) {
    check_aligned(a.values.size(), b.values.size(), attrs.size());
    require_all_categorical(attrs, "simple matching");
    return count_mismatches(a, b, attrs);
}

double euclidean_distance(const Record& a, const Prototype& b, std::span<const AttributeSpec> attrs) {
    check_aligned(a.values.size(), b.values.size(), attrs.size());
    if (std::none_of(attrs.begin(), attrs.end(), [](const auto& attr) { return attr.is_numeric(); })) {
        throw PolicyError("euclidean distance requires at least one numeric attribute");
    }
    return numeric_distance(a, b, attrs);
}

double weighted_matching(const Record& a, const Prototype& z, std::span<const AttributeSpec> attrs,
                         const CategoryWeightTable& weights) {
    check_aligned(a.values.size(), z.values.size(), attrs.size());
    require_all_categorical(attrs, "weighted matching");
    double total = 0.0;
    for (std::size_t j = 0; j < attrs.size(); ++j) {
        const double omega = weights.get(j, as_code(a.values[j]), z.cluster_index);
        total += a.values[j] == z.values[j] ? 1.0 - omega : omega;
    }
    return total;
}

CategoryWeightTable compute_category_weights(const CategoricalDataset& dataset,
                                             std::span<const std::size_t> assignments, std::size_t k) {
    const std::size_t n = dataset.n();
    if (n == 0) {
        throw InputError("cannot compute category weights on an empty dataset");
    }
    if (assignments.size() != n) {
        throw AlignmentError("assignment count does not match row count");
    }
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t cluster : assignments) {
        if (cluster >= k) {
            throw InputError("assignment " + std::to_string(cluster) + " outside [0, k)");
        }
        ++sizes[cluster];
    }

    CategoryWeightTable table;
    for (std::size_t j = 0; j < dataset.m(); ++j) {
        if (!dataset.attrs[j].is_categorical()) {
            continue;
        }
        std::unordered_map<CategoryCode, std::size_t> overall;
        std::vector<std::unordered_map<CategoryCode, std::size_t>> per_cluster(k);
        for (std::size_t i = 0; i < n; ++i) {
            const CategoryCode code = as_code(dataset.rows[i].values[j]);
            ++overall[code];
            ++per_cluster[assignments[i]][code];
        }
        for (const auto& [code, total] : overall) {
            const double dataset_freq = static_cast<double>(total) / static_cast<double>(n);
            for (std::size_t l = 0; l < k; ++l) {
                if (sizes[l] == 0) {
                    continue;
                }
                auto it = per_cluster[l].find(code);
                const std::size_t inside = it == per_cluster[l].end() ? 0 : it->second;
                const double cluster_freq = static_cast<double>(inside) / static_cast<double>(sizes[l]);
                table.set(j, code, l, std::clamp(cluster_freq / dataset_freq, 0.0, 1.0));
            }
        }
    }
    return table;
}

double mixed_dissimilarity(const Record& a, const Prototype& z, std::span<const AttributeSpec> attrs,
                           double gamma) {
    check_aligned(a.values.size(), z.values.size(), attrs.size());
    if (!std::isfinite(gamma) || gamma < 0.0) {
        throw PolicyError("gamma must be a finite non-negative number");
    }
    return numeric_distance(a, z, attrs) + gamma * static_cast<double>(count_mismatches(a, z, attrs));
}

double compute_gamma(std::span<const Record> cluster_rows, std::span<const AttributeSpec> attrs) {
    std::size_t numeric_count = 0;
    double std_sum = 0.0;
    for (std::size_t j = 0; j < attrs.size(); ++j) {
        if (!attrs[j].is_numeric()) {
            continue;
        }
        ++numeric_count;
        if (cluster_rows.empty()) {
            continue;
        }
        double mean = 0.0;
        for (const auto& row : cluster_rows) {
            if (row.values.size() != attrs.size()) {
                throw AlignmentError("cluster row is not aligned with the attribute list");
            }
            mean += row.values[j];
        }
        mean /= static_cast<double>(cluster_rows.size());
        double squares = 0.0;
        for (const auto& row : cluster_rows) {
            const double diff = row.values[j] - mean;
            squares += diff * diff;
        }
        std_sum += std::sqrt(squares / static_cast<double>(cluster_rows.size()));
    }
    if (numeric_count == 0) {
        throw PolicyError("gamma needs at least one numeric attribute; mixed mode is invalid here");
    }
    return std_sum / static_cast<double>(numeric_count);
}

double effective_gamma(std::span<const Record> cluster_rows, std::span<const AttributeSpec> attrs) {
    const double gamma = compute_gamma(cluster_rows, attrs);
    return gamma == 0.0 ? 1.0 : gamma;
}

Measure::Measure(DissimilarityPolicy policy) : policy_(policy) {
    policy_.validate();
}

Measure::Measure(DissimilarityPolicy policy, const CategoryWeightTable* weights, std::vector<double> gammas)
    : policy_(policy), weights_(weights), gammas_(std::move(gammas)) {
    policy_.validate();
}

double Measure::operator()(const Record& record, const Prototype& prototype,
                           std::span<const AttributeSpec> attrs) const {
    switch (policy_.mode) {
    case DissimilarityMode::simple:
        return static_cast<double>(simple_matching(record, prototype, attrs));
    case DissimilarityMode::weighted:
        if (weights_ == nullptr) {
            throw PolicyError("weighted policy requires a category weight table");
        }
        return weighted_matching(record, prototype, attrs, *weights_);
    case DissimilarityMode::mixed: {
        double gamma = policy_.gamma_value;
        if (policy_.gamma_mode == GammaMode::automatic) {
            if (prototype.cluster_index >= gammas_.size()) {
                throw PolicyError("automatic gamma requires a gamma for every cluster");
            }
            gamma = gammas_[prototype.cluster_index];
        }
        return mixed_dissimilarity(record, prototype, attrs, gamma);
    }
    }
    return 0.0;
}

} // namespace persona
