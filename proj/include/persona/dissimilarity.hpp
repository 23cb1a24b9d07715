#ifndef PERSONA_DISSIMILARITY_HPP
#define PERSONA_DISSIMILARITY_HPP

#include <cstddef>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "persona/dataset.hpp"

namespace persona {

/**
 * Frequency weights omega(attribute, category, cluster) for the weighted
 * matching measure. Keys that were never stored resolve to default_weight.
 */
class CategoryWeightTable {
public:
    using Key = std::tuple<std::size_t, CategoryCode, std::size_t>;

    explicit CategoryWeightTable(double default_weight = 0.5);

    /// Throws PolicyError unless 0 <= weight <= 1.
    void set(std::size_t attribute, CategoryCode code, std::size_t cluster, double weight);
    double get(std::size_t attribute, CategoryCode code, std::size_t cluster) const;

    double default_weight() const { return default_weight_; }
    const std::map<Key, double>& entries() const { return entries_; }

private:
    std::map<Key, double> entries_;
    double default_weight_;
};

enum class DissimilarityMode { simple, weighted, mixed };
enum class GammaMode { automatic, fixed };

struct DissimilarityPolicy {
    DissimilarityMode mode = DissimilarityMode::simple;
    GammaMode gamma_mode = GammaMode::automatic;
    /// Only read when mode == mixed and gamma_mode == fixed.
    double gamma_value = 1.0;

    /// Throws PolicyError when gamma_value is negative or non-finite.
    void validate() const;

    friend bool operator==(const DissimilarityPolicy&, const DissimilarityPolicy&) = default;
};

const char* to_string(DissimilarityMode mode);
DissimilarityMode parse_dissimilarity_mode(std::string_view text);

/// Number of positions where the record and prototype disagree. All attributes must be categorical.
std::size_t simple_matching(const Record& a, const Prototype& b, std::span<const AttributeSpec> attrs);

/// Euclidean distance restricted to the numeric attributes.
double euclidean_distance(const Record& a, const Prototype& b, std::span<const AttributeSpec> attrs);

/**
 * Sum over attributes of (1 - w) on a match and w on a mismatch, where w is
 * the weight of the record's own category in the prototype's cluster.
 */
double weighted_matching(const Record& a, const Prototype& z, std::span<const AttributeSpec> attrs,
                         const CategoryWeightTable& weights);

/**
 * omega = clamp(relfreq(category in cluster) / relfreq(category in dataset), 0, 1)
 * for every (attribute, observed category, non-empty cluster). Categories
 * missing from a cluster get 0; empty clusters get no entries and so fall
 * back to the default weight.
 */
CategoryWeightTable compute_category_weights(const CategoricalDataset& dataset,
                                             std::span<const std::size_t> assignments, std::size_t k);

/// Euclidean part over numeric attributes plus gamma times the categorical mismatch count.
double mixed_dissimilarity(const Record& a, const Prototype& z, std::span<const AttributeSpec> attrs,
                           double gamma);

/**
 * Mean over numeric attributes of the population standard deviation within
 * the given rows. Returns 0 for a single row or a constant cluster; callers
 * substitute 1 in that case.
 */
double compute_gamma(std::span<const Record> cluster_rows, std::span<const AttributeSpec> attrs);

/// compute_gamma with the zero-to-one substitution applied.
double effective_gamma(std::span<const Record> cluster_rows, std::span<const AttributeSpec> attrs);

/**
 * A policy bound to the state it needs: the weight table for the weighted
 * mode, per-cluster gammas for the mixed mode.
 */
class Measure {
public:
    explicit Measure(DissimilarityPolicy policy);
    Measure(DissimilarityPolicy policy, const CategoryWeightTable* weights, std::vector<double> gammas);

    double operator()(const Record& record, const Prototype& prototype,
                      std::span<const AttributeSpec> attrs) const;

    const DissimilarityPolicy& policy() const { return policy_; }

private:
    DissimilarityPolicy policy_;
    const CategoryWeightTable* weights_ = nullptr;
    std::vector<double> gammas_;
};

} // namespace persona

#endif
