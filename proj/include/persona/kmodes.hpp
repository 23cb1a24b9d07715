#ifndef PERSONA_KMODES_HPP
#define PERSONA_KMODES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "persona/dataset.hpp"
#include "persona/dissimilarity.hpp"

namespace persona {

enum class InitStrategy { random_rows, density };

const char* to_string(InitStrategy strategy);
InitStrategy parse_init_strategy(std::string_view text);

struct FitConfig {
    std::size_t k = 2;
    DissimilarityPolicy policy;
    InitStrategy init = InitStrategy::random_rows;
    std::uint64_t seed = 0;
    std::size_t max_epochs = 100;
    std::size_t restarts = 1;
    /// Recompute the full simple-matching cost around every move and throw
    /// InvariantViolation unless it strictly decreases. Simple policy only.
    bool check_descent = false;

    friend bool operator==(const FitConfig&, const FitConfig&) = default;
};

struct ClusterModel {
    std::vector<Prototype> modes;
    std::vector<std::size_t> assignments;
    double cost = 0.0;
    std::size_t epochs_run = 0;
    bool converged = false;
    FitConfig config;

    std::vector<std::size_t> cluster_sizes() const;

    friend bool operator==(const ClusterModel&, const ClusterModel&) = default;
};

/**
 * Picks k starting prototypes.
 *
 * random_rows samples k rows with pairwise distinct values, without
 * replacement. density starts from the row whose values are most frequent
 * dataset-wide and then greedily adds the row farthest (minimum matching
 * distance) from the prototypes chosen so far. Ties go to the lowest row.
 * Throws InfeasibleError if k exceeds the number of distinct rows.
 */
std::vector<Prototype> init_modes(const CategoricalDataset& dataset, std::size_t k, InitStrategy strategy,
                                  std::uint64_t seed);

/// Index of the closest mode and its dissimilarity; ties resolve to the lowest index.
std::pair<std::size_t, double> nearest_mode(const Record& record, std::span<const Prototype> modes,
                                            std::span<const AttributeSpec> attrs, const Measure& measure);

/// Most frequent code; frequency ties resolve to the lowest code.
CategoryCode update_mode_attribute(std::span<const CategoryCode> values);

/**
 * Online frequency counter for one cluster, one categorical attribute.
 * Keeps the majority code (lowest code on ties) current under add/remove.
 */
class ModeCounter {
public:
    void add(CategoryCode code);
    void remove(CategoryCode code);
    /// Throws EmptyClusterError when no values are held.
    CategoryCode mode() const;
    std::size_t total() const { return total_; }

private:
    std::vector<std::size_t> counts_;
    std::size_t total_ = 0;
};

/**
 * Huang's online k-modes: seed prototypes, allocate rows in order updating
 * the receiving mode after each allocation, then sweep the rows moving any
 * row that is strictly closer to another mode (updating both modes) until a
 * sweep moves nothing or max_epochs is reached. A move that would empty its
 * source cluster is skipped. The best of config.restarts runs (seed + r)
 * is returned; ties go to the earliest restart.
 *
 * Internally the categorical codes are renumbered in order of first
 * appearance, so every code-based tie-break is independent of how the
 * categories were labelled. Modes are reported in the caller's codes.
 */
ClusterModel fit(const CategoricalDataset& dataset, const FitConfig& config);

/**
 * Sum over rows of the policy's dissimilarity to the row's assigned mode.
 * Under the weighted policy a missing table is computed from the
 * assignments; under mixed/automatic, gammas are computed per cluster.
 */
double within_cluster_difference(const CategoricalDataset& dataset, std::span<const Prototype> modes,
                                 std::span<const std::size_t> assignments, const DissimilarityPolicy& policy,
                                 const CategoryWeightTable* weights = nullptr);

struct ElbowPoint {
    std::size_t k = 0;
    double wcd = 0.0;

    friend bool operator==(const ElbowPoint&, const ElbowPoint&) = default;
};

/// Fits every k in [k_min, k_max] (seed and restarts shared) and records the final cost.
std::vector<ElbowPoint> elbow_scan(const CategoricalDataset& dataset, std::size_t k_min, std::size_t k_max,
                                   const DissimilarityPolicy& policy, std::uint64_t seed, std::size_t restarts,
                                   InitStrategy init = InitStrategy::random_rows);

/**
 * Smallest k whose relative improvement to k+1 falls below epsilon. A point
 * with zero cost is returned immediately; otherwise the largest k.
 */
std::size_t select_k(std::span<const ElbowPoint> curve, double epsilon = 0.05);

} // namespace persona

#endif
