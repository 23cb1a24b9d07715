#include "persona/kmodes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "persona/error.hpp"
#include "persona/random.hpp"

namespace persona {

namespace {

constexpr std::size_t unassigned = std::numeric_limits<std::size_t>::max();

/// Dataset with categorical codes renumbered by first appearance, plus the way back.
struct CanonicalData {
    CategoricalDataset data;
    std::vector<std::vector<CategoryCode>> to_original;
};

CanonicalData canonicalize(const CategoricalDataset& dataset) {
    CanonicalData out{dataset, std::vector<std::vector<CategoryCode>>(dataset.m())};
    for (std::size_t j = 0; j < dataset.m(); ++j) {
        if (!dataset.attrs[j].is_categorical()) {
            continue;
        }
        std::map<CategoryCode, CategoryCode> forward;
        for (auto& row : out.data.rows) {
            const CategoryCode original = as_code(row.values[j]);
            auto [it, inserted] = forward.emplace(original, static_cast<CategoryCode>(forward.size()));
            if (inserted) {
                out.to_original[j].push_back(original);
            }
            row.values[j] = it->second;
        }
        std::vector<CategoryCode> dictionary(forward.size());
        for (std::size_t c = 0; c < dictionary.size(); ++c) {
            dictionary[c] = static_cast<CategoryCode>(c);
        }
        out.data.attrs[j].categories = std::move(dictionary);
    }
    return out;
}

/// First row of every distinct value vector, in row order.
std::vector<std::size_t> distinct_rows(const CategoricalDataset& dataset) {
    std::set<std::vector<double>> seen;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dataset.n(); ++i) {
        if (seen.insert(dataset.rows[i].values).second) {
            out.push_back(i);
        }
    }
    return out;
}

std::size_t value_mismatches(const Record& a, const Record& b) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < a.values.size(); ++j) {
        count += a.values[j] != b.values[j] ? 1 : 0;
    }
    return count;
}

std::vector<std::size_t> seed_rows(const CategoricalDataset& dataset, std::size_t k, InitStrategy strategy,
                                   std::uint64_t seed) {
    if (k == 0) {
        throw InfeasibleError("k must be at least 1");
    }
    auto distinct = distinct_rows(dataset);
    if (k > distinct.size()) {
        throw InfeasibleError("k = " + std::to_string(k) + " exceeds the " + std::to_string(distinct.size()) +
                              " distinct rows available");
    }

    if (strategy == InitStrategy::random_rows) {
        Rng rng(seed);
        for (std::size_t i = 0; i < k; ++i) {
            const auto pick = i + static_cast<std::size_t>(uniform_index(rng, distinct.size() - i));
            std::swap(distinct[i], distinct[pick]);
        }
        distinct.resize(k);
        return distinct;
    }

    // density
    std::vector<std::map<double, std::size_t>> frequency(dataset.m());
    for (const auto& row : dataset.rows) {
        for (std::size_t j = 0; j < dataset.m(); ++j) {
            ++frequency[j][row.values[j]];
        }
    }
    std::size_t first = 0;
    std::size_t best_score = 0;
    for (std::size_t i = 0; i < dataset.n(); ++i) {
        std::size_t score = 0;
        for (std::size_t j = 0; j < dataset.m(); ++j) {
            score += frequency[j][dataset.rows[i].values[j]];
        }
        if (score > best_score) {
            best_score = score;
            first = i;
        }
    }

    std::vector<std::size_t> chosen{first};
    std::vector<std::size_t> min_distance(dataset.n());
    for (std::size_t i = 0; i < dataset.n(); ++i) {
        min_distance[i] = value_mismatches(dataset.rows[i], dataset.rows[first]);
    }
    while (chosen.size() < k) {
        std::size_t next = 0;
        for (std::size_t i = 1; i < dataset.n(); ++i) {
            if (min_distance[i] > min_distance[next]) {
                next = i;
            }
        }
        chosen.push_back(next);
        for (std::size_t i = 0; i < dataset.n(); ++i) {
            min_distance[i] = std::min(min_distance[i], value_mismatches(dataset.rows[i], dataset.rows[next]));
        }
    }
    return chosen;
}

void validate_fit_inputs(const CategoricalDataset& dataset, const FitConfig& config) {
    dataset.validate();
    config.policy.validate();
    if (dataset.n() == 0) {
        throw InputError("cannot fit an empty dataset");
    }
    if (config.k == 0 || config.k > dataset.n()) {
        throw InfeasibleError("k = " + std::to_string(config.k) + " is outside [1, " +
                              std::to_string(dataset.n()) + "]");
    }
    if (config.max_epochs == 0) {
        throw InputError("max_epochs must be at least 1");
    }
    if (config.restarts == 0) {
        throw InputError("restarts must be at least 1");
    }
    const bool has_numeric =
        std::any_of(dataset.attrs.begin(), dataset.attrs.end(), [](const auto& a) { return a.is_numeric(); });
    switch (config.policy.mode) {
    case DissimilarityMode::simple:
    case DissimilarityMode::weighted:
        if (has_numeric) {
            throw PolicyError(std::string(to_string(config.policy.mode)) +
                              " policy requires purely categorical data; use the mixed policy");
        }
        break;
    case DissimilarityMode::mixed:
        if (config.policy.gamma_mode == GammaMode::automatic && !has_numeric) {
            throw PolicyError("automatic gamma needs numeric attributes; mixed mode is invalid here");
        }
        break;
    }
    if (config.check_descent && config.policy.mode != DissimilarityMode::simple) {
        throw PolicyError("descent checking is only defined for the simple policy");
    }
}

/**
 * Cluster state for one run on canonical data: membership counters per
 * categorical attribute, sums per numeric attribute, and the current modes.
 */
class OnlineClustering {
public:
    OnlineClustering(const CategoricalDataset& data, std::size_t k, const DissimilarityPolicy& policy)
        : data_(data), k_(k), policy_(policy), assignments_(data.n(), unassigned), sizes_(k, 0) {
        for (std::size_t j = 0; j < data.m(); ++j) {
            (data.attrs[j].is_categorical() ? categorical_ : numeric_).push_back(j);
        }
        counters_.assign(k, std::vector<ModeCounter>(categorical_.size()));
        sums_.assign(k, std::vector<double>(numeric_.size(), 0.0));
        modes_.resize(k);
        for (std::size_t l = 0; l < k; ++l) {
            modes_[l].cluster_index = l;
            modes_[l].values.assign(data.m(), 0.0);
        }
        gammas_.assign(k, policy.gamma_mode == GammaMode::fixed ? policy.gamma_value : 1.0);
    }

    void run(std::span<const std::size_t> seeds, std::size_t max_epochs, bool check_descent) {
        for (std::size_t l = 0; l < k_; ++l) {
            add(seeds[l], l);
        }
        // The initial allocation has no weights or cluster spread yet.
        measure_mode_ = policy_.mode == DissimilarityMode::weighted ? DissimilarityMode::simple : policy_.mode;
        for (std::size_t i = 0; i < data_.n(); ++i) {
            if (assignments_[i] == unassigned) {
                add(i, nearest(i).first);
            }
        }

        measure_mode_ = policy_.mode;
        std::vector<double> distances(k_);
        for (std::size_t epoch = 1; epoch <= max_epochs; ++epoch) {
            refresh_epoch_state();
            std::size_t moves = 0;
            for (std::size_t i = 0; i < data_.n(); ++i) {
                const std::size_t current = assignments_[i];
                if (sizes_[current] == 1) {
                    continue;
                }
                const auto [best, best_distance] = nearest(i);
                if (best == current || !(best_distance < distance(i, current))) {
                    continue;
                }
                const double before = check_descent ? matching_cost() : 0.0;
                remove(i, current);
                add(i, best);
                ++moves;
                if (check_descent) {
                    const double after = matching_cost();
                    if (!(after < before)) {
                        throw InvariantViolation("move of row " + std::to_string(i) + " changed cost from " +
                                                 std::to_string(before) + " to " + std::to_string(after));
                    }
                }
            }
            epochs_run_ = epoch;
            if (moves == 0) {
                converged_ = true;
                break;
            }
        }
        finalize_numeric_modes();
    }

    const std::vector<Prototype>& modes() const { return modes_; }
    const std::vector<std::size_t>& assignments() const { return assignments_; }
    std::size_t epochs_run() const { return epochs_run_; }
    bool converged() const { return converged_; }

private:
    void add(std::size_t row, std::size_t cluster) {
        assignments_[row] = cluster;
        ++sizes_[cluster];
        const auto& values = data_.rows[row].values;
        for (std::size_t c = 0; c < categorical_.size(); ++c) {
            counters_[cluster][c].add(as_code(values[categorical_[c]]));
        }
        for (std::size_t v = 0; v < numeric_.size(); ++v) {
            sums_[cluster][v] += values[numeric_[v]];
        }
        refresh_mode(cluster);
    }

    void remove(std::size_t row, std::size_t cluster) {
        assignments_[row] = unassigned;
        --sizes_[cluster];
        const auto& values = data_.rows[row].values;
        for (std::size_t c = 0; c < categorical_.size(); ++c) {
            counters_[cluster][c].remove(as_code(values[categorical_[c]]));
        }
        for (std::size_t v = 0; v < numeric_.size(); ++v) {
            sums_[cluster][v] -= values[numeric_[v]];
        }
        refresh_mode(cluster);
    }

    void refresh_mode(std::size_t cluster) {
        auto& mode = modes_[cluster].values;
        for (std::size_t c = 0; c < categorical_.size(); ++c) {
            mode[categorical_[c]] = counters_[cluster][c].mode();
        }
        for (std::size_t v = 0; v < numeric_.size(); ++v) {
            mode[numeric_[v]] = sums_[cluster][v] / static_cast<double>(sizes_[cluster]);
        }
    }

    // Running sums drift; report exact member means.
    void finalize_numeric_modes() {
        for (std::size_t l = 0; l < k_; ++l) {
            for (std::size_t v = 0; v < numeric_.size(); ++v) {
                double sum = 0.0;
                for (std::size_t i = 0; i < data_.n(); ++i) {
                    if (assignments_[i] == l) {
                        sum += data_.rows[i].values[numeric_[v]];
                    }
                }
                modes_[l].values[numeric_[v]] = sum / static_cast<double>(sizes_[l]);
            }
        }
    }

    /// Freezes the weight table or the automatic gammas for the coming epoch.
    void refresh_epoch_state() {
        if (policy_.mode == DissimilarityMode::weighted) {
            const auto table = compute_category_weights(data_, assignments_, k_);
            weights_.assign(k_, std::vector<std::vector<double>>(data_.m()));
            for (std::size_t l = 0; l < k_; ++l) {
                for (std::size_t j : categorical_) {
                    const auto& cats = data_.attrs[j].categories;
                    auto& slot = weights_[l][j];
                    slot.resize(cats.size());
                    for (std::size_t c = 0; c < cats.size(); ++c) {
                        slot[c] = table.get(j, static_cast<CategoryCode>(c), l);
                    }
                }
            }
        } else if (policy_.mode == DissimilarityMode::mixed && policy_.gamma_mode == GammaMode::automatic) {
            std::vector<std::vector<Record>> members(k_);
            for (std::size_t i = 0; i < data_.n(); ++i) {
                members[assignments_[i]].push_back(data_.rows[i]);
            }
            for (std::size_t l = 0; l < k_; ++l) {
                gammas_[l] = effective_gamma(members[l], data_.attrs);
            }
        }
    }

    double distance(std::size_t row, std::size_t cluster) const {
        const auto& x = data_.rows[row].values;
        const auto& z = modes_[cluster].values;
        switch (measure_mode_) {
        case DissimilarityMode::simple: {
            std::size_t mismatches = 0;
            for (std::size_t j : categorical_) {
                mismatches += x[j] != z[j] ? 1 : 0;
            }
            return static_cast<double>(mismatches);
        }
        case DissimilarityMode::weighted: {
            double total = 0.0;
            for (std::size_t j : categorical_) {
                const double omega = weights_[cluster][j][static_cast<std::size_t>(as_code(x[j]))];
                total += x[j] == z[j] ? 1.0 - omega : omega;
            }
            return total;
        }
        case DissimilarityMode::mixed: {
            double squares = 0.0;
            for (std::size_t j : numeric_) {
                const double diff = x[j] - z[j];
                squares += diff * diff;
            }
            std::size_t mismatches = 0;
            for (std::size_t j : categorical_) {
                mismatches += x[j] != z[j] ? 1 : 0;
            }
            return std::sqrt(squares) + gammas_[cluster] * static_cast<double>(mismatches);
        }
        }
        return 0.0;
    }

    std::pair<std::size_t, double> nearest(std::size_t row) const {
        std::size_t best = 0;
        double best_distance = distance(row, 0);
        for (std::size_t l = 1; l < k_; ++l) {
            const double d = distance(row, l);
            if (d < best_distance) {
                best = l;
                best_distance = d;
            }
        }
        return {best, best_distance};
    }

    double matching_cost() const {
        std::size_t total = 0;
        for (std::size_t i = 0; i < data_.n(); ++i) {
            const auto& x = data_.rows[i].values;
            const auto& z = modes_[assignments_[i]].values;
            for (std::size_t j : categorical_) {
                total += x[j] != z[j] ? 1 : 0;
            }
        }
        return static_cast<double>(total);
    }

    const CategoricalDataset& data_;
    std::size_t k_;
    DissimilarityPolicy policy_;
    DissimilarityMode measure_mode_ = DissimilarityMode::simple;
    std::vector<std::size_t> categorical_;
    std::vector<std::size_t> numeric_;
    std::vector<std::size_t> assignments_;
    std::vector<std::size_t> sizes_;
    std::vector<std::vector<ModeCounter>> counters_;
    std::vector<std::vector<double>> sums_;
    std::vector<Prototype> modes_;
    std::vector<std::vector<std::vector<double>>> weights_;
    std::vector<double> gammas_;
    std::size_t epochs_run_ = 0;
    bool converged_ = false;
};

std::vector<Prototype> to_original_codes(const CanonicalData& canonical, std::vector<Prototype> modes) {
    for (auto& mode : modes) {
        for (std::size_t j = 0; j < mode.values.size(); ++j) {
            if (canonical.data.attrs[j].is_categorical()) {
                mode.values[j] = canonical.to_original[j][static_cast<std::size_t>(as_code(mode.values[j]))];
            }
        }
    }
    return modes;
}

} // namespace

const char* to_string(InitStrategy strategy) {
    return strategy == InitStrategy::density ? "density" : "random_rows";
}

InitStrategy parse_init_strategy(std::string_view text) {
    if (text == "random_rows" || text == "random") {
        return InitStrategy::random_rows;
    }
    if (text == "density") {
        return InitStrategy::density;
    }
    throw InputError("unknown init strategy '" + std::string(text) + "'");
}

std::vector<std::size_t> ClusterModel::cluster_sizes() const {
    std::vector<std::size_t> sizes(modes.size(), 0);
    for (std::size_t cluster : assignments) {
        ++sizes.at(cluster);
    }
    return sizes;
}

void ModeCounter::add(CategoryCode code) {
    if (code < 0) {
        throw InputError("category codes must be non-negative");
    }
    const auto slot = static_cast<std::size_t>(code);
    if (slot >= counts_.size()) {
        counts_.resize(slot + 1, 0);
    }
    ++counts_[slot];
    ++total_;
}

void ModeCounter::remove(CategoryCode code) {
    const auto slot = static_cast<std::size_t>(code);
    if (code < 0 || slot >= counts_.size() || counts_[slot] == 0) {
        throw InputError("removing category code " + std::to_string(code) + " that is not held");
    }
    --counts_[slot];
    --total_;
}

CategoryCode ModeCounter::mode() const {
    if (total_ == 0) {
        throw EmptyClusterError("mode of an empty cluster");
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts_.size(); ++c) {
        if (counts_[c] > counts_[best]) {
            best = c;
        }
    }
    return static_cast<CategoryCode>(best);
}

CategoryCode update_mode_attribute(std::span<const CategoryCode> values) {
    if (values.empty()) {
        throw EmptyClusterError("mode of an empty cluster");
    }
    std::map<CategoryCode, std::size_t> counts;
    for (CategoryCode code : values) {
        ++counts[code];
    }
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) {
            best = it;
        }
    }
    return best->first;
}

std::vector<Prototype> init_modes(const CategoricalDataset& dataset, std::size_t k, InitStrategy strategy,
                                  std::uint64_t seed) {
    dataset.validate();
    const auto rows = seed_rows(dataset, k, strategy, seed);
    std::vector<Prototype> out;
    for (std::size_t l = 0; l < rows.size(); ++l) {
        out.push_back({dataset.rows[rows[l]].values, l});
    }
    return out;
}

std::pair<std::size_t, double> nearest_mode(const Record& record, std::span<const Prototype> modes,
                                            std::span<const AttributeSpec> attrs, const Measure& measure) {
    if (modes.empty()) {
        throw InputError("nearest_mode needs at least one mode");
    }
    std::size_t best = 0;
    double best_distance = measure(record, modes[0], attrs);
    for (std::size_t l = 1; l < modes.size(); ++l) {
        const double d = measure(record, modes[l], attrs);
        if (d < best_distance) {
            best = l;
            best_distance = d;
        }
    }
    return {best, best_distance};
}

ClusterModel fit(const CategoricalDataset& dataset, const FitConfig& config) {
    validate_fit_inputs(dataset, config);
    const CanonicalData canonical = canonicalize(dataset);

    std::optional<OnlineClustering> best;
    double best_cost = 0.0;
    for (std::size_t r = 0; r < config.restarts; ++r) {
        const auto seeds = seed_rows(canonical.data, config.k, config.init, config.seed + r);
        OnlineClustering run(canonical.data, config.k, config.policy);
        run.run(seeds, config.max_epochs, config.check_descent);
        const double cost =
            within_cluster_difference(canonical.data, run.modes(), run.assignments(), config.policy);
        if (!best || cost < best_cost) {
            best_cost = cost;
            best.emplace(std::move(run));
        }
    }

    ClusterModel model;
    model.modes = to_original_codes(canonical, best->modes());
    model.assignments = best->assignments();
    model.cost = within_cluster_difference(dataset, model.modes, model.assignments, config.policy);
    model.epochs_run = best->epochs_run();
    model.converged = best->converged();
    model.config = config;
    return model;
}

double within_cluster_difference(const CategoricalDataset& dataset, std::span<const Prototype> modes,
                                 std::span<const std::size_t> assignments, const DissimilarityPolicy& policy,
                                 const CategoryWeightTable* weights) {
    if (assignments.size() != dataset.n()) {
        throw AlignmentError("assignment count does not match row count");
    }
    const std::size_t k = modes.size();
    for (std::size_t cluster : assignments) {
        if (cluster >= k) {
            throw InputError("assignment " + std::to_string(cluster) + " outside [0, k)");
        }
    }

    std::optional<CategoryWeightTable> computed;
    std::vector<double> gammas;
    if (policy.mode == DissimilarityMode::weighted && weights == nullptr) {
        computed.emplace(compute_category_weights(dataset, assignments, k));
        weights = &*computed;
    }
    if (policy.mode == DissimilarityMode::mixed && policy.gamma_mode == GammaMode::automatic) {
        std::vector<std::vector<Record>> members(k);
        for (std::size_t i = 0; i < dataset.n(); ++i) {
            members[assignments[i]].push_back(dataset.rows[i]);
        }
        for (const auto& rows : members) {
            gammas.push_back(effective_gamma(rows, dataset.attrs));
        }
    }
    const Measure measure(policy, weights, std::move(gammas));

    std::vector<Prototype> indexed(modes.begin(), modes.end());
    for (std::size_t l = 0; l < k; ++l) {
        indexed[l].cluster_index = l;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < dataset.n(); ++i) {
        total += measure(dataset.rows[i], indexed[assignments[i]], dataset.attrs);
    }
    return total;
}

std::vector<ElbowPoint> elbow_scan(const CategoricalDataset& dataset, std::size_t k_min, std::size_t k_max,
                                   const DissimilarityPolicy& policy, std::uint64_t seed, std::size_t restarts,
                                   InitStrategy init) {
    if (k_min == 0 || k_min > k_max) {
        throw InputError("elbow scan needs 1 <= k_min <= k_max");
    }
    if (k_max > dataset.n()) {
        throw InfeasibleError("k_max = " + std::to_string(k_max) + " exceeds the " +
                              std::to_string(dataset.n()) + " rows available");
    }
    std::vector<ElbowPoint> curve;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        FitConfig config;
        config.k = k;
        config.policy = policy;
        config.init = init;
        config.seed = seed;
        config.restarts = restarts;
        curve.push_back({k, fit(dataset, config).cost});
    }
    return curve;
}

std::size_t select_k(std::span<const ElbowPoint> curve, double epsilon) {
    if (curve.size() < 2) {
        throw InputError("select_k needs at least two curve points");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw InputError("epsilon must lie in (0, 1)");
    }
    for (std::size_t p = 1; p < curve.size(); ++p) {
        if (curve[p].k <= curve[p - 1].k) {
            throw InputError("curve must be in strictly ascending k");
        }
    }
    constexpr double tiny = 1e-12;
    for (std::size_t p = 0; p < curve.size(); ++p) {
        if (curve[p].wcd == 0.0) {
            return curve[p].k;
        }
        if (p + 1 < curve.size()) {
            const double improvement = (curve[p].wcd - curve[p + 1].wcd) / std::max(curve[p].wcd, tiny);
            if (improvement < epsilon) {
                return curve[p].k;
            }
        }
    }
    return curve.back().k;
}

} // namespace persona
