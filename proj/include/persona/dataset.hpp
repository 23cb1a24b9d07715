#ifndef PERSONA_DATASET_HPP
#define PERSONA_DATASET_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace persona {

enum class AttributeKind { categorical, numeric };

/// Category codes are small non-negative integers.
using CategoryCode = int;

struct AttributeSpec {
    std::size_t index = 0;
    AttributeKind kind = AttributeKind::categorical;
    /// Allowed codes for a categorical attribute, in dictionary order. Empty for numeric.
    std::vector<CategoryCode> categories;
    std::string name;

    bool is_categorical() const { return kind == AttributeKind::categorical; }
    bool is_numeric() const { return kind == AttributeKind::numeric; }
};

/**
 * One observation. Categorical slots hold a category code stored as a
 * double (codes are small integers and therefore exact); numeric slots
 * hold the finite real value.
 */
struct Record {
    std::vector<double> values;
    std::string row_id;
};

/// A cluster representative: mode codes for categorical slots, means for numeric ones.
struct Prototype {
    std::vector<double> values;
    std::size_t cluster_index = 0;

    friend bool operator==(const Prototype&, const Prototype&) = default;
};

inline CategoryCode as_code(double value) {
    return static_cast<CategoryCode>(value);
}

struct CategoricalDataset {
    std::vector<AttributeSpec> attrs;
    std::vector<Record> rows;

    std::size_t n() const { return rows.size(); }
    std::size_t m() const { return attrs.size(); }

    /**
     * Checks every documented invariant: unique attribute indices, distinct
     * category dictionaries, aligned rows, categorical values present in
     * their dictionary, finite numeric values. Throws AlignmentError or
     * InputError on the first violation.
     */
    void validate() const;
};

/**
 * Builds a purely categorical dataset from string-valued cells. Codes are
 * dense non-negative integers assigned per attribute in order of first
 * appearance, so two inputs that differ only by relabelling encode to the
 * same dataset.
 */
CategoricalDataset encode_categorical(const std::vector<std::string>& names,
                                      const std::vector<std::vector<std::string>>& cells,
                                      const std::vector<std::string>& row_ids);

/// Convenience builder for tests and tools: every attribute categorical with the
/// dictionary formed by the sorted distinct codes observed.
CategoricalDataset make_categorical(const std::vector<std::vector<CategoryCode>>& rows);

} // namespace persona

#endif
