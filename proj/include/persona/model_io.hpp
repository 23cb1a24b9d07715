#ifndef PERSONA_MODEL_IO_HPP
#define PERSONA_MODEL_IO_HPP

#include <string>
#include <string_view>
#include <vector>

#include "persona/dataset.hpp"
#include "persona/kmodes.hpp"

namespace persona {

/// A fitted model as persisted by `fit`: assignments are keyed by row id.
struct ModelDocument {
    std::string schema;
    std::vector<std::string> attributes;
    std::vector<std::string> row_ids;
    ClusterModel model;
};

std::string emit_model(const ClusterModel& model, const CategoricalDataset& dataset, std::string_view schema);
ModelDocument parse_model(std::string_view document);

/**
 * Re-expresses the document's assignments in the dataset's row order.
 * Throws InputError when the attribute names or the row id sets differ.
 */
ClusterModel align_model(const ModelDocument& document, const CategoricalDataset& dataset);

} // namespace persona

#endif
