#pragma once

// Counterfactual journeys chosen among observed journeys, never synthesized:
//
//   cf = argmin over s_j != base of  loss(y_obj, y_j) + lambda * D'(base, s_j)
//
// with 0-1 loss on the candidate's observed label.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "journeymap/distance.hpp"
#include "journeymap/model.hpp"
#include "journeymap/prediction.hpp"

namespace journey {

enum class EditKind { substitute, insert, remove };

std::string_view to_string(EditKind kind);

struct EditOp {
    EditKind kind = EditKind::substitute;
    StageId stage = StageId::st1;
    /// 1-based position inside the stage projection at the moment the op is
    /// applied; ops are applied in list order.
    std::size_t stage_position = 0;
    /// 1-based position in the base journey the op refers to (for inserts,
    /// the base event the new item lands in front of).
    std::size_t position = 0;
    /// Base item for substitute/remove.
    std::optional<ItemCode> from;
    /// New item for substitute/insert.
    std::optional<ItemCode> to;

    /// "replace st1 item 2: c -> b" style text.
    std::string narrative() const;

    friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct EditScript {
    std::vector<EditOp> ops;

    std::size_t size() const noexcept { return ops.size(); }
    bool empty() const noexcept { return ops.empty(); }
    std::vector<std::string> narrative() const;
};

/// One minimal Levenshtein alignment per stage in `mask`, backtracked with
/// the preference substitute > delete > insert on cost ties. Items are
/// compared in canonical form, so i and j count as the same outcome.
EditScript edit_script(const Journey& base, const Journey& target, StageMask mask = StageMask::all());

/// Applies the ops of one stage to a projection. Throws Error(InvalidArgument)
/// when an op does not fit the sequence.
std::vector<ItemCode> apply_edits(std::vector<ItemCode> items, const EditScript& script, StageId stage);

struct CfQuery {
    Journey base;
    int y_obj = 1;
    double lambda = 1.0;
    /// Row of `base` in the dataset, excluded from the candidates. Looked up
    /// by id when absent.
    std::optional<std::size_t> base_index;
    /// Metric for D'; defaults to the model's pre-purchase metric.
    std::optional<DistanceConfig> metric;
};

struct CfResult {
    std::string base_id;
    Journey counterfactual;
    std::size_t index = 0;
    int y_obj = 1;
    double lambda = 0.0;
    double objective = 0.0;
    double distance = 0.0;
    double loss = 0.0;
    /// Model prediction for the counterfactual.
    double model_check = 0.0;
    EditScript edits;
    std::vector<std::string> warnings;
};

/// First dataset row whose item sequence equals `journey`, if any. Used to
/// exclude a literal query that duplicates a row.
std::optional<std::size_t> matching_row(const Dataset& dataset, const Journey& journey);

/// Exhaustive search. Ties on the objective go to the smaller distance, then
/// the lower dataset index. Throws Error(NoCandidates) when nothing but the
/// base is available and Error(InvalidArgument) for negative lambda or a
/// y_obj other than 0/1.
CfResult find_counterfactual(const Dataset& dataset, const KnnModel& model, const CfQuery& query);

/// Runs find_counterfactual for every journey whose observed label differs
/// from y_obj; sorted by objective, then dataset index of the base.
std::vector<CfResult> explain_batch(const Dataset& dataset, const KnnModel& model, int y_obj, double lambda);

}  // namespace journey
