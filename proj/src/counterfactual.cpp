#include "journeymap/counterfactual.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "journeymap/error.hpp"

namespace journey {

namespace {

enum class Step { match, substitute, remove, insert };

struct AlignStep {
    Step step;
    std::size_t base_index;    // into the base projection
    std::size_t target_index;  // into the target projection
};

std::vector<AlignStep> align(const std::vector<ItemCode>& base, const std::vector<ItemCode>& target) {
    const std::size_t n = base.size();
    const std::size_t m = target.size();
    std::vector<std::size_t> dp((n + 1) * (m + 1));
    auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return dp[i * (m + 1) + j]; };
    auto same = [&](std::size_t i, std::size_t j) {
        return canonical_symbol(base[i]) == canonical_symbol(target[j]);
    };
    for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
    for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= m; ++j)
            at(i, j) = std::min({at(i - 1, j - 1) + (same(i - 1, j - 1) ? 0 : 1), at(i - 1, j) + 1, at(i, j - 1) + 1});

    std::vector<AlignStep> steps;
    std::size_t i = n, j = m;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0) {
            const bool eq = same(i - 1, j - 1);
            if (at(i, j) == at(i - 1, j - 1) + (eq ? 0 : 1)) {
                steps.push_back({eq ? Step::match : Step::substitute, i - 1, j - 1});
                --i;
                --j;
                continue;
            }
        }
        if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
            steps.push_back({Step::remove, i - 1, j});
            --i;
        } else {
            steps.push_back({Step::insert, i, j - 1});
            --j;
        }
    }
    std::reverse(steps.begin(), steps.end());
    return steps;
}

/// 1-based journey positions of the events of one stage.
std::vector<std::size_t> stage_positions(const Journey& j, StageId stage) {
    std::vector<std::size_t> out;
    const auto events = j.events();
    for (std::size_t p = 0; p < events.size(); ++p) {
        if (events[p].stage() == stage) out.push_back(p + 1);
    }
    return out;
}

std::size_t insertion_position(const Journey& base, const std::vector<std::size_t>& positions, StageId stage,
                               std::size_t next_base) {
    if (next_base < positions.size()) return positions[next_base];
    if (!positions.empty()) return positions.back() + 1;
    const auto events = base.events();
    for (std::size_t p = 0; p < events.size(); ++p) {
        if (events[p].stage() > stage) return p + 1;
    }
    return events.size() + 1;
}

}  // namespace

std::string_view to_string(EditKind kind) {
    switch (kind) {
        case EditKind::substitute: return "substitute";
        case EditKind::insert: return "insert";
        case EditKind::remove: return "delete";
    }
    return "?";
}

std::string EditOp::narrative() const {
    const std::string where = std::string(journey::to_string(stage)) + " item " + std::to_string(stage_position);
    switch (kind) {
        case EditKind::substitute:
            return "replace " + where + ": " + to_char(*from) + " → " + to_char(*to);
        case EditKind::insert: return "insert " + where + ": " + to_char(*to);
        case EditKind::remove: return "delete " + where + ": " + to_char(*from);
    }
    return {};
}

std::vector<std::string> EditScript::narrative() const {
    std::vector<std::string> out;
    for (const auto& op : ops) out.push_back(op.narrative());
    return out;
}

EditScript edit_script(const Journey& base, const Journey& target, StageMask mask) {
    EditScript script;
    for (auto stage : kAllStages) {
        if (!mask.contains(stage)) continue;
        const auto from = project(base, stage).items;
        const auto to = project(target, stage).items;
        const auto positions = stage_positions(base, stage);
        std::size_t produced = 0;
        for (const auto& s : align(from, to)) {
            EditOp op;
            op.stage = stage;
            op.stage_position = produced + 1;
            switch (s.step) {
                case Step::match:
                    ++produced;
                    continue;
                case Step::substitute:
                    op.kind = EditKind::substitute;
                    op.position = positions[s.base_index];
                    op.from = from[s.base_index];
                    op.to = to[s.target_index];
                    ++produced;
                    break;
                case Step::remove:
                    op.kind = EditKind::remove;
                    op.position = positions[s.base_index];
                    op.from = from[s.base_index];
                    break;
                case Step::insert:
                    op.kind = EditKind::insert;
                    op.position = insertion_position(base, positions, stage, s.base_index);
                    op.to = to[s.target_index];
                    ++produced;
                    break;
            }
            script.ops.push_back(op);
        }
    }
    return script;
}

std::vector<ItemCode> apply_edits(std::vector<ItemCode> items, const EditScript& script, StageId stage) {
    for (const auto& op : script.ops) {
        if (op.stage != stage) continue;
        const auto idx = op.stage_position - 1;
        const auto bad = [&] {
            throw Error(ErrorCode::InvalidArgument, "edit '" + op.narrative() + "' does not fit the sequence");
        };
        switch (op.kind) {
            case EditKind::substitute:
                if (op.stage_position == 0 || idx >= items.size() || items[idx] != op.from) bad();
                items[idx] = *op.to;
                break;
            case EditKind::remove:
                if (op.stage_position == 0 || idx >= items.size() || items[idx] != op.from) bad();
                items.erase(items.begin() + static_cast<std::ptrdiff_t>(idx));
                break;
            case EditKind::insert:
                if (op.stage_position == 0 || idx > items.size()) bad();
                items.insert(items.begin() + static_cast<std::ptrdiff_t>(idx), *op.to);
                break;
        }
    }
    return items;
}

std::optional<std::size_t> matching_row(const Dataset& dataset, const Journey& journey) {
    const auto items = journey.items();
    for (std::size_t j = 0; j < dataset.size(); ++j) {
        if (dataset[j].items() == items) return j;
    }
    return std::nullopt;
}

CfResult find_counterfactual(const Dataset& dataset, const KnnModel& model, const CfQuery& query) {
    if (query.y_obj != 0 && query.y_obj != 1) throw Error(ErrorCode::InvalidArgument, "y_obj must be 0 or 1");
    if (!(query.lambda >= 0.0) || !std::isfinite(query.lambda)) {
        throw Error(ErrorCode::InvalidArgument, "lambda must be a finite non-negative number");
    }
    const DistanceConfig metric = query.metric.value_or(model.config());
    metric.validate();
    const auto base_index = query.base_index ? query.base_index : dataset.find(query.base.id());

    std::optional<std::size_t> best;
    std::tuple<double, double, std::size_t> best_key;
    double best_loss = 0.0;
    for (std::size_t j = 0; j < dataset.size(); ++j) {
        if (base_index && *base_index == j) continue;
        const double distance = staged_distance(query.base, dataset[j], metric);
        const double loss = *dataset[j].label() == query.y_obj ? 0.0 : 1.0;
        const std::tuple<double, double, std::size_t> key{loss + query.lambda * distance, distance, j};
        if (!best || key < best_key) {
            best = j;
            best_key = key;
            best_loss = loss;
        }
    }
    if (!best) throw Error(ErrorCode::NoCandidates, "no journey other than the base is available");

    CfResult result{.base_id = query.base.id(), .counterfactual = dataset[*best], .edits = {}, .warnings = {}};
    result.index = *best;
    result.y_obj = query.y_obj;
    result.lambda = query.lambda;
    result.objective = std::get<0>(best_key);
    result.distance = std::get<1>(best_key);
    result.loss = best_loss;
    result.model_check = model.predict_value(result.counterfactual);
    result.edits = edit_script(query.base, result.counterfactual, metric.mask);

    if (query.base.label() && *query.base.label() == query.y_obj) {
        result.warnings.emplace_back("base journey already has the requested outcome");
    }
    if (best_loss > 0.0) {
        result.warnings.emplace_back("selected journey does not have the requested outcome");
    }
    if ((result.model_check >= 0.5 ? 1 : 0) != query.y_obj) {
        result.warnings.emplace_back("model prediction for the counterfactual differs from the requested outcome");
    }
    return result;
}

std::vector<CfResult> explain_batch(const Dataset& dataset, const KnnModel& model, int y_obj, double lambda) {
    std::vector<std::pair<std::size_t, CfResult>> found;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (*dataset[i].label() == y_obj) continue;
        CfQuery q{.base = dataset[i], .y_obj = y_obj, .lambda = lambda, .base_index = i, .metric = std::nullopt};
        found.emplace_back(i, find_counterfactual(dataset, model, q));
    }
    std::stable_sort(found.begin(), found.end(),
                     [](const auto& a, const auto& b) { return a.second.objective < b.second.objective; });
    std::vector<CfResult> out;
    for (auto& f : found) out.push_back(std::move(f.second));
    return out;
}

}  // namespace journey
