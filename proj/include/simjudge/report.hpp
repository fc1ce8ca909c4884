#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simjudge/evaluation.hpp"

namespace simjudge {

// Dataset-by-model score grid in the layout of a published R^2 table:
// rows are (model, methodology), columns are datasets plus their mean.
struct ScoreRow {
    std::string model;
    std::string methodology;
    std::vector<std::optional<double>> scores;  // aligned with ScoresTable::datasets

    // Mean over the datasets that have a score.
    std::optional<double> mean() const;
};

struct ScoresTable {
    std::vector<std::string> datasets;
    std::vector<ScoreRow> rows;
};

// {"datasets": [...], "rows": [{"model", "methodology", "scores": {dataset: r2}}]}
// Any "mean" field in the input is ignored; means are always recomputed.
ScoresTable scores_from_json(std::string_view text);
std::string scores_to_json(const ScoresTable& table);

// Collects Raw, LT-Train and LT-CCV rows (in that order) from per-dataset
// reports; models keep their first-appearance order.
ScoresTable scores_from_reports(std::span<const EvalReport> reports);

// Markdown table; values rounded half away from zero to `precision` places.
std::string render_markdown(const ScoresTable& table, int precision = 2);

}  // namespace simjudge
