#include "simjudge/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "simjudge/errors.hpp"

namespace simjudge {

std::optional<double> ScoreRow::mean() const {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : scores) {
        if (s) {
            sum += *s;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

ScoresTable scores_from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        ScoresTable t;
        t.datasets = j.at("datasets").get<std::vector<std::string>>();
        for (const auto& jr : j.at("rows")) {
            ScoreRow row;
            row.model = jr.at("model").get<std::string>();
            row.methodology = jr.at("methodology").get<std::string>();
            const auto& scores = jr.at("scores");
            for (const auto& d : t.datasets) {
                if (scores.contains(d) && !scores[d].is_null()) {
                    row.scores.emplace_back(scores[d].get<double>());
                } else {
                    row.scores.emplace_back(std::nullopt);
                }
            }
            for (const auto& [key, _] : scores.items()) {
                if (std::find(t.datasets.begin(), t.datasets.end(), key) == t.datasets.end()) {
                    throw InputError("scores JSON: row '" + row.model + "' has unknown dataset '" +
                                     key + "'");
                }
            }
            t.rows.push_back(std::move(row));
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("scores JSON: ") + e.what());
    }
}

std::string scores_to_json(const ScoresTable& table) {
    nlohmann::ordered_json j;
    j["datasets"] = table.datasets;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json jr;
        jr["model"] = row.model;
        jr["methodology"] = row.methodology;
        nlohmann::ordered_json scores = nlohmann::ordered_json::object();
        for (std::size_t k = 0; k < table.datasets.size(); ++k) {
            if (row.scores[k]) scores[table.datasets[k]] = *row.scores[k];
        }
        jr["scores"] = std::move(scores);
        const auto m = row.mean();
        jr["mean"] = m ? nlohmann::ordered_json(*m) : nlohmann::ordered_json(nullptr);
        j["rows"].push_back(std::move(jr));
    }
    return j.dump(2) + "\n";
}

ScoresTable scores_from_reports(std::span<const EvalReport> reports) {
    ScoresTable t;
    std::vector<std::string> models;
    for (const auto& r : reports) {
        if (std::find(t.datasets.begin(), t.datasets.end(), r.dataset) != t.datasets.end()) {
            throw InputError("duplicate dataset '" + r.dataset + "' among reports");
        }
        t.datasets.push_back(r.dataset);
        for (const auto& e : r.entries) {
            if (std::find(models.begin(), models.end(), e.model) == models.end()) {
                models.push_back(e.model);
            }
        }
    }
    const char* methods[] = {"Raw", "LT-Train", "LT-CCV"};
    for (int m = 0; m < 3; ++m) {
        for (const auto& model : models) {
            ScoreRow row{model, methods[m], {}};
            for (const auto& r : reports) {
                const auto it = std::find_if(r.entries.begin(), r.entries.end(),
                                             [&](const EvalEntry& e) { return e.model == model; });
                if (it == r.entries.end()) {
                    row.scores.emplace_back(std::nullopt);
                } else {
                    const MethodScore& s = m == 0 ? it->raw : (m == 1 ? it->lt_train : it->lt_ccv);
                    row.scores.emplace_back(s.r2);
                }
            }
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

namespace {

std::string fixed(double value, int precision) {
    const double scale = std::pow(10.0, precision);
    double rounded = std::round(value * scale) / scale;
    if (rounded == 0.0) rounded = 0.0;  // no "-0.00"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, rounded);
    return buf;
}

std::string cell(const std::optional<double>& v, int precision) {
    return v ? fixed(*v, precision) : "-";
}

}  // namespace

std::string render_markdown(const ScoresTable& table, int precision) {
    std::string out = "| Model | Methodology |";
    for (const auto& d : table.datasets) out += " " + d + " |";
    out += " Mean R^2 |\n|:--|:--|";
    for (std::size_t k = 0; k < table.datasets.size(); ++k) out += "--:|";
    out += "--:|\n";
    for (const auto& row : table.rows) {
        out += "| " + row.model + " | " + row.methodology + " |";
        for (const auto& s : row.scores) out += " " + cell(s, precision) + " |";
        out += " " + cell(row.mean(), precision) + " |\n";
    }
    return out;
}

}  // namespace simjudge
