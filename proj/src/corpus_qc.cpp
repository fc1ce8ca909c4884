#include "simjudge/corpus_qc.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "simjudge/csv.hpp"
#include "simjudge/errors.hpp"
#include "simjudge/unicode.hpp"

namespace simjudge {

std::string_view to_string(QcRule rule) {
    switch (rule) {
        case QcRule::kTooFewWords: return "too_few_words";
        case QcRule::kTooFewUniqueWords: return "too_few_unique_words";
        case QcRule::kBannedPrefix: return "banned_prefix";
        case QcRule::kTooShort: return "too_short";
    }
    return "unknown";
}

namespace {

std::u32string_view trim(std::u32string_view s) {
    while (!s.empty() && unicode::is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && unicode::is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::u32string> words_of(std::u32string_view s) {
    std::vector<std::u32string> words;
    std::u32string cur;
    for (char32_t c : s) {
        if (unicode::is_space(c)) {
            if (!cur.empty()) words.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

bool is_letter_like(char32_t c) {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9') ||
           c == U'_' || c >= 0x80;
}

bool has_banned_prefix(std::u32string_view folded) {
    for (std::u32string_view prefix : {std::u32string_view(U"there is"), std::u32string_view(U"there are")}) {
        if (folded.size() >= prefix.size() && folded.substr(0, prefix.size()) == prefix &&
            (folded.size() == prefix.size() || !is_letter_like(folded[prefix.size()]))) {
            return true;
        }
    }
    // "There  is" with other whitespace between the two words.
    const auto words = words_of(folded);
    if (words.size() >= 2 && words[0] == U"there") {
        std::u32string_view second = words[1];
        for (std::u32string_view verb : {std::u32string_view(U"is"), std::u32string_view(U"are")}) {
            if (second.substr(0, verb.size()) == verb &&
                (second.size() == verb.size() || !is_letter_like(second[verb.size()]))) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

std::vector<QcRule> validate_description(std::string_view text, const ValidationOptions& options) {
    const auto decoded = unicode::decode(text);
    const auto trimmed = trim(decoded);
    const auto folded = unicode::fold(trimmed);
    const auto words = words_of(folded);

    std::vector<QcRule> out;
    if (words.size() < options.min_words) out.push_back(QcRule::kTooFewWords);
    const std::set<std::u32string> unique(words.begin(), words.end());
    if (unique.size() < options.min_unique_words) out.push_back(QcRule::kTooFewUniqueWords);
    if (has_banned_prefix(folded)) out.push_back(QcRule::kBannedPrefix);
    if (options.min_chars > 0 && trimmed.size() < options.min_chars) out.push_back(QcRule::kTooShort);
    return out;
}

namespace {

std::size_t edit_distance(const std::u32string& a, const std::u32string& b) {
    const std::u32string& s = a.size() < b.size() ? b : a;
    const std::u32string& t = a.size() < b.size() ? a : b;
    std::vector<std::size_t> row(t.size() + 1);
    for (std::size_t j = 0; j <= t.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= s.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= t.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (s[i - 1] == t[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[t.size()];
}

double normalized(const std::u32string& a, const std::u32string& b) {
    const auto longest = std::max(a.size(), b.size());
    if (longest == 0) return 0.0;
    return static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

}  // namespace

std::size_t levenshtein(std::string_view a, std::string_view b) {
    return edit_distance(unicode::decode(a), unicode::decode(b));
}

double normalized_levenshtein(std::string_view a, std::string_view b) {
    return normalized(unicode::decode(a), unicode::decode(b));
}

ScreenVerdict repetition_screen(std::span<const DescriptionRecord> records, const ScreenOptions& options) {
    ScreenVerdict verdict;
    verdict.mean_distance.assign(records.size(), std::nullopt);
    std::vector<std::u32string> texts;
    texts.reserve(records.size());
    for (const auto& r : records) texts.push_back(unicode::decode(r.text));

    for (std::size_t pos = options.min_trials; pos < records.size(); ++pos) {
        double sum = 0.0;
        for (std::size_t prev = 0; prev < pos; ++prev) sum += normalized(texts[pos], texts[prev]);
        const double mean = sum / static_cast<double>(pos);
        verdict.mean_distance[pos] = mean;
        if (mean < options.threshold) {
            verdict.excluded = true;
            verdict.trigger_position = pos;
            verdict.trigger_trial = records[pos].trial_index;
            break;
        }
    }
    return verdict;
}

PooledDescriptions pool_descriptions(std::span<const DescriptionRecord> accepted,
                                     std::span<const std::string> all_images) {
    std::vector<const DescriptionRecord*> sorted;
    for (const auto& r : accepted) sorted.push_back(&r);
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
        if (a->participant_id != b->participant_id) return a->participant_id < b->participant_id;
        return a->trial_index < b->trial_index;
    });
    PooledDescriptions out;
    for (const auto* r : sorted) out.texts[r->image_id].push_back(r->text);
    for (const auto& image : all_images) {
        if (!out.texts.contains(image) &&
            std::find(out.empty_images.begin(), out.empty_images.end(), image) == out.empty_images.end()) {
            out.empty_images.push_back(image);
        }
    }
    return out;
}

std::vector<DescriptionRecord> QcReport::accepted() const {
    std::vector<DescriptionRecord> out;
    for (std::size_t k = 0; k < records.size(); ++k) {
        if (verdicts[k].accepted()) out.push_back(records[k]);
    }
    return out;
}

QcReport run_qc(std::vector<DescriptionRecord> records, const ValidationOptions& validation,
                const ScreenOptions& screen) {
    QcReport report;
    report.records = std::move(records);
    report.verdicts.resize(report.records.size());
    for (std::size_t k = 0; k < report.records.size(); ++k) {
        report.verdicts[k].violations = validate_description(report.records[k].text, validation);
        report.accepted_per_image.emplace(report.records[k].image_id, 0);
    }

    // Group by participant in first-appearance order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> by_participant;
    for (std::size_t k = 0; k < report.records.size(); ++k) {
        auto [it, inserted] = by_participant.try_emplace(report.records[k].participant_id);
        if (inserted) order.push_back(report.records[k].participant_id);
        it->second.push_back(k);
    }
    for (const auto& pid : order) {
        auto idx = by_participant[pid];
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return report.records[a].trial_index < report.records[b].trial_index;
        });
        std::vector<DescriptionRecord> sorted;
        for (auto k : idx) sorted.push_back(report.records[k]);
        const auto v = repetition_screen(sorted, screen);
        ParticipantVerdict pv{pid, idx.size(), v.excluded, v.trigger_trial};
        if (v.excluded) {
            for (std::size_t p = *v.trigger_position; p < idx.size(); ++p) {
                report.verdicts[idx[p]].excluded = true;
            }
        }
        report.participants.push_back(std::move(pv));
    }
    for (std::size_t k = 0; k < report.records.size(); ++k) {
        if (report.verdicts[k].accepted()) ++report.accepted_per_image[report.records[k].image_id];
    }
    return report;
}

std::vector<DescriptionRecord> parse_descriptions_csv(std::string_view text) {
    const auto table = csv::parse(text);
    std::vector<DescriptionRecord> out;
    if (table.header.empty()) return out;
    const auto cols =
        csv::require_columns(table.header, {"participant_id", "image_id", "trial_index", "text"});
    std::set<std::pair<std::string, std::size_t>> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto where = "descriptions line " + std::to_string(table.lines[r]);
        DescriptionRecord rec;
        rec.participant_id = row[cols[0]];
        rec.image_id = row[cols[1]];
        const auto& trial = row[cols[2]];
        if (rec.participant_id.empty() || rec.image_id.empty()) {
            throw InputError(where + ": empty participant_id or image_id");
        }
        if (trial.empty() || trial.size() > 9 ||
            !std::all_of(trial.begin(), trial.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            throw InputError(where + ": invalid trial_index '" + trial + "'");
        }
        rec.trial_index = std::stoul(trial);
        if (rec.trial_index == 0) throw InputError(where + ": trial_index must be >= 1");
        if (!seen.emplace(rec.participant_id, rec.trial_index).second) {
            throw InputError(where + ": repeated trial_index " + trial + " for participant '" +
                             rec.participant_id + "'");
        }
        rec.text = row[cols[3]];
        out.push_back(std::move(rec));
    }
    return out;
}

std::string write_descriptions_csv(std::span<const DescriptionRecord> records) {
    std::string out = "participant_id,image_id,trial_index,text\n";
    for (const auto& r : records) {
        out += csv::join_row({r.participant_id, r.image_id, std::to_string(r.trial_index), r.text});
        out.push_back('\n');
    }
    return out;
}

std::string qc_report_to_json(const QcReport& report) {
    nlohmann::ordered_json j;
    std::size_t accepted = 0;
    for (const auto& v : report.verdicts) accepted += v.accepted() ? 1 : 0;
    j["summary"] = {{"records", report.records.size()},
                    {"accepted", accepted},
                    {"participants", report.participants.size()},
                    {"excluded_participants",
                     std::count_if(report.participants.begin(), report.participants.end(),
                                   [](const auto& p) { return p.excluded; })}};
    auto participants = nlohmann::ordered_json::array();
    for (const auto& p : report.participants) {
        nlohmann::ordered_json jp;
        jp["participant_id"] = p.participant_id;
        jp["records"] = p.records;
        jp["excluded"] = p.excluded;
        jp["trigger_trial"] = p.trigger_trial ? nlohmann::ordered_json(*p.trigger_trial)
                                              : nlohmann::ordered_json(nullptr);
        participants.push_back(std::move(jp));
    }
    j["participants"] = std::move(participants);
    j["accepted_per_image"] = nlohmann::ordered_json::object();
    for (const auto& [image, count] : report.accepted_per_image) j["accepted_per_image"][image] = count;
    auto records = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < report.records.size(); ++k) {
        const auto& r = report.records[k];
        const auto& v = report.verdicts[k];
        nlohmann::ordered_json jr;
        jr["participant_id"] = r.participant_id;
        jr["image_id"] = r.image_id;
        jr["trial_index"] = r.trial_index;
        jr["accepted"] = v.accepted();
        jr["excluded"] = v.excluded;
        auto rules = nlohmann::ordered_json::array();
        for (auto rule : v.violations) rules.push_back(std::string(to_string(rule)));
        jr["violations"] = std::move(rules);
        records.push_back(std::move(jr));
    }
    j["records"] = std::move(records);
    return j.dump(2) + "\n";
}

}  // namespace simjudge
