#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace simjudge {

struct DescriptionRecord {
    std::string participant_id;
    std::string image_id;
    std::size_t trial_index = 1;  // 1-based, unique per participant
    std::string text;
};

enum class QcRule {
    kTooFewWords,        // fewer than min_words whitespace-separated words
    kTooFewUniqueWords,  // fewer than min_unique distinct case-folded words
    kBannedPrefix,       // starts with "there is" / "there are"
    kTooShort,           // fewer than min_chars characters after trimming
};

std::string_view to_string(QcRule rule);

struct ValidationOptions {
    std::size_t min_words = 5;
    std::size_t min_unique_words = 4;
    // Stand-in for discarding "random or very poor quality strings";
    // 0 disables the check.
    std::size_t min_chars = 10;
};

// Every rule the text violates (empty when it passes). Words are maximal
// non-whitespace runs; punctuation is kept.
std::vector<QcRule> validate_description(std::string_view text, const ValidationOptions& options = {});

// Edit distance over Unicode scalar values (insert, delete, substitute).
std::size_t levenshtein(std::string_view a, std::string_view b);

// levenshtein / max(length) in [0, 1]; 0 for two empty strings.
double normalized_levenshtein(std::string_view a, std::string_view b);

struct ScreenOptions {
    double threshold = 0.2;
    std::size_t min_trials = 5;
};

struct ScreenVerdict {
    bool excluded = false;
    std::optional<std::size_t> trigger_trial;     // trial_index of the triggering record
    std::optional<std::size_t> trigger_position;  // its 0-based position
    // Mean normalised distance to all earlier responses, per position; empty
    // until the first checked trial.
    std::vector<std::optional<double>> mean_distance;
};

// One participant's records sorted by trial_index. From response
// min_trials + 1 onward, the mean normalised distance to every earlier
// response is compared with the threshold; the first value below it excludes
// the participant from that response on.
ScreenVerdict repetition_screen(std::span<const DescriptionRecord> records,
                                const ScreenOptions& options = {});

struct PooledDescriptions {
    // Texts per image ordered by (participant_id, trial_index).
    std::map<std::string, std::vector<std::string>> texts;
    // Images from `all_images` without any accepted description.
    std::vector<std::string> empty_images;
};

PooledDescriptions pool_descriptions(std::span<const DescriptionRecord> accepted,
                                     std::span<const std::string> all_images = {});

struct RecordVerdict {
    std::vector<QcRule> violations;
    bool excluded = false;  // participant excluded at or before this trial
    bool accepted() const { return violations.empty() && !excluded; }
};

struct ParticipantVerdict {
    std::string participant_id;
    std::size_t records = 0;
    bool excluded = false;
    std::optional<std::size_t> trigger_trial;
};

struct QcReport {
    std::vector<DescriptionRecord> records;  // input order
    std::vector<RecordVerdict> verdicts;     // parallel to records
    std::vector<ParticipantVerdict> participants;
    std::map<std::string, std::size_t> accepted_per_image;  // every image seen, possibly 0

    std::vector<DescriptionRecord> accepted() const;
};

QcReport run_qc(std::vector<DescriptionRecord> records, const ValidationOptions& validation = {},
                const ScreenOptions& screen = {});

// CSV with header "participant_id,image_id,trial_index,text" (RFC-4180).
// Throws InputError naming a missing column, a bad trial_index or a repeated
// (participant, trial_index).
std::vector<DescriptionRecord> parse_descriptions_csv(std::string_view text);
std::string write_descriptions_csv(std::span<const DescriptionRecord> records);

std::string qc_report_to_json(const QcReport& report);

}  // namespace simjudge
