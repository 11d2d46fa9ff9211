#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sciforge/judge.hpp"

namespace sciforge {

struct EvalItem {
    std::string id;
    std::string task;            // benchmark the item belongs to
    std::string body;
    bool multiple_choice = false;
    std::string gold;            // letter for multiple choice, answer text otherwise
};

void to_json(json& j, const EvalItem& item);
void from_json(const json& j, EvalItem& item);

// Reads the chosen option out of a multiple-choice response: after the last
// "the answer is" / "answer:" cue, the first standalone uppercase letter
// A-D (standalone = not embedded in a word, so the B in "Boron" never
// counts). With no cue, accepts a final line that is just one letter.
// Returns nullopt when no choice can be read.
std::optional<char> extract_choice(const std::string& response);

// Scores one response against the gold answer: by letter for multiple
// choice, by the rule-based answer check otherwise. Unreadable or empty
// responses score false.
bool score_item(const EvalItem& item, const std::string& response,
                const RuleCheckOptions& opts = {});

struct TaskScore {
    std::uint64_t n = 0;
    std::uint64_t correct = 0;
    double accuracy() const {
        return n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(n);
    }
};

struct EvalReport {
    std::map<std::string, TaskScore> tasks;
    std::map<std::string, TaskScore> groups; // n/correct summed over member tasks

    nlohmann::json to_json() const;
    std::string format_table() const;
};

// Scores every item and aggregates per task, then per group. A group's
// accuracy is the item-weighted average of its tasks: total correct over
// total n. Groups naming an unknown task, or whose tasks hold no items,
// throw Error(EmptyTask). Aggregation is order-invariant in both items and
// responses.
EvalReport evaluate(const std::vector<EvalItem>& items,
                    const std::map<std::string, std::string>& responses_by_id,
                    const std::map<std::string, std::vector<std::string>>& groups,
                    const RuleCheckOptions& opts = {});

} // namespace sciforge
