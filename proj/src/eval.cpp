#include "sciforge/eval.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "sciforge/errors.hpp"
#include "sciforge/util.hpp"

namespace sciforge {

void to_json(json& j, const EvalItem& item) {
    j = json{{"id", item.id},
             {"task", item.task},
             {"body", item.body},
             {"kind", item.multiple_choice ? "multiple_choice" : "open"},
             {"gold", item.gold}};
}

void from_json(const json& j, EvalItem& item) {
    item.id = j.at("id").get<std::string>();
    item.task = j.at("task").get<std::string>();
    item.body = j.value("body", std::string());
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "multiple_choice") {
        item.multiple_choice = true;
    } else if (kind == "open") {
        item.multiple_choice = false;
    } else {
        throw Error(Errc::InvalidArgument, "unknown eval item kind: \"" + kind + "\"");
    }
    item.gold = j.at("gold").get<std::string>();
}

namespace {
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// First A-D at or after `from` that is a word of its own.
std::optional<char> first_standalone_letter(const std::string& text, std::size_t from) {
    for (std::size_t i = from; i < text.size(); ++i) {
        char c = text[i];
        if (c < 'A' || c > 'D') continue;
        bool left_ok = i == 0 || !is_alnum(text[i - 1]);
        bool right_ok = i + 1 >= text.size() || !is_alnum(text[i + 1]);
        if (left_ok && right_ok) return c;
    }
    return std::nullopt;
}
} // namespace

std::optional<char> extract_choice(const std::string& response) {
    const std::string low = util::lower(response);
    std::size_t cue_end = std::string::npos;
    for (const char* cue : {"the answer is", "answer:"}) {
        std::size_t pos = low.rfind(cue);
        if (pos == std::string::npos) continue;
        std::size_t end = pos + std::string_view(cue).size();
        if (cue_end == std::string::npos || end > cue_end) cue_end = end;
    }
    if (cue_end != std::string::npos) {
        if (auto letter = first_standalone_letter(response, cue_end)) return letter;
    }

    // Fallback: a final line that is just the letter, in either case.
    std::string last_line;
    for (const auto& line : util::split_lines(response)) {
        std::string t = util::trim(line);
        if (!t.empty()) last_line = std::move(t);
    }
    while (!last_line.empty() &&
           (last_line.back() == '.' || last_line.back() == ')' || last_line.back() == ':' ||
            last_line.back() == ','))
        last_line.pop_back();
    while (!last_line.empty() && (last_line.front() == '(' || last_line.front() == '['))
        last_line.erase(last_line.begin());
    if (last_line.size() == 1) {
        char u = static_cast<char>(std::toupper(static_cast<unsigned char>(last_line[0])));
        if (u >= 'A' && u <= 'D') return u;
    }
    return std::nullopt;
}

bool score_item(const EvalItem& item, const std::string& response, const RuleCheckOptions& opts) {
    if (item.multiple_choice) {
        auto choice = extract_choice(response);
        if (!choice) return false;
        std::string gold = util::trim(item.gold);
        return !gold.empty() &&
               *choice == static_cast<char>(std::toupper(static_cast<unsigned char>(gold[0])));
    }
    try {
        return rule_check(extract_final_answer(response), item.gold, opts).label ==
               Label::Correct;
    } catch (const Error& e) {
        if (e.code() == Errc::EmptyInput) return false;
        throw;
    }
}

EvalReport evaluate(const std::vector<EvalItem>& items,
                    const std::map<std::string, std::string>& responses_by_id,
                    const std::map<std::string, std::vector<std::string>>& groups,
                    const RuleCheckOptions& opts) {
    EvalReport report;
    for (const auto& item : items) {
        auto it = responses_by_id.find(item.id);
        const std::string response = it == responses_by_id.end() ? std::string() : it->second;
        TaskScore& t = report.tasks[item.task];
        ++t.n;
        if (score_item(item, response, opts)) ++t.correct;
    }

    for (const auto& [name, members] : groups) {
        TaskScore g;
        for (const auto& task : members) {
            auto it = report.tasks.find(task);
            if (it == report.tasks.end())
                throw Error(Errc::EmptyTask,
                            "group \"" + name + "\" references task \"" + task +
                                "\" which has no items");
            g.n += it->second.n;
            g.correct += it->second.correct;
        }
        if (g.n == 0)
            throw Error(Errc::EmptyTask, "group \"" + name + "\" spans no items");
        report.groups[name] = g;
    }
    return report;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json jt = nlohmann::json::object();
    for (const auto& [name, t] : tasks)
        jt[name] = {{"n", t.n}, {"correct", t.correct}, {"accuracy", t.accuracy()}};
    nlohmann::json jg = nlohmann::json::object();
    for (const auto& [name, g] : groups)
        jg[name] = {{"n", g.n}, {"correct", g.correct}, {"accuracy", g.accuracy()}};
    return nlohmann::json{{"tasks", jt}, {"groups", jg}};
}

std::string EvalReport::format_table() const {
    std::vector<std::array<std::string, 4>> rows;
    rows.push_back({"Task", "n", "Correct", "Accuracy"});
    auto add_rows = [&](const std::map<std::string, TaskScore>& section, bool mark_group) {
        for (const auto& [name, t] : section) {
            char acc[32];
            std::snprintf(acc, sizeof acc, "%.4f", t.accuracy());
            rows.push_back({mark_group ? "Avg. " + name : name,
                            with_thousands_separators(t.n),
                            with_thousands_separators(t.correct), acc});
        }
    };
    add_rows(tasks, false);
    add_rows(groups, true);

    std::array<std::size_t, 4> widths{};
    for (const auto& row : rows)
        for (std::size_t i = 0; i < 4; ++i) widths[i] = std::max(widths[i], row[i].size());

    std::ostringstream out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out << '|';
        for (std::size_t i = 0; i < 4; ++i)
            out << ' ' << rows[r][i] << std::string(widths[i] - rows[r][i].size(), ' ') << " |";
        out << '\n';
        if (r == 0) {
            out << '|';
            for (std::size_t i = 0; i < 4; ++i) out << std::string(widths[i] + 2, '-') << '|';
            out << '\n';
        }
    }
    return out.str();
}

} // namespace sciforge
