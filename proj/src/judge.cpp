#include "sciforge/judge.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <array>

#include "sciforge/errors.hpp"
#include "sciforge/util.hpp"

namespace sciforge {

namespace {

const std::array<std::string, 4> kAnswerCues = {
    "To sum up, the answer to this question is",
    "To sum up, the answer is",
    "Final answer:",
    "In summary,",
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

} // namespace

CueMatch find_answer_cue(const std::string& text) {
    // Last cue occurrence wins; on a shared start the longer cue wins.
    CueMatch best;
    for (const auto& cue : kAnswerCues) {
        std::size_t pos = text.rfind(cue);
        if (pos == std::string::npos) continue;
        if (!best.found || pos > best.pos || (pos == best.pos && cue.size() > best.len)) {
            best.found = true;
            best.pos = pos;
            best.len = cue.size();
        }
    }
    return best;
}

std::string extract_final_answer(const std::string& text) {
    if (util::trim(text).empty())
        throw Error(Errc::EmptyInput, "cannot extract an answer from empty text");

    CueMatch cue = find_answer_cue(text);
    if (cue.found) {
        std::size_t start = cue.pos + cue.len;
        while (start < text.size() && is_space(text[start])) ++start;
        if (start < text.size() && text[start] == ':') {
            ++start;
            while (start < text.size() && is_space(text[start])) ++start;
        }
        std::string tail = util::trim(text.substr(start));
        if (!tail.empty()) return tail;
        // Cue with nothing after it: fall through to the last-line rule.
    }

    std::string last_line;
    for (const auto& line : util::split_lines(text)) {
        std::string t = util::trim(line);
        if (!t.empty()) last_line = std::move(t);
    }
    return last_line;
}

namespace {

// Strips LaTeX decoration that carries no meaning for comparison.
std::string strip_latex(const std::string& raw) {
    std::string s;
    s.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size();) {
        char c = raw[i];
        if (c == '\\' && i + 1 < raw.size()) {
            char next = raw[i + 1];
            if (next == '(' || next == ')' || next == '[' || next == ']' || next == ',') {
                i += 2; // math delimiters and thin spaces vanish
                continue;
            }
            if (next == ';' || next == ' ') {
                s.push_back(' ');
                i += 2;
                continue;
            }
            s.push_back(c);
            s.push_back(next);
            i += 2;
            continue;
        }
        if (c == '$') {
            ++i;
            continue;
        }
        s.push_back(c);
        ++i;
    }
    // Unwrap \text{...} / \mathrm{...} to their contents.
    for (const char* macro : {"\\text{", "\\mathrm{"}) {
        std::size_t pos;
        while ((pos = s.find(macro)) != std::string::npos) {
            std::size_t open = pos + std::string_view(macro).size();
            std::size_t close = s.find('}', open);
            if (close == std::string::npos) break;
            s = s.substr(0, pos) + s.substr(open, close - open) + s.substr(close + 1);
        }
    }
    // Digit-group commas ("172,216") would otherwise split the number.
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == ',' && i > 0 && i + 1 < s.size() &&
            std::isdigit(static_cast<unsigned char>(s[i - 1])) &&
            std::isdigit(static_cast<unsigned char>(s[i + 1])))
            continue;
        out.push_back(s[i]);
    }
    return out;
}

std::string strip_trailing_punct(std::string s) {
    while (!s.empty() && (s.back() == '.' || s.back() == ',')) s.pop_back();
    return util::trim(s);
}

bool parse_leading_number(const std::string& s, double& value, std::size_t& consumed) {
    std::size_t i = 0;
    while (i < s.size() && is_space(s[i])) ++i;
    if (i >= s.size()) return false;
    char c = s[i];
    bool starts_numeric = std::isdigit(static_cast<unsigned char>(c)) ||
                          ((c == '+' || c == '-' || c == '.') && i + 1 < s.size() &&
                           (std::isdigit(static_cast<unsigned char>(s[i + 1])) ||
                            (s[i + 1] == '.' && i + 2 < s.size() &&
                             std::isdigit(static_cast<unsigned char>(s[i + 2])))));
    if (!starts_numeric) return false;
    const char* begin = s.c_str() + i;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || !std::isfinite(v)) return false;
    value = v;
    consumed = i + static_cast<std::size_t>(end - begin);
    return true;
}

} // namespace

Answer normalize_answer(const std::string& raw) {
    std::string s = strip_trailing_punct(util::trim(strip_latex(raw)));

    // Multiple-choice letter, possibly wrapped in punctuation: "(B)", "b.".
    {
        std::string_view v = s;
        auto is_wrap = [](char c) {
            return c == '(' || c == ')' || c == '[' || c == ']' || c == '.' || c == ',' ||
                   c == ':' || c == ';' || is_space(c);
        };
        while (!v.empty() && is_wrap(v.front())) v.remove_prefix(1);
        while (!v.empty() && is_wrap(v.back())) v.remove_suffix(1);
        if (v.size() == 1) {
            char u = static_cast<char>(std::toupper(static_cast<unsigned char>(v[0])));
            if (u >= 'A' && u <= 'D') {
                Answer a;
                a.kind = Answer::Kind::Choice;
                a.text = std::string(1, u);
                return a;
            }
        }
    }

    double value = 0.0;
    std::size_t consumed = 0;
    if (parse_leading_number(s, value, consumed)) {
        std::string rest = util::trim(s.substr(consumed));
        if (rest.empty()) {
            Answer a;
            a.kind = Answer::Kind::Numeric;
            a.number = value;
            return a;
        }
        // A single trailing token is a unit; anything more is an expression.
        bool single_token = rest.find_first_of(" \t\n\r") == std::string::npos;
        if (single_token) {
            Answer a;
            a.kind = Answer::Kind::Numeric;
            a.number = value;
            a.unit = strip_trailing_punct(rest);
            if (a.unit->empty()) a.unit.reset();
            return a;
        }
    }

    Answer a;
    a.kind = Answer::Kind::Symbolic;
    a.text = util::collapse_ws(s);
    return a;
}

JudgeVerdict rule_check(const std::string& candidate, const std::string& reference,
                        const RuleCheckOptions& opts) {
    Answer a = normalize_answer(candidate);
    Answer b = normalize_answer(reference);

    bool match = false;
    if (a.kind == b.kind) {
        switch (a.kind) {
        case Answer::Kind::Numeric: {
            double tol = std::max(opts.abs_tol, opts.rel_tol * std::fabs(b.number));
            match = std::fabs(a.number - b.number) <= tol;
            if (match && a.unit && b.unit) match = util::lower(*a.unit) == util::lower(*b.unit);
            break;
        }
        case Answer::Kind::Choice:
            match = a.text == b.text;
            break;
        case Answer::Kind::Symbolic:
            match = a.text == b.text;
            break;
        }
    }

    JudgeVerdict v;
    v.label = match ? Label::Correct : Label::Incorrect;
    v.judge = JudgeTier::RuleBased;
    return v;
}

bool needs_escalation(const std::string& candidate, const std::string& reference,
                      const RuleCheckOptions& opts) {
    if (rule_check(candidate, reference, opts).label == Label::Correct) return false;
    Answer a = normalize_answer(candidate);
    Answer b = normalize_answer(reference);
    return a.kind == Answer::Kind::Symbolic || b.kind == Answer::Kind::Symbolic;
}

} // namespace sciforge
