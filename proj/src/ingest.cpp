#include "sciforge/ingest.hpp"

#include <cstdio>
#include <unordered_set>

#include "sciforge/errors.hpp"
#include "sciforge/util.hpp"

namespace sciforge {

std::vector<QuestionRecord> parse_corpus(const std::string& text) {
    std::vector<QuestionRecord> records;
    std::unordered_set<std::string> seen_ids;
    std::vector<std::string> lines = util::split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const long long line_no = static_cast<long long>(i) + 1;
        if (util::trim(lines[i]).empty()) continue;
        json j;
        try {
            j = json::parse(lines[i]);
        } catch (const json::exception& e) {
            throw Error(Errc::MalformedLine,
                        "line " + std::to_string(line_no) + ": invalid JSON: " + e.what(),
                        line_no);
        }
        QuestionRecord rec;
        try {
            rec = j.get<QuestionRecord>();
        } catch (const Error&) {
            throw; // UnknownSubject carries its own context
        } catch (const json::exception& e) {
            throw Error(Errc::MalformedLine,
                        "line " + std::to_string(line_no) + ": bad record: " + e.what(), line_no);
        }
        if (rec.id.empty())
            throw Error(Errc::MalformedLine, "line " + std::to_string(line_no) + ": empty id",
                        line_no);
        if (util::trim(rec.body).empty())
            throw Error(Errc::MalformedLine, "line " + std::to_string(line_no) + ": empty body",
                        line_no);
        if (!seen_ids.insert(rec.id).second)
            throw Error(Errc::DuplicateId,
                        "line " + std::to_string(line_no) + ": duplicate id \"" + rec.id + "\"",
                        line_no);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<QuestionRecord> load_corpus(const std::string& path) {
    return parse_corpus(util::read_file(path));
}

std::vector<Defect> validate_latex(const std::string& body) {
    if (util::trim(body).empty())
        return {Defect{DefectKind::EmptyBody, 0, "body is empty"}};

    std::vector<Defect> defects;
    // (environment name, byte offset of its \begin)
    std::vector<std::pair<std::string, std::size_t>> env_stack;
    bool in_inline = false, in_display = false;
    std::size_t inline_open = 0, display_open = 0;

    const std::size_t n = body.size();
    std::size_t i = 0;
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(body[i]);

        if (c == '\\') {
            if (body.compare(i + 1, 6, "begin{") == 0) {
                std::size_t close = body.find('}', i + 7);
                if (close != std::string::npos) {
                    env_stack.emplace_back(body.substr(i + 7, close - (i + 7)), i);
                    i = close + 1;
                    continue;
                }
            } else if (body.compare(i + 1, 4, "end{") == 0) {
                std::size_t close = body.find('}', i + 5);
                if (close != std::string::npos) {
                    std::string name = body.substr(i + 5, close - (i + 5));
                    if (env_stack.empty()) {
                        defects.push_back({DefectKind::MismatchedEnvironment, i,
                                           "\\end{" + name + "} without open environment"});
                    } else if (env_stack.back().first != name) {
                        defects.push_back({DefectKind::MismatchedEnvironment, i,
                                           "\\end{" + name + "} closes \\begin{" +
                                               env_stack.back().first + "}"});
                        env_stack.pop_back();
                    } else {
                        env_stack.pop_back();
                    }
                    i = close + 1;
                    continue;
                }
            }
            i += 2; // escape sequence: the next byte is literal (\$, \\, \%)
            continue;
        }

        if (c == '$') {
            if (i + 1 < n && body[i + 1] == '$') {
                if (!in_display) display_open = i;
                in_display = !in_display;
                i += 2;
                continue;
            }
            if (!in_inline) inline_open = i;
            in_inline = !in_inline;
            ++i;
            continue;
        }

        if (c < 0x20 && c != '\n' && c != '\t') {
            char buf[16];
            std::snprintf(buf, sizeof buf, "0x%02x", c);
            defects.push_back({DefectKind::ControlCharacter, i,
                               std::string("control byte ") + buf});
            ++i;
            continue;
        }

        // UTF-8 ellipsis: a common artifact of display-width truncation.
        if (c == 0xe2 && body.compare(i, 3, "\xe2\x80\xa6") == 0) {
            defects.push_back({DefectKind::TruncationMarker, i, "ellipsis character"});
            i += 3;
            continue;
        }
        if (c == '[' && body.compare(i, 3, "[?]") == 0) {
            defects.push_back({DefectKind::TruncationMarker, i, "[?] placeholder"});
            i += 3;
            continue;
        }

        ++i;
    }

    if (in_display)
        defects.push_back({DefectKind::UnbalancedMathDelimiters, display_open,
                           "$$ opened but never closed"});
    if (in_inline)
        defects.push_back({DefectKind::UnbalancedMathDelimiters, inline_open,
                           "$ opened but never closed"});
    for (const auto& [name, offset] : env_stack)
        defects.push_back({DefectKind::MismatchedEnvironment, offset,
                           "\\begin{" + name + "} is never closed"});
    return defects;
}

std::string dedupe_key(const std::string& body) {
    std::string stripped;
    stripped.reserve(body.size());
    for (char c : body)
        if (c != '$') stripped.push_back(c);
    return util::lower(util::collapse_ws(stripped));
}

std::pair<std::vector<QuestionRecord>, std::uint64_t> dedupe(std::vector<QuestionRecord> records) {
    std::vector<QuestionRecord> kept;
    kept.reserve(records.size());
    std::unordered_set<std::string> seen;
    std::uint64_t dropped = 0;
    for (auto& rec : records) {
        if (seen.insert(dedupe_key(rec.body)).second)
            kept.push_back(std::move(rec));
        else
            ++dropped;
    }
    return {std::move(kept), dropped};
}

QuarantineResult quarantine(const std::vector<QuestionRecord>& records) {
    QuarantineResult result;
    for (const auto& rec : records) {
        std::vector<Defect> defects = validate_latex(rec.body);
        if (defects.empty())
            result.clean.push_back(rec);
        else
            result.quarantined.push_back({rec, std::move(defects)});
    }
    return result;
}

} // namespace sciforge
