#include "sciforge/types.hpp"

#include <array>
#include <sstream>

#include "sciforge/errors.hpp"

namespace sciforge {

// ---------------------------------------------------------------------------
// Subject

const char* subject_name(Subject s) {
    switch (s) {
    case Subject::Math: return "math";
    case Subject::Physics: return "physics";
    case Subject::Chemistry: return "chemistry";
    case Subject::Lean: return "lean";
    }
    return "math";
}

Subject subject_from_name(const std::string& name) {
    if (name == "math") return Subject::Math;
    if (name == "physics") return Subject::Physics;
    if (name == "chemistry") return Subject::Chemistry;
    if (name == "lean") return Subject::Lean;
    throw Error(Errc::UnknownSubject, "unknown subject: \"" + name + "\"");
}

// ---------------------------------------------------------------------------
// QuestionRecord

void to_json(json& j, const QuestionRecord& r) {
    j = json{{"id", r.id},
             {"subject", subject_name(r.subject)},
             {"body", r.body},
             {"reference_answer", r.reference_answer ? json(*r.reference_answer) : json(nullptr)},
             {"reference_solution",
              r.reference_solution ? json(*r.reference_solution) : json(nullptr)},
             {"source", r.source}};
}

void from_json(const json& j, QuestionRecord& r) {
    r.id = j.at("id").get<std::string>();
    r.subject = subject_from_name(j.at("subject").get<std::string>());
    r.body = j.at("body").get<std::string>();
    r.reference_answer.reset();
    if (j.contains("reference_answer") && !j.at("reference_answer").is_null())
        r.reference_answer = j.at("reference_answer").get<std::string>();
    r.reference_solution.reset();
    if (j.contains("reference_solution") && !j.at("reference_solution").is_null())
        r.reference_solution = j.at("reference_solution").get<std::string>();
    r.source = j.value("source", std::string());
}

// ---------------------------------------------------------------------------
// Defect

const char* defect_kind_name(DefectKind k) {
    switch (k) {
    case DefectKind::UnbalancedMathDelimiters: return "unbalanced_math_delimiters";
    case DefectKind::MismatchedEnvironment: return "mismatched_environment";
    case DefectKind::TruncationMarker: return "truncation_marker";
    case DefectKind::ControlCharacter: return "control_character";
    case DefectKind::EmptyBody: return "empty_body";
    }
    return "empty_body";
}

namespace {
DefectKind defect_kind_from_name(const std::string& name) {
    if (name == "unbalanced_math_delimiters") return DefectKind::UnbalancedMathDelimiters;
    if (name == "mismatched_environment") return DefectKind::MismatchedEnvironment;
    if (name == "truncation_marker") return DefectKind::TruncationMarker;
    if (name == "control_character") return DefectKind::ControlCharacter;
    if (name == "empty_body") return DefectKind::EmptyBody;
    throw Error(Errc::InvalidArgument, "unknown defect kind: \"" + name + "\"");
}
} // namespace

void to_json(json& j, const Defect& d) {
    j = json{{"kind", defect_kind_name(d.kind)}, {"location", d.location}, {"detail", d.detail}};
}

void from_json(const json& j, Defect& d) {
    d.kind = defect_kind_from_name(j.at("kind").get<std::string>());
    d.location = j.at("location").get<std::size_t>();
    d.detail = j.value("detail", std::string());
}

// ---------------------------------------------------------------------------
// Stage / CotSolution

const char* stage_name(Stage s) {
    switch (s) {
    case Stage::Preexisting: return "preexisting";
    case Stage::Stage1: return "stage1";
    case Stage::Stage2: return "stage2";
    case Stage::Stage3: return "stage3";
    }
    return "stage1";
}

Stage stage_from_name(const std::string& name) {
    if (name == "preexisting") return Stage::Preexisting;
    if (name == "stage1") return Stage::Stage1;
    if (name == "stage2") return Stage::Stage2;
    if (name == "stage3") return Stage::Stage3;
    throw Error(Errc::InvalidArgument, "unknown stage: \"" + name + "\"");
}

void to_json(json& j, const CotSolution& s) {
    j = json{{"question_id", s.question_id},
             {"analysis", s.analysis},
             {"steps", s.steps},
             {"final_answer", s.final_answer},
             {"stage", stage_name(s.stage)},
             {"producer", s.producer}};
}

void from_json(const json& j, CotSolution& s) {
    s.question_id = j.at("question_id").get<std::string>();
    s.analysis = j.value("analysis", std::string());
    s.steps = j.at("steps").get<std::vector<std::string>>();
    s.final_answer = j.at("final_answer").get<std::string>();
    s.stage = stage_from_name(j.at("stage").get<std::string>());
    s.producer = j.value("producer", std::string("model"));
}

// ---------------------------------------------------------------------------
// Verdicts

const char* label_name(Label l) { return l == Label::Correct ? "correct" : "incorrect"; }

const char* judge_tier_name(JudgeTier t) { return t == JudgeTier::RuleBased ? "rule" : "model"; }

const char* error_category_name(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::Comprehension: return "comprehension";
    case ErrorCategory::Calculation: return "calculation";
    case ErrorCategory::FalseReasoning: return "false_reasoning";
    case ErrorCategory::Other: return "other";
    }
    return "other";
}

namespace {
Label label_from_name(const std::string& name) {
    if (name == "correct") return Label::Correct;
    if (name == "incorrect") return Label::Incorrect;
    throw Error(Errc::InvalidArgument, "unknown label: \"" + name + "\"");
}

JudgeTier judge_tier_from_name(const std::string& name) {
    if (name == "rule") return JudgeTier::RuleBased;
    if (name == "model") return JudgeTier::Model;
    throw Error(Errc::InvalidArgument, "unknown judge tier: \"" + name + "\"");
}

ErrorCategory error_category_from_name(const std::string& name) {
    if (name == "comprehension") return ErrorCategory::Comprehension;
    if (name == "calculation") return ErrorCategory::Calculation;
    if (name == "false_reasoning") return ErrorCategory::FalseReasoning;
    if (name == "other") return ErrorCategory::Other;
    throw Error(Errc::InvalidArgument, "unknown error category: \"" + name + "\"");
}
} // namespace

void to_json(json& j, const JudgeVerdict& v) {
    j = json{{"question_id", v.question_id},
             {"label", label_name(v.label)},
             {"judge", judge_tier_name(v.judge)},
             {"error_category",
              v.error_category ? json(error_category_name(*v.error_category)) : json(nullptr)}};
}

void from_json(const json& j, JudgeVerdict& v) {
    v.question_id = j.value("question_id", std::string());
    v.label = label_from_name(j.at("label").get<std::string>());
    v.judge = judge_tier_from_name(j.at("judge").get<std::string>());
    v.error_category.reset();
    if (j.contains("error_category") && !j.at("error_category").is_null())
        v.error_category = error_category_from_name(j.at("error_category").get<std::string>());
}

// ---------------------------------------------------------------------------
// FunnelReport

void to_json(json& j, const FunnelReport& r) {
    j = json{{"input", r.input},
             {"stage1_correct", r.stage1_correct},
             {"stage1_incorrect", r.stage1_incorrect},
             {"stage2_correct", r.stage2_correct},
             {"stage2_incorrect", r.stage2_incorrect},
             {"stage3_correct", r.stage3_correct},
             {"unresolved", r.unresolved}};
}

void from_json(const json& j, FunnelReport& r) {
    r.input = j.at("input").get<std::uint64_t>();
    r.stage1_correct = j.at("stage1_correct").get<std::uint64_t>();
    r.stage1_incorrect = j.at("stage1_incorrect").get<std::uint64_t>();
    r.stage2_correct = j.at("stage2_correct").get<std::uint64_t>();
    r.stage2_incorrect = j.at("stage2_incorrect").get<std::uint64_t>();
    r.stage3_correct = j.at("stage3_correct").get<std::uint64_t>();
    r.unresolved = j.at("unresolved").get<std::uint64_t>();
}

// ---------------------------------------------------------------------------
// Instruction dataset

void to_json(json& j, const Provenance& p) {
    j = json{{"stage", stage_name(p.stage)},
             {"producer", p.producer},
             {"question_id", p.question_id}};
    if (p.quality) j["quality"] = *p.quality;
    if (p.empty_analysis) j["empty_analysis"] = true;
}

void from_json(const json& j, Provenance& p) {
    p.stage = stage_from_name(j.at("stage").get<std::string>());
    p.producer = j.value("producer", std::string());
    p.question_id = j.value("question_id", std::string());
    p.quality.reset();
    if (j.contains("quality") && !j.at("quality").is_null())
        p.quality = j.at("quality").get<double>();
    p.empty_analysis = j.value("empty_analysis", false);
}

void to_json(json& j, const InstructionEntry& e) {
    j = json{{"subject", subject_name(e.subject)},
             {"problem", e.problem},
             {"answer", e.answer},
             {"provenance", e.provenance}};
}

void from_json(const json& j, InstructionEntry& e) {
    e.subject = subject_from_name(j.at("subject").get<std::string>());
    e.problem = j.at("problem").get<std::string>();
    e.answer = j.at("answer").get<std::string>();
    e.provenance = j.at("provenance").get<Provenance>();
}

// ---------------------------------------------------------------------------
// DatasetStats

void to_json(json& j, const DatasetStats& s) {
    j = json{{"math", s.math},
             {"physics", s.physics},
             {"chemistry", s.chemistry},
             {"physics_chemistry", s.physics_chemistry()},
             {"lean", s.lean},
             {"total", s.total()}};
}

void from_json(const json& j, DatasetStats& s) {
    s.math = j.at("math").get<std::uint64_t>();
    s.physics = j.at("physics").get<std::uint64_t>();
    s.chemistry = j.at("chemistry").get<std::uint64_t>();
    s.lean = j.at("lean").get<std::uint64_t>();
}

std::string with_thousands_separators(std::uint64_t v) {
    std::string digits = std::to_string(v);
    std::string out;
    out.reserve(digits.size() + digits.size() / 3);
    std::size_t lead = digits.size() % 3;
    if (lead == 0) lead = 3;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i >= lead && (i - lead) % 3 == 0) out.push_back(',');
        out.push_back(digits[i]);
    }
    return out;
}

std::string format_stats_table(const DatasetStats& s) {
    const std::array<std::string, 5> headers = {"Subject", "Math", "Physics & Chemistry",
                                                "Formal Proofs (Lean)", "Total"};
    const std::array<std::string, 5> values = {
        "#Number", with_thousands_separators(s.math),
        with_thousands_separators(s.physics_chemistry()), with_thousands_separators(s.lean),
        with_thousands_separators(s.total())};

    std::array<std::size_t, 5> widths{};
    for (std::size_t i = 0; i < 5; ++i) widths[i] = std::max(headers[i].size(), values[i].size());

    auto render_row = [&](const std::array<std::string, 5>& cells) {
        std::ostringstream row;
        row << '|';
        for (std::size_t i = 0; i < 5; ++i) {
            row << ' ' << cells[i] << std::string(widths[i] - cells[i].size(), ' ') << " |";
        }
        return row.str();
    };
    auto render_rule = [&]() {
        std::ostringstream row;
        row << '|';
        for (std::size_t i = 0; i < 5; ++i) row << std::string(widths[i] + 2, '-') << '|';
        return row.str();
    };

    std::ostringstream out;
    out << render_row(headers) << '\n' << render_rule() << '\n' << render_row(values) << '\n';
    return out.str();
}

} // namespace sciforge
