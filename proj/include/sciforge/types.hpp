#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace sciforge {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Corpus records

enum class Subject { Math, Physics, Chemistry, Lean };

const char* subject_name(Subject s);                    // "math", "physics", ...
Subject subject_from_name(const std::string& name);     // throws Error(UnknownSubject)

struct QuestionRecord {
    std::string id;
    Subject subject = Subject::Math;
    std::string body;
    std::optional<std::string> reference_answer;
    std::optional<std::string> reference_solution;
    std::string source;
};

void to_json(json& j, const QuestionRecord& r);
void from_json(const json& j, QuestionRecord& r);

// Syntactic defects found by the ingest validator.
enum class DefectKind {
    UnbalancedMathDelimiters,
    MismatchedEnvironment,
    TruncationMarker,
    ControlCharacter,
    EmptyBody,
};

const char* defect_kind_name(DefectKind k);

struct Defect {
    DefectKind kind = DefectKind::EmptyBody;
    std::size_t location = 0; // byte offset into the record body
    std::string detail;
};

void to_json(json& j, const Defect& d);
void from_json(const json& j, Defect& d);

// ---------------------------------------------------------------------------
// Annotation artifacts

// Which pass of the annotation funnel produced a solution. Preexisting marks
// solutions carried over verbatim from the source corpus.
enum class Stage { Preexisting = 0, Stage1 = 1, Stage2 = 2, Stage3 = 3 };

const char* stage_name(Stage s); // "preexisting", "stage1", ...
Stage stage_from_name(const std::string& name);

struct CotSolution {
    std::string question_id;
    std::string analysis;            // may be empty
    std::vector<std::string> steps;  // ordered reasoning steps
    std::string final_answer;
    Stage stage = Stage::Stage1;
    std::string producer;            // "model" or "human"
};

void to_json(json& j, const CotSolution& s);
void from_json(const json& j, CotSolution& s);

enum class Label { Correct, Incorrect };
enum class JudgeTier { RuleBased, Model };
enum class ErrorCategory { Comprehension, Calculation, FalseReasoning, Other };

const char* label_name(Label l);
const char* judge_tier_name(JudgeTier t);
const char* error_category_name(ErrorCategory c);

struct JudgeVerdict {
    std::string question_id;
    Label label = Label::Incorrect;
    JudgeTier judge = JudgeTier::RuleBased;
    std::optional<ErrorCategory> error_category; // only meaningful for Incorrect
};

void to_json(json& j, const JudgeVerdict& v);
void from_json(const json& j, JudgeVerdict& v);

// Normalized answer for rule-based comparison.
struct Answer {
    enum class Kind { Numeric, Choice, Symbolic };
    Kind kind = Kind::Symbolic;
    double number = 0.0;                  // Numeric only
    std::optional<std::string> unit;      // Numeric only
    std::string text;                     // Choice letter or symbolic text
};

// Counts flowing through the three-pass funnel. Conservation invariants:
//   input == stage1_correct + stage1_incorrect
//   stage1_incorrect == stage2_correct + stage2_incorrect
//   stage2_incorrect == stage3_correct + unresolved
struct FunnelReport {
    std::uint64_t input = 0;
    std::uint64_t stage1_correct = 0;
    std::uint64_t stage1_incorrect = 0;
    std::uint64_t stage2_correct = 0;
    std::uint64_t stage2_incorrect = 0;
    std::uint64_t stage3_correct = 0;
    std::uint64_t unresolved = 0;

    bool conserved() const {
        return input == stage1_correct + stage1_incorrect &&
               stage1_incorrect == stage2_correct + stage2_incorrect &&
               stage2_incorrect == stage3_correct + unresolved;
    }
};

void to_json(json& j, const FunnelReport& r);
void from_json(const json& j, FunnelReport& r);

// ---------------------------------------------------------------------------
// Assembled dataset

struct Provenance {
    Stage stage = Stage::Stage1;
    std::string producer;                 // "model" or "human"
    std::optional<double> quality;        // filter score, when scored
    std::string question_id;
    bool empty_analysis = false;          // serialized only when true
};

void to_json(json& j, const Provenance& p);
void from_json(const json& j, Provenance& p);

struct InstructionEntry {
    Subject subject = Subject::Math;
    std::string problem;
    std::string answer;
    Provenance provenance;
};

void to_json(json& j, const InstructionEntry& e);
void from_json(const json& j, InstructionEntry& e);

struct DatasetStats {
    std::uint64_t math = 0;
    std::uint64_t physics = 0;
    std::uint64_t chemistry = 0;
    std::uint64_t lean = 0;

    std::uint64_t physics_chemistry() const { return physics + chemistry; }
    std::uint64_t total() const { return math + physics + chemistry + lean; }
};

void to_json(json& j, const DatasetStats& s);
void from_json(const json& j, DatasetStats& s);

// Renders the four-column summary table (math, combined physics & chemistry,
// formal proofs, total) with thousands separators.
std::string format_stats_table(const DatasetStats& s);

std::string with_thousands_separators(std::uint64_t v);

} // namespace sciforge
