// Black-box tests for the command-line binary: spawns the real executable,
// checks exit codes (0 success / 1 validation or usage / 2 transport outage),
// stdout reports, stderr error lines, and cross-run determinism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include <json.hpp>

#include "support/test_support.hpp"

using nlohmann::json;
using testsupport::TempDir;
using testsupport::fixture_path;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    REQUIRE(f != nullptr);
    std::string body;
    int c;
    while ((c = std::fgetc(f)) != EOF) body += static_cast<char>(c);
    std::fclose(f);
    return body;
}

void write_file(const std::string& path, const std::string& body) {
    FILE* f = std::fopen(path.c_str(), "wb");
    REQUIRE(f != nullptr);
    REQUIRE(std::fwrite(body.data(), 1, body.size(), f) == body.size());
    REQUIRE(std::fclose(f) == 0);
}

int count_lines(const std::string& path) {
    std::string body = slurp(path);
    int lines = 0;
    for (char c : body)
        if (c == '\n') ++lines;
    return lines;
}

RunResult run_cli(const TempDir& tmp, const std::string& args) {
    static int invocation = 0;
    const std::string out = tmp.file("cli-out-" + std::to_string(invocation));
    const std::string err = tmp.file("cli-err-" + std::to_string(invocation));
    ++invocation;
    const std::string cmd =
        std::string(SCIFORGE_CLI) + " " + args + " >" + out + " 2>" + err;
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

// Parses the JSON report from stdout, skipping any leading text table
// (tables contain no braces).
json tail_json(const std::string& stdout_text) {
    std::size_t brace = stdout_text.find('{');
    REQUIRE(brace != std::string::npos);
    return json::parse(stdout_text.substr(brace));
}

// Counts occurrences of `name` as a whitespace-delimited token.
int count_token(std::string text, const std::string& name) {
    for (char& c : text)
        if (c == '\n' || c == '\t' || c == '\r') c = ' ';
    text = " " + text + " ";
    const std::string needle = " " + name + " ";
    int n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + 1))
        ++n;
    return n;
}

std::string texts_jsonl(bool careful, int count) {
    std::string out;
    for (int i = 0; i < count; ++i) {
        std::string text =
            careful ? "Step 1: expand the expression and collect matching powers. "
                      "Step 2: substitute the boundary condition. Result " +
                          std::to_string(100 + i) + "."
                    : "um idk maybe just guess lol whatever random nonsense blah " +
                          std::to_string(i);
        out += json{{"text", text}}.dump();
        out += '\n';
    }
    return out;
}

} // namespace

TEST_CASE("--help lists every subcommand exactly once and exits 0") {
    TempDir tmp;
    RunResult r = run_cli(tmp, "--help");
    CHECK(r.exit_code == 0);
    for (const char* name : {"ingest", "annotate", "label", "train-filter", "score", "assemble",
                             "eval", "stats", "emit-train-config"}) {
        CAPTURE(name);
        CHECK(count_token(r.out, name) == 1);
    }
}

TEST_CASE("usage errors exit 1 with a message on standard error") {
    TempDir tmp;

    RunResult none = run_cli(tmp, "");
    CHECK(none.exit_code == 1);
    CHECK_FALSE(none.err.empty());

    RunResult bogus = run_cli(tmp, "--bogus");
    CHECK(bogus.exit_code == 1);
    CHECK(bogus.err.find("--bogus") != std::string::npos);

    RunResult missing_required = run_cli(tmp, "ingest");
    CHECK(missing_required.exit_code == 1);
    CHECK(missing_required.err.find("--input") != std::string::npos);
}

TEST_CASE("config plumbing errors exit 1") {
    TempDir tmp;

    RunResult no_eq = run_cli(tmp, "--set nonsense ingest --input x.jsonl");
    CHECK(no_eq.exit_code == 1);
    CHECK(no_eq.err.find("key=value") != std::string::npos);

    RunResult unknown = run_cli(tmp, "--set no.such.key=1 ingest --input x.jsonl");
    CHECK(unknown.exit_code == 1);
    CHECK(unknown.err.find("no.such.key") != std::string::npos);

    RunResult bad_file =
        run_cli(tmp, "--config " + tmp.file("absent.conf") + " ingest --input x.jsonl");
    CHECK(bad_file.exit_code == 1);
    CHECK(bad_file.err.rfind("error: ", 0) == 0);
}

TEST_CASE("ingest writes artifacts and reports counts") {
    TempDir tmp;
    const std::string clean = tmp.file("clean.jsonl");
    const std::string quarantine = tmp.file("quarantine.jsonl");

    RunResult r = run_cli(tmp, "ingest --input " + fixture_path("golden_corpus.jsonl") +
                                   " --output " + clean + " --quarantine " + quarantine);
    REQUIRE(r.exit_code == 0);
    json report = tail_json(r.out);
    CHECK(report.at("loaded") == 12);
    CHECK(report.at("clean") == 8);
    CHECK(count_lines(clean) == 8);
    CHECK(count_lines(quarantine) == 3);

    RunResult missing = run_cli(tmp, "ingest --input " + tmp.file("absent.jsonl"));
    CHECK(missing.exit_code == 1);
    CHECK(missing.err.rfind("error: ", 0) == 0);
}

TEST_CASE("the full pipeline runs through the binary") {
    TempDir tmp;
    const std::string questions = fixture_path("funnel_golden_questions.jsonl");
    const std::string mock_flags = "--set gateway.script=" +
                                   fixture_path("funnel_golden_script.json") +
                                   " --set gateway.requests_per_minute=100000 ";

    // annotate: deterministic funnel run, twice.
    const std::string sol_a = tmp.file("solutions-a.jsonl");
    const std::string sol_b = tmp.file("solutions-b.jsonl");
    RunResult a = run_cli(tmp, mock_flags + "annotate --questions " + questions +
                                   " --solutions " + sol_a + " --checkpoint " +
                                   tmp.file("a.ckpt"));
    REQUIRE(a.exit_code == 0);
    json fr = tail_json(a.out).at("funnel");
    CHECK(fr.at("input") == 12);
    CHECK(fr.at("stage1_correct") == 5);
    CHECK(fr.at("stage2_correct") == 4);
    CHECK(fr.at("stage3_correct") == 2);
    CHECK(fr.at("unresolved") == 1);

    RunResult b = run_cli(tmp, mock_flags + "annotate --questions " + questions +
                                   " --solutions " + sol_b + " --checkpoint " +
                                   tmp.file("b.ckpt"));
    REQUIRE(b.exit_code == 0);
    CHECK(slurp(sol_a) == slurp(sol_b)); // identical config => identical bytes

    // label: every emitted solution judges correct at the rule tier.
    const std::string verdicts = tmp.file("verdicts.jsonl");
    RunResult l = run_cli(tmp, "label --questions " + questions + " --solutions " + sol_a +
                                   " --verdicts " + verdicts);
    REQUIRE(l.exit_code == 0);
    json lr = tail_json(l.out);
    CHECK(lr.at("judged") == 11);
    CHECK(lr.at("correct") == 11);
    CHECK(lr.at("missing_solution") == 1);
    CHECK(count_lines(verdicts) == 11);

    // assemble + stats
    const std::string dataset = tmp.file("dataset.jsonl");
    RunResult s = run_cli(tmp, "assemble --questions " + questions + " --solutions " + sol_a +
                                   " --dataset-out " + dataset + " --stats-out " +
                                   tmp.file("stats.json"));
    REQUIRE(s.exit_code == 0);
    CHECK(tail_json(s.out).at("written") == 11);
    CHECK(tail_json(s.out).at("stats").at("math") == 9);

    RunResult st = run_cli(tmp, "stats --dataset " + dataset);
    REQUIRE(st.exit_code == 0);
    CHECK(st.out.find("#Number") != std::string::npos);
    CHECK(tail_json(st.out).at("total") == 11);

    // train-filter + score, seeded through --seed.
    const std::string pos = tmp.file("pos.jsonl");
    const std::string neg = tmp.file("neg.jsonl");
    write_file(pos, texts_jsonl(true, 8));
    write_file(neg, texts_jsonl(false, 8));
    const std::string model = tmp.file("filter.json");

    RunResult t = run_cli(tmp, "--set filter.dim=128 --seed 42 train-filter --positives " + pos +
                                   " --negatives " + neg + " --model-out " + model);
    REQUIRE(t.exit_code == 0);
    CHECK(tail_json(t.out).at("provider_id") == "hashed-ngram-v1/d128/s42");

    const std::string kept = tmp.file("kept.jsonl");
    const std::string dropped = tmp.file("dropped.jsonl");
    RunResult sc = run_cli(tmp, "--set filter.dim=128 --seed 42 score --model " + model +
                                    " --dataset " + dataset + " --drop-fraction 0.2 --kept " +
                                    kept + " --dropped " + dropped);
    REQUIRE(sc.exit_code == 0);
    json scr = tail_json(sc.out);
    CHECK(scr.at("scored") == 11);
    CHECK(scr.at("dropped") == 2);
    CHECK(scr.at("kept") == 9);
    CHECK(count_lines(kept) == 9);
    CHECK(count_lines(dropped) == 2);
}

TEST_CASE("a transport outage exits 2") {
    TempDir tmp;
    // Mock backend with no script: every request fails, no record progresses.
    RunResult r = run_cli(tmp, "annotate --questions " +
                                   fixture_path("funnel_golden_questions.jsonl") +
                                   " --solutions " + tmp.file("solutions.jsonl"));
    CHECK(r.exit_code == 2);
    CHECK(r.err.rfind("error: ", 0) == 0);
    CHECK(r.err.find("no progress") != std::string::npos);
}

TEST_CASE("eval prints the table, then the JSON report") {
    TempDir tmp;
    RunResult r = run_cli(tmp, "eval --items " + fixture_path("eval_items.jsonl") +
                                   " --responses " + fixture_path("eval_responses.jsonl") +
                                   " --groups " + fixture_path("eval_groups.json"));
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("Avg. science") != std::string::npos);
    CHECK(r.out.find("0.6000") != std::string::npos);
    json report = tail_json(r.out);
    CHECK(report.at("groups").at("science").at("n") == 10);
    CHECK(report.at("groups").at("science").at("correct") == 6);
}

TEST_CASE("emit-train-config prints and writes the recipe") {
    TempDir tmp;
    const std::string out_file = tmp.file("train.json");
    RunResult r = run_cli(tmp, "emit-train-config --output " + out_file);
    REQUIRE(r.exit_code == 0);
    json recipe = tail_json(r.out);
    CHECK(recipe.at("learning_rate").get<double>() == doctest::Approx(3e-6).epsilon(1e-12));
    CHECK(recipe.at("scheduler") == "linear");
    CHECK(recipe.at("epochs") == 2);
    CHECK(json::parse(slurp(out_file)) == recipe);
}
