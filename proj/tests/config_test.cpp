#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "sciforge/config.hpp"
#include "sciforge/errors.hpp"
#include "sciforge/pipeline.hpp"
#include "sciforge/util.hpp"
#include "support/test_support.hpp"

using namespace sciforge;

TEST_CASE("defaults are present and typed") {
    PipelineConfig config;
    CHECK(config.get("gateway.backend") == "mock");
    CHECK(config.get_int("seed") == 0);
    CHECK(config.get_int("filter.dim") == 4096);
    CHECK(config.get_double("judge.rel_tol") == doctest::Approx(1e-4));
    CHECK(config.get_double("judge.abs_tol") == doctest::Approx(1e-9));
    CHECK(config.get_bool("judge.llm_escalation"));
    CHECK(config.get_double("train.learning_rate") == doctest::Approx(3e-6));
    CHECK(config.get("train.scheduler") == "linear");
    CHECK(config.get_int("train.epochs") == 2);
    CHECK(config.is_default("seed"));
    CHECK(!config.keys().empty());
}

TEST_CASE("set validates types, ranges, and choices") {
    PipelineConfig config;
    config.set("seed", "123");
    CHECK(config.get_int("seed") == 123);
    CHECK(!config.is_default("seed"));

    config.set("judge.llm_escalation", "off");
    CHECK(!config.get_bool("judge.llm_escalation"));
    config.set("judge.llm_escalation", "TRUE");
    CHECK(config.get_bool("judge.llm_escalation"));

    CHECK_THROWS_AS(config.set("no.such.key", "1"), Error);
    CHECK_THROWS_AS(config.set("seed", "not-a-number"), Error);
    CHECK_THROWS_AS(config.set("seed", "12x"), Error); // partial parse is rejected
    CHECK_THROWS_AS(config.set("gateway.backend", "carrier-pigeon"), Error);
    CHECK_THROWS_AS(config.set("judge.llm_escalation", "maybe"), Error);
    CHECK_THROWS_AS(config.set("filter.drop_fraction", "1.5"), Error); // above max
    CHECK_THROWS_AS(config.set("filter.drop_fraction", "-0.1"), Error);
    CHECK_THROWS_AS(config.set("annotate.n_candidates", "0"), Error); // below min
}

TEST_CASE("config file parsing") {
    testsupport::TempDir dir;
    std::string path = dir.file("pipeline.conf");
    util::atomic_write_file(path,
                            "# comment line\n"
                            "seed = 7\n"
                            "\n"
                            "gateway.model = local-7b\n"
                            "judge.rel_tol = 0.001\n");
    PipelineConfig config;
    config.load_file(path);
    CHECK(config.get_int("seed") == 7);
    CHECK(config.get("gateway.model") == "local-7b");
    CHECK(config.get_double("judge.rel_tol") == doctest::Approx(0.001));

    std::string bad = dir.file("bad.conf");
    util::atomic_write_file(bad, "seed = 1\nthis line has no equals\n");
    PipelineConfig other;
    try {
        other.load_file(bad);
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ConfigError);
        CHECK(std::string(e.what()).find(":2") != std::string::npos); // path:line
    }

    std::string unknown = dir.file("unknown.conf");
    util::atomic_write_file(unknown, "nonexistent.key = 1\n");
    PipelineConfig third;
    CHECK_THROWS_AS(third.load_file(unknown), Error);
}

TEST_CASE("environment overrides file, set overrides environment") {
    testsupport::TempDir dir;
    std::string path = dir.file("layered.conf");
    util::atomic_write_file(path, "seed = 1\ngateway.model = from-file\n");

    setenv("SCIFORGE_SEED", "2", 1);
    setenv("SCIFORGE_GATEWAY_MODEL", "from-env", 1);

    PipelineConfig config;
    config.load_file(path);
    config.load_env();
    CHECK(config.get_int("seed") == 2);
    CHECK(config.get("gateway.model") == "from-env");

    config.set("seed", "3");
    CHECK(config.get_int("seed") == 3);
    CHECK(config.get("gateway.model") == "from-env");

    unsetenv("SCIFORGE_SEED");
    unsetenv("SCIFORGE_GATEWAY_MODEL");
}

TEST_CASE("environment values are validated too") {
    setenv("SCIFORGE_FILTER_DIM", "not-an-int", 1);
    PipelineConfig config;
    CHECK_THROWS_AS(config.load_env(), Error);
    unsetenv("SCIFORGE_FILTER_DIM");
}

TEST_CASE("the api key is not a config key") {
    PipelineConfig config;
    CHECK_THROWS_AS(config.get("api_key"), Error);
    CHECK_THROWS_AS(config.set("api_key", "secret"), Error);
    for (const auto& key : config.keys()) CHECK(key.find("api") == std::string::npos);

    // It comes from the environment alone.
    setenv("SCIFORGE_API_KEY", "s3cret", 1);
    CHECK(api_key_from_env() == "s3cret");
    unsetenv("SCIFORGE_API_KEY");
    CHECK(api_key_from_env().empty());
}

TEST_CASE("doubles accept scientific notation") {
    PipelineConfig config;
    config.set("train.learning_rate", "2.5e-5");
    CHECK(config.get_double("train.learning_rate") == doctest::Approx(2.5e-5));
}

TEST_CASE("registry covers the subsystems") {
    PipelineConfig config;
    auto keys = config.keys();
    auto has = [&](const std::string& k) {
        return std::find(keys.begin(), keys.end(), k) != keys.end();
    };
    CHECK(has("gateway.backend"));
    CHECK(has("gateway.max_retries"));
    CHECK(has("judge.rel_tol"));
    CHECK(has("annotate.n_candidates"));
    CHECK(has("filter.drop_fraction"));
    CHECK(has("train.scheduler"));
}
