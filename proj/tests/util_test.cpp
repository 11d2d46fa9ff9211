#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <string>
#include <vector>

#include "sciforge/errors.hpp"
#include "sciforge/util.hpp"
#include "support/test_support.hpp"

using namespace sciforge;

TEST_CASE("trim removes surrounding whitespace only") {
    CHECK(util::trim("  hello  ") == "hello");
    CHECK(util::trim("\t\r\n x \n") == "x");
    CHECK(util::trim("") == "");
    CHECK(util::trim("   ") == "");
    CHECK(util::trim("a b") == "a b");
}

TEST_CASE("lower maps ASCII only") {
    CHECK(util::lower("MiXeD 123") == "mixed 123");
    CHECK(util::lower("\xc3\x89") == "\xc3\x89"); // non-ASCII bytes untouched
}

TEST_CASE("collapse_ws folds runs and trims") {
    CHECK(util::collapse_ws("a   b\t\tc\n d") == "a b c d");
    CHECK(util::collapse_ws("  x  ") == "x");
    CHECK(util::collapse_ws("") == "");
}

TEST_CASE("replace_all") {
    CHECK(util::replace_all("a-b-c", "-", "+") == "a+b+c");
    CHECK(util::replace_all("aaa", "aa", "b") == "ba");
    CHECK(util::replace_all("x", "y", "z") == "x");
    CHECK(util::replace_all("{q}{q}", "{q}", "{q}!") == "{q}!{q}!");
}

TEST_CASE("split_lines handles LF and CRLF") {
    auto lines = util::split_lines("a\r\nb\nc");
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "a");
    CHECK(lines[1] == "b");
    CHECK(lines[2] == "c");

    CHECK(util::split_lines("").size() <= 1);
    auto trailing = util::split_lines("a\n");
    REQUIRE(!trailing.empty());
    CHECK(trailing[0] == "a");
}

TEST_CASE("fnv1a64 matches reference vectors") {
    // Independently computed from the published FNV-1a parameters
    // (offset 14695981039346656037, prime 1099511628211).
    CHECK(util::fnv1a64("") == 14695981039346656037ull);
    CHECK(util::fnv1a64("a") == 12638187200555641996ull);
    CHECK(util::fnv1a64("foobar") == 9625390261332436968ull);
}

TEST_CASE("fnv1a64 seed derives distinct families") {
    CHECK(util::fnv1a64("abc", 0) != util::fnv1a64("abc", 1));
    CHECK(util::fnv1a64("abc", 7) == util::fnv1a64("abc", 7));
}

TEST_CASE("to_hex is fixed-width lowercase") {
    CHECK(util::to_hex(0) == "0000000000000000");
    CHECK(util::to_hex(0xdeadbeefull) == "00000000deadbeef");
    CHECK(util::to_hex(~0ull) == "ffffffffffffffff");
}

TEST_CASE("base64 round-trips arbitrary bytes") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<unsigned char> bytes(static_cast<std::size_t>(rng() % 64));
        for (auto& b : bytes) b = static_cast<unsigned char>(rng() & 0xff);
        std::string enc = util::base64_encode(bytes.data(), bytes.size());
        CHECK(util::base64_decode(enc) == bytes);
    }
    CHECK(util::base64_encode(nullptr, 0) == "");
    CHECK(util::base64_decode("").empty());
}

TEST_CASE("base64 known vectors") {
    const unsigned char man[] = {'M', 'a', 'n'};
    CHECK(util::base64_encode(man, 3) == "TWFu");
    const unsigned char ma[] = {'M', 'a'};
    CHECK(util::base64_encode(ma, 2) == "TWE=");
    const unsigned char m[] = {'M'};
    CHECK(util::base64_encode(m, 1) == "TQ==");
}

TEST_CASE("base64 rejects invalid characters") {
    CHECK_THROWS_AS(util::base64_decode("@@@@"), Error);
    try {
        util::base64_decode("TW@u");
        FAIL("expected an InvalidArgument error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidArgument);
    }
}

TEST_CASE("atomic_write_file then read_file round-trips") {
    testsupport::TempDir dir;
    std::string path = dir.file("blob.txt");
    util::atomic_write_file(path, "line1\nline2");
    CHECK(util::read_file(path) == "line1\nline2");
    CHECK(util::file_exists(path));
    CHECK(!util::file_exists(dir.file("missing.txt")));

    util::atomic_write_file(path, "replaced");
    CHECK(util::read_file(path) == "replaced");
}

TEST_CASE("read_file on a missing path names the file") {
    try {
        util::read_file("/nonexistent/nope.txt");
        FAIL("expected an IoError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::IoError);
        CHECK(std::string(e.what()).find("nope.txt") != std::string::npos);
    }
}
