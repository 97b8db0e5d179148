#include "caloric/experiments.hpp"
#include "caloric/report.hpp"

#include "doctest.h"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
namespace ex = caloric::experiments;
using caloric::report::format_double;

namespace {

struct ScratchDir {
    fs::path path;
    ScratchDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("caloric_test_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::size_t error_line(const std::string& text) {
    try {
        ex::validate(text);
    } catch (const ex::ConfigError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_CASE("every shipped config validates") {
    std::size_t count = 0;
    for (const auto& entry : fs::directory_iterator(CALORIC_CONFIG_DIR)) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(ex::validate(ex::read_file(entry.path())));
        ++count;
    }
    CHECK(count >= 10);
    CHECK(ex::kinds().size() >= 10);
}

TEST_CASE("config errors carry pointer and line") {
    const std::string misspelled = "{\n  \"experiments\": [\n    {\n      \"kind\": \"moments\",\n      \"alpahs\": [0.5]\n    }\n  ]\n}\n";
    try {
        ex::validate(misspelled);
        FAIL("expected a ConfigError");
    } catch (const ex::ConfigError& e) {
        CHECK(e.pointer() == "/experiments/0/alpahs");
        CHECK(e.line() == 5);
    }
    CHECK(error_line("{\n  \"experiments\": [\n    {\"kind\": \"nope\"}\n  ]\n}") == 3);
    CHECK(error_line("{\"experiments\": [\n{\"kind\": \"moments\",\n \"alphas\": [0.5,\n 1.5]}]}") == 4);
    CHECK(error_line("{\"experiments\": [{\"kind\": \"moments\", \"tolerance\": -1}]}") == 1);
    CHECK_THROWS_AS(ex::validate("{\"experiments\": [{\"kind\": \"moments\", \"name\": \"a\"},"
                                 " {\"kind\": \"moments\", \"name\": \"a\"}]}"),
                    ex::ConfigError);
    CHECK_THROWS_AS(ex::validate("{\"experiments\": [{\"kind\": \"moments\", \"name\": \"../up\"}]}"), ex::ConfigError);
    CHECK_THROWS_AS(ex::validate("not json"), ex::ConfigError);
    CHECK_THROWS_AS(ex::validate("{\"experiments\": {}}"), ex::ConfigError);
}

TEST_CASE("line index") {
    const auto lines = ex::line_index("{\n  \"a\": 1,\n  \"b\": [\n    2,\n    {\"c\": 3}\n  ]\n}");
    CHECK(lines.at("") == 1);
    CHECK(lines.at("/a") == 2);
    CHECK(lines.at("/b") == 3);
    CHECK(lines.at("/b/0") == 4);
    CHECK(lines.at("/b/1/c") == 5);
}

TEST_CASE("empty experiment list writes nothing") {
    ScratchDir scratch;
    const auto out = scratch.path / "empty";
    const auto rep = ex::run("{\"experiments\": []}", {out, nullptr});
    CHECK(rep.passed());
    CHECK(rep.exit_code() == 0);
    CHECK(rep.results.empty());
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("moments run writes the table, the gate and the summary") {
    ScratchDir scratch;
    std::ostringstream log;
    const auto rep = ex::run(ex::read_file(fs::path(CALORIC_CONFIG_DIR) / "moments.json"), {scratch.path, &log});
    REQUIRE(rep.results.size() == 1);
    const auto& result = rep.results.front();
    CHECK(result.passed());
    CHECK(rep.exit_code() == 0);
    CHECK(log.str().rfind("PASS moments", 0) == 0);
    REQUIRE(result.artifacts.size() == 1);
    const auto csv = ex::read_file(scratch.path / result.name / result.artifacts.front());
    std::istringstream rows(csv);
    std::string header;
    std::getline(rows, header);
    CHECK(header == "alpha,r,t,closed_form,quadrature,rel_error");
    bool found = false;
    for (std::string row; std::getline(rows, row);) {
        if (row.rfind("0.5,1,1,", 0) == 0) {
            found = true;
            CHECK(row.rfind("0.5,1,1,2,", 0) == 0);
        }
    }
    CHECK(found);
    const auto summary = nlohmann::json::parse(ex::read_file(scratch.path / "summary.json"));
    CHECK(summary.at("passed") == true);
    CHECK(summary.at("experiments").at(0).at("gates").at(0).at("name") == "max_rel_error");
}

TEST_CASE("failing gates and numerical errors set exit code 1") {
    ScratchDir scratch;
    const std::string claimed = R"({"experiments": [{"kind": "positivity", "name": "claimed_negative",
        "grid": {"dim": 1, "N": 1024, "L": 32},
        "cases": [{"semigroup": {"kind": "gauss_weierstrass"}, "ts": [1], "expect": "negative"}]}]})";
    const auto rep = ex::run(claimed, {scratch.path, nullptr});
    REQUIRE(rep.results.size() == 1);
    CHECK(rep.results.front().error.empty());
    CHECK_FALSE(rep.passed());
    CHECK(rep.exit_code() == 1);

    // The Cauchy symbol is far from decayed at the Nyquist frequency of this grid.
    const std::string coarse = R"({"experiments": [{"kind": "positivity", "name": "unresolved",
        "grid": {"dim": 1, "N": 64, "L": 64},
        "cases": [{"semigroup": {"kind": "subordinated", "f": {"family": "stable", "alpha": 0.5}}, "ts": [1]}]}]})";
    const auto bad = ex::run(coarse, {scratch.path / "coarse", nullptr});
    REQUIRE(bad.results.size() == 1);
    CHECK_FALSE(bad.results.front().error.empty());
    CHECK(bad.exit_code() == 1);
    CHECK(fs::exists(scratch.path / "coarse" / "summary.json"));
}

TEST_CASE("CSV formatting") {
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(-1e-300) == "-1e-300");
    CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    caloric::report::CsvTable table({"name", "value", "ok"});
    table.add_row("a,b", 0.5, true);
    table.add_row(std::string("say \"hi\""), 3, false);
    CHECK(table.str() == "name,value,ok\n\"a,b\",0.5,true\n\"say \"\"hi\"\"\",3,false\n");
    CHECK_THROWS(table.add_row(1.0));
}
