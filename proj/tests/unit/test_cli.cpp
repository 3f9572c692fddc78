#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"

#include "hsv/cli.hpp"
#include "hsv/config.hpp"
#include "hsv/errors.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace {

std::string fixture(const std::string& name)
{
    return std::string(HSV_FIXTURES) + "/" + name;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

hsv::RunResult execute(const std::string& command, const std::string& config)
{
    hsv::RunOptions opt;
    opt.config_path = fixture(config);
    return hsv::execute(command, opt);
}

std::string parse_error(const std::string& text)
{
    try {
        const auto cfg = hsv::Config::parse(text, "t.ini");
        cfg.reject_unused();
    } catch (const hsv::ParseError& e) {
        return e.what();
    }
    return "no error";
}

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "hsv_test_cli";
    std::filesystem::create_directories(dir);
    return dir / name;
}

int shell(const std::string& cmd)
{
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("config syntax errors report line and column")
{
    CHECK(parse_error("[job\n") == "t.ini:1:5: expected ']' to close the section header");
    CHECK(parse_error("[job]\nx 1\n") == "t.ini:2:1: key 'x 1': expected 'key = value'");
    CHECK(parse_error("x = 1\n") == "t.ini:1:1: key 'x' appears before any [section]");
    CHECK(parse_error("[a]\n[a]\n") == "t.ini:2:1: duplicate section [a]");
    CHECK(parse_error("[a]\nk = 1\n  k = 2\n") == "t.ini:3:3: key 'k' repeated in [a]");
    CHECK(parse_error("; note\n[a]\n\nkey = 1\n") == "t.ini:4:1: unknown key 'key' in [a]");
    CHECK(parse_error("[a b]\n").find("t.ini:1:3:") == 0);
}

TEST_CASE("typed values point at the value column")
{
    const auto cfg = hsv::Config::parse("[job]\ntol =  abc\nn = -3\nflag = maybe\nbox = [1, 0]\n", "t.ini");
    auto message = [](auto&& f) {
        try {
            f();
        } catch (const hsv::ParseError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message([&] { (void)cfg.real("job", "tol"); }).find("t.ini:2:8: key 'tol'") == 0);
    CHECK(message([&] { (void)cfg.integer("job", "n"); }).find("t.ini:3:5: key 'n'") == 0);
    CHECK(message([&] { (void)cfg.boolean("job", "flag"); }).find("t.ini:4:8: key 'flag'") == 0);
    CHECK(message([&] { (void)cfg.box("job", "box"); }).find("out of order") != std::string::npos);
    CHECK_FALSE(cfg.real("job", "missing").has_value());
}

TEST_CASE("box literals round endpoints to nearest")
{
    const auto b = hsv::parse_box_literal("[0, 1/3] x [2/3, 1] x [-0.1, 2.5e-1]");
    REQUIRE(b.dims() == 3);
    CHECK(b[0].hi() == 1.0 / 3.0);
    CHECK(b[1].lo() == 2.0 / 3.0);
    CHECK(b[2].lo() == -0.1);
    CHECK(b[2].hi() == 0.25);
    CHECK(hsv::parse_box_literal("[1,2]\xC3\x97[3,4]").dims() == 2);
    CHECK_THROWS_AS(hsv::parse_box_literal("[0, 1] y [0, 1]"), hsv::ParseError);
    CHECK_THROWS_AS(hsv::parse_box_literal("0, 1"), hsv::ParseError);
    CHECK_THROWS_AS(hsv::parse_box_literal("[0, 1/0]"), hsv::ParseError);
}

TEST_CASE("FNV-1a reference vectors")
{
    CHECK(hsv::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(hsv::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hsv::fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("exit codes of the example jobs")
{
    CHECK(execute("fixed-points", "horseshoe_fixed.ini").exit_code == 0);
    CHECK(execute("fixed-points", "crossing.ini").exit_code == 0);
    CHECK(execute("periodic-orbits", "horseshoe_orbits.ini").exit_code == 0);
    CHECK(execute("verify-covering", "trig_face.ini").exit_code == 2);
    CHECK(execute("verify-covering", "trig_phase.ini").exit_code == 0);
    CHECK(execute("branch-track", "branch.ini").exit_code == 0);
    CHECK(execute("cutting-lab", "cutting.ini").exit_code == 0);
    CHECK(execute("cutting-lab", "cutting_gap.ini").exit_code == 2);

    std::ostringstream out;
    std::ostringstream err;
    hsv::RunOptions opt;
    opt.config_path = fixture("malformed.ini");
    CHECK(hsv::run("chaos-report", opt, out, err) == 4);
    CHECK(err.str().find("max_perod") != std::string::npos);
    CHECK(err.str().find("malformed.ini:5:1:") != std::string::npos);

    opt.config_path = fixture("does_not_exist.ini");
    CHECK(hsv::run("chaos-report", opt, out, err) == 4);
}

TEST_CASE("reports are deterministic apart from timing and carry the config hash")
{
    const auto a = json::parse(execute("chaos-report", "horseshoe_chaos.ini").report);
    const auto b = json::parse(execute("chaos-report", "horseshoe_chaos.ini").report);
    CHECK(a.contains("timing"));
    auto strip = [](json j) {
        j.erase("timing");
        return j.dump();
    };
    CHECK(strip(a) == strip(b));

    // Independent FNV-1a over the raw file bytes.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : slurp(fixture("horseshoe_chaos.ini"))) {
        h = (h ^ ch) * 0x100000001b3ULL;
    }
    char hex[32];
    std::snprintf(hex, sizeof hex, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    CHECK(a["config"]["hash"] == hex);
    CHECK(a["tool"]["version"] == "0.1.0");
    CHECK(a["exit_code"] == 0);

    const auto& periods = a["chaos"]["periods"];
    REQUIRE(periods.size() == 6);
    for (std::size_t k = 0; k < 6; ++k) {
        CHECK(periods[k]["itineraries_certified"] == (1U << (k + 1)));
    }
}

TEST_CASE("report enclosures are outward-rounded decimals")
{
    const auto r = json::parse(execute("chaos-report", "horseshoe_chaos.ini").report);
    const auto& e = r["chaos"]["entropy_bound"]["enclosure"];
    REQUIRE(e.is_array());
    const auto lo = oracle::decimal(e[0].get<std::string>());
    const auto hi = oracle::decimal(e[1].get<std::string>());
    const auto ln2 = oracle::decimal("0.6931471805599453094172321214581765680755");
    CHECK(lo < ln2);
    CHECK(ln2 < hi);
    CHECK(r["chaos"]["entropy_bound"]["expression"] == "log(2)");
}

TEST_CASE("CSV output lists every enclosure")
{
    hsv::RunOptions opt;
    opt.config_path = fixture("horseshoe_fixed.ini");
    opt.csv_path = scratch("fixed.csv").string();
    opt.out_path = scratch("fixed.json").string();
    std::ostringstream out;
    std::ostringstream err;
    REQUIRE(hsv::run("fixed-points", opt, out, err) == 0);
    const auto csv = slurp(*opt.csv_path);
    CHECK(csv.rfind("check,label,axis,lo,hi\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 5);
    CHECK(out.str().empty());
    CHECK(json::parse(slurp(*opt.out_path))["exit_code"] == 0);
}

TEST_CASE("flags and environment variables override the config")
{
    hsv::RunOptions opt;
    opt.config_path = fixture("horseshoe_chaos.ini");
    opt.max_period = 2;
    const auto r = json::parse(hsv::execute("chaos-report", opt).report);
    CHECK(r["options"]["max_period"] == 2);
    CHECK(r["chaos"]["periods"].size() == 2);

    const std::string bin = HSV_BINARY;
    const auto out = scratch("env.json").string();
    CHECK(shell("HSV_MAX_PERIOD=3 " + bin + " chaos-report --config " + fixture("horseshoe_chaos.ini") +
                " --out " + out) == 0);
    CHECK(json::parse(slurp(out))["options"]["max_period"] == 3);
    // The flag wins over the environment.
    CHECK(shell("HSV_MAX_PERIOD=3 " + bin + " chaos-report --max-period 1 --config " +
                fixture("horseshoe_chaos.ini") + " --out " + out) == 0);
    CHECK(json::parse(slurp(out))["options"]["max_period"] == 1);
    CHECK(shell(bin + " verify-covering --config " + fixture("trig_face.ini") + " --out " + out) == 2);
    CHECK(shell(bin + " chaos-report --config " + fixture("malformed.ini") + " 2>/dev/null") == 4);
    CHECK(shell(bin + " chaos-report --tol nope --config " + fixture("horseshoe_chaos.ini") +
                " 2>/dev/null") == 4);
    CHECK(shell(bin + " no-such-command 2>/dev/null") == 4);
}
