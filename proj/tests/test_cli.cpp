#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "holodisc/experiments.hpp"
#include "holodisc/io.hpp"

using namespace holodisc;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HOLODISC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("holodisc_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("grid function serialization round trip") {
    auto grid = make_disc_grid(8, 32);
    Poly p;
    p.set_coeff(2, 1, Complex(0.25, -1.5));
    p.set_coeff(0, 0, Complex(3.0, 0.0));
    const GridFunction f = GridFunction::from_poly(grid, p);
    const json j = to_json(f);
    REQUIRE(j.at("n") == 1);
    REQUIRE(j.contains("degree_cap"));
    const PolyMap q = spectral_from_json(j);
    REQUIRE((q[0] - p).is_zero(0.0));

    // vector-valued round trip
    PolyMap pm(2);
    pm[0] = Poly::zeta();
    pm[1] = Poly::monomial(1, 1, Complex(0.0, 2.0));
    const json j2 = to_json(GridFunction::from_poly(grid, pm));
    const PolyMap q2 = spectral_from_json(j2);
    REQUIRE((q2[0] - pm[0]).is_zero(0.0));
    REQUIRE((q2[1] - pm[1]).is_zero(0.0));
}

TEST_CASE("structure and problem parsing") {
    const json dj = {{"kind", "polynomial"}, {"terms", {{1, 0, 0.1, 0.0}}}};
    const DeformationTensor A = deformation_from_json(dj);
    REQUIRE(std::abs(CMat(A(Complex(0.5, 0.0)))(0, 0) - Complex(0.05)) < 1e-15);
    const json back = to_json(A);
    REQUIRE(back.at("kind") == "polynomial");

    const json pj = {{"structure", {{"kind", "constant"}, {"n", 1}, {"value", {{0.25, 0.0}}}}},
                     {"boundary", {{"modes", {{1, 0.5, 0.0}, {-1, 0.5, 0.0}}}}},
                     {"anchor", {0.0}},
                     {"method", "picard"},
                     {"tol", 1e-8}};
    const ProblemSpec spec = problem_from_json(pj);
    REQUIRE(spec.method == SolveMethod::picard);
    REQUIRE(spec.tol == 1e-8);
    REQUIRE(spec.phi.is_real());

    REQUIRE_THROWS_AS(deformation_from_json(json{{"kind", "mystery"}}), ParseError);
}

TEST_CASE("experiment configs validate") {
    json base = {{"schema", "holodisc-config/1"}, {"kind", "transforms-check"}};
    REQUIRE_NOTHROW(parse_config(base));
    REQUIRE_THROWS_AS(parse_config(json{{"kind", "transforms-check"}}), ParseError);
    REQUIRE_THROWS_AS(parse_config(json{{"schema", "holodisc-config/1"}, {"kind", "nope"}}),
                      ParseError);
    json badgrid = base;
    badgrid["grid"] = {8, 20};
    REQUIRE_THROWS_AS(parse_config(badgrid), ValidationError);
    json badtol = base;
    badtol["tol"] = -1.0;
    REQUIRE_THROWS_AS(parse_config(badtol), ValidationError);
    json mismatch = base;
    REQUIRE_THROWS_AS(parse_config(mismatch, "solve"), ValidationError);
}

TEST_CASE("cli runs the shipped solve config") {
    const fs::path out = temp_dir("solve");
    const std::string cfg = std::string(HOLODISC_CONFIG_DIR) + "/solve_linear.json";
    REQUIRE(run_cli("solve --config " + cfg + " --out " + out.string()) == 0);
    REQUIRE(fs::exists(out / "report.json"));
    REQUIRE(fs::exists(out / "summary.txt"));
    REQUIRE(fs::exists(out / "series.csv"));
    REQUIRE(fs::exists(out / "residuals.dat"));
    const json rep = load_json_file((out / "report.json").string());
    REQUIRE(rep.at("pass") == true);
    REQUIRE(rep.contains("linear_match_error"));
    REQUIRE(rep.at("linear_match_error").get<double>() <= 1e-8);
    // .dat files carry a comment-prefixed header
    const std::string dat = slurp(out / "residuals.dat");
    REQUIRE(dat.rfind("# ", 0) == 0);
}

TEST_CASE("cli exit codes for malformed and invalid configs") {
    const fs::path dir = temp_dir("errors");
    // malformed JSON -> 2
    const fs::path bad = dir / "bad.json";
    write_text_file(bad.string(), "{ not json");
    REQUIRE(run_cli("solve --config " + bad.string() + " --out " + (dir / "o1").string()) == 2);

    // missing required fields -> 2
    const fs::path missing = dir / "missing.json";
    write_text_file(missing.string(), "{\"schema\": \"holodisc-config/1\", \"kind\": \"solve\"}");
    REQUIRE(run_cli("solve --config " + missing.string() + " --out " + (dir / "o2").string()) == 2);

    // semantically invalid (inadmissible structure) -> 3
    const fs::path invalid = dir / "invalid.json";
    json cfg = {{"schema", "holodisc-config/1"},
                {"kind", "solve"},
                {"structure", {{"kind", "constant"}, {"n", 1}, {"value", {{0.9, 0.0}}}}},
                {"boundary", {{"modes", {{1, 0.5, 0.0}, {-1, 0.5, 0.0}}}}},
                {"anchor", {0.0}}};
    write_text_file(invalid.string(), cfg.dump());
    REQUIRE(run_cli("solve --config " + invalid.string() + " --out " + (dir / "o3").string()) == 3);

    // kind mismatch between CLI and config -> 3
    const std::string shipped = std::string(HOLODISC_CONFIG_DIR) + "/solve_linear.json";
    REQUIRE(run_cli("reflect --config " + shipped + " --out " + (dir / "o4").string()) == 3);

    // experiment FAIL -> 1 (unreachable tolerance)
    const fs::path failing = dir / "failing.json";
    json fcfg = {{"schema", "holodisc-config/1"},
                 {"kind", "transforms-check"},
                 {"identity_tol", 1e-30},
                 {"formula_tol", 1e-30}};
    write_text_file(failing.string(), fcfg.dump());
    REQUIRE(run_cli("transforms-check --config " + failing.string() + " --out " +
                    (dir / "o5").string()) == 1);
}

TEST_CASE("cli overrides for grid and tolerance") {
    const fs::path out = temp_dir("override");
    const std::string cfg = std::string(HOLODISC_CONFIG_DIR) + "/solve_constant.json";
    REQUIRE(run_cli("solve --config " + cfg + " --out " + out.string() + " --grid 12x32 --tol 1e-8") ==
            0);
    const json rep = load_json_file((out / "report.json").string());
    REQUIRE(rep.at("final_residual").get<double>() <= 1e-8);
}

TEST_CASE("reruns are byte-identical") {
    for (const std::string name : {std::string("transforms_check"), std::string("solve_constant"),
                                   std::string("lift_check")}) {
        const std::string cfg = std::string(HOLODISC_CONFIG_DIR) + "/" + name + ".json";
        const fs::path out1 = temp_dir(name + "_1");
        const fs::path out2 = temp_dir(name + "_2");
        std::string kind = load_json_file(cfg).at("kind").get<std::string>();
        REQUIRE(run_cli(kind + " --config " + cfg + " --out " + out1.string()) == 0);
        REQUIRE(run_cli(kind + " --config " + cfg + " --out " + out2.string()) == 0);
        REQUIRE(slurp(out1 / "report.json") == slurp(out2 / "report.json"));
        REQUIRE(slurp(out1 / "summary.txt") == slurp(out2 / "summary.txt"));
    }
}

TEST_CASE("HOLODISC_THREADS caps parallelism without changing results") {
    const fs::path dir = temp_dir("threads");
    json cfg = {{"schema", "holodisc-config/1"},
                {"kind", "converge"},
                {"grid", {10, 32}},
                {"threads", 4},
                {"structure", {{"kind", "constant"}, {"n", 1}, {"value", {{0.25, 0.0}}}}},
                {"boundary", {{"modes", {{1, 0.5, 0.0}, {-1, 0.5, 0.0}}}}},
                {"anchor", {0.0}},
                {"schedule", {{"from", 4}, {"to", 9}}}};
    const fs::path cfile = dir / "converge.json";
    write_text_file(cfile.string(), cfg.dump());
    const std::string base_cmd =
        std::string(HOLODISC_CLI_PATH) + " converge --config " + cfile.string();
    const auto run_env = [&](const std::string& env, const fs::path& out) {
        const std::string cmd = env + " " + base_cmd + " --out " + out.string() + " > /dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    REQUIRE(run_env("HOLODISC_THREADS=1", dir / "seq") == 0);
    REQUIRE(run_env("HOLODISC_THREADS=2", dir / "par") == 0);
    REQUIRE(slurp(dir / "seq" / "report.json") == slurp(dir / "par" / "report.json"));
}

TEST_CASE("library-level experiment runners expose pass flags") {
    json cfg = {{"schema", "holodisc-config/1"}, {"kind", "transforms-check"}};
    const ExperimentResult res = run_experiment(parse_config(cfg));
    REQUIRE(res.pass);
    REQUIRE(res.report.at("criteria").size() == 4);
    for (const auto& c : res.report.at("criteria")) REQUIRE(c.at("pass") == true);
}
