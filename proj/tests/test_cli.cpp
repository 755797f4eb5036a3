#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fallowopt/cli.hpp"
#include "fallowopt/errors.hpp"

using namespace fallowopt;
namespace fs = std::filesystem;

namespace {

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "fallowopt");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("fallowopt_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = fs::temp_directory_path() / ("fallowopt_cli_" + name + ".cfg");
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("config text") {
    cli::RunConfig cfg;
    cli::apply_config_text("# heavy infestation\nK = 200\nP0=10000  # heavy\n\nmode = bounded\ntau_sup=60\nseed=9\n", cfg);
    CHECK(cfg.params.cap_k == 200);
    CHECK(cfg.params.p0 == 10000);
    CHECK(cfg.reg.mode == RegularizationMode::bounded);
    CHECK(cfg.reg.tau_sup == 60);
    CHECK(cfg.ars.seed == 9);
    CHECK_THROWS_AS(cli::apply_config_text("kappa = 1\n", cfg), InvalidInput);
    CHECK_THROWS_AS(cli::apply_config_text("beta = fast\n", cfg), InvalidInput);
    CHECK_THROWS_AS(cli::apply_config_text("beta\n", cfg), InvalidInput);
    CHECK(cli::parse_list("1, 2.5,3") == std::vector<double>{1, 2.5, 3});
    CHECK_THROWS_AS(cli::parse_list("1,,2"), InvalidInput);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(invoke({}).code == cli::kUsage);
    CHECK(invoke({"frobnicate"}).code == cli::kUsage);
    CHECK(invoke({"simulate", "--tmax", "abc"}).code == cli::kUsage);
    CHECK(invoke({"simulate", "--help"}).code == cli::kOk);

    const fs::path out = scratch("missing_config");
    const Invocation r = invoke({"optimize", "--config", "/nonexistent/fallow.cfg", "--out", out.string()});
    CHECK(r.code == cli::kUsage);
    CHECK(r.err.find("config") != std::string::npos);
    CHECK_FALSE(fs::exists(out));

    const fs::path bad = write_config("bad_key", "omega = 0.05\nlambda = 3\n");
    CHECK(invoke({"simulate", "--config", bad.string(), "--out", out.string()}).code == cli::kUsage);
    CHECK_FALSE(fs::exists(out));

    CHECK(invoke({"simulate", "--taus", "100,100", "--tmax", "1000", "--out", out.string()}).code ==
          cli::kUsage);
}

TEST_CASE("infeasible and numerical failures have their own codes") {
    const fs::path out = scratch("codes");
    CHECK(invoke({"optimize", "--mode", "bounded", "--tau-sup", "1", "--out", out.string()}).code ==
          cli::kInfeasible);
    const fs::path cfg = write_config("few_steps", "max_steps = 5\n");
    CHECK(invoke({"simulate", "--config", cfg.string(), "--out", out.string()}).code == cli::kNumerical);
}

TEST_CASE("simulate writes season and trajectory tables") {
    const fs::path out = scratch("simulate");
    const Invocation r = invoke({"simulate", "--taus", "37,37,37,37,37,37,37,37,37,37", "--out", out.string()});
    REQUIRE(r.code == cli::kOk);
    const std::string seasons = slurp(out / "seasons.csv");
    CHECK(seasons.rfind("k,t_k,tau_k,P_start,Y_k,R_k,P_after_harvest\n", 0) == 0);
    CHECK(line_count(seasons) == 12);
    CHECK(line_count(slurp(out / "trajectory.csv")) == 1 + 11 * 331);
    CHECK(r.out.find("seasons 11") != std::string::npos);
}

TEST_CASE("optimize output is reproducible") {
    const fs::path a = scratch("opt_a");
    const fs::path b = scratch("opt_b");
    const std::vector<std::string> base{"optimize", "--tmax", "1400", "--seed", "5"};
    auto with_out = [&](const fs::path& p) {
        auto args = base;
        args.insert(args.end(), {"--out", p.string()});
        return args;
    };
    REQUIRE(invoke(with_out(a)).code == cli::kOk);
    REQUIRE(invoke(with_out(b)).code == cli::kOk);
    CHECK(slurp(a / "result.json") == slurp(b / "result.json"));
    CHECK(slurp(a / "iterations.csv") == slurp(b / "iterations.csv"));

    const auto doc = nlohmann::json::parse(slurp(a / "result.json"));
    CHECK(doc["n_star"] == 3);
    CHECK(doc["seed"] == 5);
    CHECK(doc["tau_star"].size() == 3);
    CHECK(doc["penalized_profit"].is_null());
    CHECK(line_count(slurp(a / "iterations.csv")) == 1 + doc["evaluations"].get<std::size_t>() - 1);
}

TEST_CASE("scan-constant, check-monotonicity and compare") {
    const fs::path out = scratch("misc");
    REQUIRE(invoke({"scan-constant", "--tmax", "1400", "--grid-step", "10", "--out", out.string()}).code ==
            cli::kOk);
    CHECK(line_count(slurp(out / "xi.csv")) == 4);
    CHECK(line_count(slurp(out / "profit-vs-tau.csv")) == 1 + 75);

    REQUIRE(invoke({"check-monotonicity", "--p-grid", "0,100,200", "--out", out.string()}).code == cli::kOk);
    const auto report = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(report["monotone"] == true);
    CHECK(report["first_violation"].is_null());

    REQUIRE(invoke({"compare", "--tmax", "1400", "--schedule", "vertex=80,0,0", "--schedule",
                    "centre=26.5,26.5,27", "--out", out.string()})
                .code == cli::kOk);
    const std::string table = slurp(out / "comparison.csv");
    CHECK(line_count(table) == 1 + 8);
    CHECK(table.find("vertex,0,0,0,") != std::string::npos);
}

TEST_CASE("thread cap comes from the environment") {
    const fs::path out = scratch("threads");
    setenv("FALLOWOPT_THREADS", "0", 1);
    CHECK(invoke({"simulate", "--out", out.string()}).code == cli::kUsage);
    setenv("FALLOWOPT_THREADS", "2", 1);
    CHECK(invoke({"simulate", "--out", out.string()}).code == cli::kOk);
    unsetenv("FALLOWOPT_THREADS");
}
