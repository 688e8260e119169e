#include "ptbox/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using ptbox::cli::run;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::current_path() / "cli_test_runs" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("spectrum writes JSON and a profile") {
    const fs::path dir = fresh_dir("spectrum");
    const Result r = invoke({"spectrum", "--L", "1", "--ell2", "0.1", "--n", "4", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "spectrum.json"));
    REQUIRE(j["modes"].size() == 4);
    CHECK(j["modes"][0]["k_re"].get<double>() == doctest::Approx(3.141592653589793));
    CHECK(j["unidirectional_modes"].size() == 1);
    CHECK(j["broken"] == false);
    CHECK(fs::exists(dir / "profile.csv"));
    // Floats are written with 17 significant digits.
    CHECK(slurp(dir / "spectrum.json").find("0.10000000000000001") != std::string::npos);
}

TEST_CASE("exit codes") {
    const fs::path dir = fresh_dir("codes");
    CHECK(invoke({"spectrum", "--ell2", "0.1", "--out-dir", dir.string()}).code == 2);
    CHECK(invoke({"spectrum", "--L", "1", "--bogus"}).code == 2);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"scatter", "--k-min", "2", "--k-max", "1", "--out-dir", dir.string()}).code == 2);
    CHECK(invoke({"spectrum", "--L", "1", "--out-dir", (dir / "missing").string()}).code == 2);
    const Result numeric = invoke({"kernel", "--ell2", "0.3183098861837907", "--out-dir", dir.string()});
    CHECK(numeric.code == 3);
    CHECK(numeric.err.find("k2_bound") != std::string::npos);
    CHECK(invoke({"spectrum", "--L", "1", "--ell2", "0.3183098861837907", "--out-dir", dir.string()}).code == 3);
}

TEST_CASE("config files supply defaults that flags override") {
    const fs::path dir = fresh_dir("config");
    const fs::path cfg = dir / "run.json";
    std::ofstream(cfg) << R"({"command": "spectrum", "L": 2, "ell2": 0.1, "n": 3, "out_dir": ")" << dir.string()
                       << R"("})";
    REQUIRE(invoke({"--config", cfg.string()}).code == 0);
    auto j = nlohmann::json::parse(slurp(dir / "spectrum.json"));
    CHECK(j["modes"].size() == 3);
    CHECK(j["config"]["L"].get<double>() == 2.0);
    REQUIRE(invoke({"spectrum", "--config", cfg.string(), "--n", "2"}).code == 0);
    j = nlohmann::json::parse(slurp(dir / "spectrum.json"));
    CHECK(j["modes"].size() == 2);

    std::ofstream(dir / "bad.json") << "{not json";
    CHECK(invoke({"spectrum", "--config", (dir / "bad.json").string()}).code == 2);
}

TEST_CASE("outputs are byte-identical across runs and job counts") {
    const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
    REQUIRE(invoke({"scatter", "--theta", "2", "--mu", "0.1", "--delta", "5", "--k-min", "0.1", "--k-max", "1.3",
                    "--steps", "2001", "--jobs", "1", "--out-dir", a.string()})
                .code == 0);
    setenv("PTBOX_JOBS", "4", 1);
    REQUIRE(invoke({"scatter", "--theta", "2", "--mu", "0.1", "--delta", "5", "--k-min", "0.1", "--k-max", "1.3",
                    "--steps", "2001", "--out-dir", b.string()})
                .code == 0);
    CHECK(slurp(a / "sweep.csv") == slurp(b / "sweep.csv"));
    CHECK(slurp(a / "fit.json") == slurp(b / "fit.json"));

    REQUIRE(invoke({"kernel", "--grid", "8", "--N", "200", "--out-dir", a.string()}).code == 0);
    setenv("PTBOX_JOBS", "bogus", 1);
    CHECK(invoke({"kernel", "--grid", "8", "--N", "200", "--out-dir", b.string()}).code == 2);
    unsetenv("PTBOX_JOBS");
    REQUIRE(invoke({"kernel", "--grid", "8", "--N", "200", "--jobs", "3", "--out-dir", b.string()}).code == 0);
    CHECK(slurp(a / "kernel.csv") == slurp(b / "kernel.csv"));
    CHECK(slurp(a / "kernel.json") == slurp(b / "kernel.json"));
}

TEST_CASE("inner and variational commands") {
    const fs::path dir = fresh_dir("inner");
    REQUIRE(invoke({"inner", "--L", "1", "--ell2", "0.1", "--gram", "4", "--out-dir", dir.string()}).code == 0);
    for (const char* f : {"gram_biorthogonal.csv", "gram_pt.csv", "gram_cpt.csv", "inner.json"}) CHECK(fs::exists(dir / f));
    const auto j = nlohmann::json::parse(slurp(dir / "inner.json"));
    CHECK(j["max_dev_cpt"].get<double>() < 1e-6);
    REQUIRE(invoke({"variational", "--n", "2", "--seed", "3", "--b-scale", "0.01", "--out-dir", dir.string()}).code == 0);
    CHECK(fs::exists(dir / "variational.json"));
}
