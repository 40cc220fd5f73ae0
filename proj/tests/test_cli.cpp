// Drives the dscsim executable end to end.
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "dsc/tensor.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args, const fs::path& dir) {
    const fs::path log = dir / "stdout.txt";
    const std::string cmd = std::string(DSCSIM_CLI) + " " + args + " > " + log.string() + " 2>" +
                            (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("simulate is deterministic and fused/sequential agree") {
    const fs::path dir = dsc::testing::scratch_dir("cli_sim");
    const fs::path a = dir / "a", b = dir / "b", s = dir / "s";
    REQUIRE(run("simulate --seed 5 --out " + a.string(), dir).code == 0);
    REQUIRE(run("simulate --seed 5 --out " + b.string(), dir).code == 0);
    REQUIRE(run("simulate --seed 5 --mode sequential --out " + s.string(), dir).code == 0);

    for (int i = 0; i < 13; ++i) {
        const std::string f = "L" + std::to_string(i) + ".ofmap";
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK(slurp(a / f) == slurp(s / f));
    }
    CHECK(slurp(a / "counters.csv") == slurp(b / "counters.csv"));
    CHECK(slurp(a / "counters.csv") != slurp(s / "counters.csv"));
    CHECK(slurp(a / "zero_stats.csv").rfind("layer,dwc_zero_fraction,pwc_zero_fraction\n", 0) == 0);

    const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest["seed"] == 5);

    const dsc::QuantTensor last = dsc::read_tensor(a / "L12.ofmap");
    CHECK(last.dims() == std::vector<std::size_t>{2, 2, 1024});
}

TEST_CASE("simulate from an explicit bundle") {
    const fs::path dir = dsc::testing::scratch_dir("cli_bundle");
    REQUIRE(run("simulate --seed 9 --dump-params --out " + (dir / "gen").string(), dir).code == 0);
    const fs::path params = dir / "gen" / "params";
    REQUIRE(run("simulate --weights " + params.string() + " --input " + (params / "input.t").string() + " --out " +
                    (dir / "replay").string(),
                dir)
                .code == 0);
    CHECK(slurp(dir / "gen" / "L12.ofmap") == slurp(dir / "replay" / "L12.ofmap"));

    fs::remove(params / "L3.dwc.ncv");
    CHECK(run("simulate --weights " + params.string() + " --out " + (dir / "x").string(), dir).code == 2);
    CHECK(slurp(dir / "stderr.txt").find("L3.dwc.ncv") != std::string::npos);
}

TEST_CASE("explore") {
    const fs::path dir = dsc::testing::scratch_dir("cli_explore");
    const Result r = run("explore --out " + dir.string(), dir);
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("top: La Tn=Tm=2 case6", 0) == 0);
    CHECK(r.out.find("intermediate elimination (raw): 40.1% total") != std::string::npos);
    const std::string red = slurp(dir / "reduction.csv");
    CHECK(red.find("raw,total,786432,471040,40.10") != std::string::npos);
    CHECK(red.find("tableII,") != std::string::npos);
    CHECK(slurp(dir / "dse.csv").rfind("order,Tn,Tm,Td,Tk,layer,", 0) == 0);

    REQUIRE(run("explore --convention tableII --out " + dir.string(), dir).code == 0);
    CHECK(slurp(dir / "reduction.csv").find("raw,") == std::string::npos);
    CHECK(run("explore --convention energy --out " + dir.string(), dir).code != 0);
}

TEST_CASE("timing") {
    const fs::path dir = dsc::testing::scratch_dir("cli_timing");
    REQUIRE(run("timing --crosscheck --out " + dir.string(), dir).code == 0);
    const auto t = nlohmann::json::parse(slurp(dir / "timing.json"));
    CHECK(t["layers"][12]["cycles"] == 9344);
    CHECK(std::abs(t["layers"][12]["gops"].get<double>() - 905.64) < 0.01);
    const double ns = t["total_ns"].get<double>();

    REQUIRE(run("timing --freq 0.5e9 --out " + dir.string(), dir).code == 0);
    const auto slow = nlohmann::json::parse(slurp(dir / "timing.json"));
    CHECK(slow["total_ns"].get<double>() == doctest::Approx(2 * ns));
}

TEST_CASE("golden") {
    const fs::path dir = dsc::testing::scratch_dir("cli_golden");
    const Result ok = run("golden --layers 0,12 --trials 2 --out " + dir.string(), dir);
    CHECK(ok.code == 0);
    CHECK(ok.out.find("trials 4") != std::string::npos);
    CHECK(slurp(dir / "golden.txt").find("PASS") != std::string::npos);

    const Result bad = run("golden --layers 12 --inject-fault --out " + dir.string(), dir);
    CHECK(bad.code == 5);
    CHECK(slurp(dir / "golden.txt").find("FAIL layer 12") != std::string::npos);
}

TEST_CASE("invalid networks and files") {
    const fs::path dir = dsc::testing::scratch_dir("cli_invalid");
    {
        std::ofstream(dir / "bad.json")
            << R"({"name":"bad","layers":[{"R":8,"C":8,"D":16,"K":64,"stride":1,"pad":1},)"
               R"({"R":8,"C":8,"D":32,"K":32,"stride":1,"pad":1}]})";
        std::ofstream(dir / "empty.json") << R"({"name":"empty","layers":[]})";
        std::ofstream(dir / "garbage.json") << "{";
    }
    CHECK(run("timing --network " + (dir / "bad.json").string() + " --out " + dir.string(), dir).code == 3);
    CHECK(slurp(dir / "stderr.txt").find("layer 1") != std::string::npos);
    CHECK(run("simulate --network " + (dir / "empty.json").string() + " --out " + dir.string(), dir).code == 3);
    CHECK(run("explore --network " + (dir / "garbage.json").string() + " --out " + dir.string(), dir).code == 2);
    CHECK(run("simulate --input " + (dir / "garbage.json").string() + " --out " + dir.string(), dir).code == 2);
}
