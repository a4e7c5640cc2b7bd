#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "json.hpp"

// Drives the installed command-line binary as a subprocess. The test runner
// provides ROTSYS_CLI (path to the binary) and ROTSYS_TOOLS (directory with
// the solver script).

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string cli() {
    const char* p = std::getenv("ROTSYS_CLI");
    REQUIRE_MESSAGE(p != nullptr, "ROTSYS_CLI must point at the binary under test");
    return p;
}

std::string tools_dir() {
    const char* p = std::getenv("ROTSYS_TOOLS");
    REQUIRE_MESSAGE(p != nullptr, "ROTSYS_TOOLS must point at the tools directory");
    return p;
}

fs::path work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "rotsys_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run(const std::string& cmd) {
    FILE* p = ::popen((cmd + " 2>&1").c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    size_t k = 0;
    while ((k = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, k);
    int rc = ::pclose(p);
    RunResult res;
    res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    res.out = out;
    return res;
}

void spit(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << text;
}

std::string slurp(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("version and usage") {
    RunResult v = run(cli() + " --version");
    CHECK(v.status == 0);
    CHECK(contains(v.out, "."));

    RunResult bare = run(cli());
    CHECK(bare.status != 0);
}

TEST_CASE("enumerate and stats") {
    fs::path cat6 = work_dir() / "e6.txt";
    RunResult en = run(cli() + " enumerate --class realizable --to-n 6 --out " + cat6.string());
    REQUIRE(en.status == 0);
    CHECK(contains(en.out, "class realizable n 6 count 165"));

    RunResult st = run(cli() + " stats " + cat6.string());
    REQUIRE(st.status == 0);
    CHECK(contains(st.out, "count 165"));
    CHECK(contains(st.out, "equivalence classes 102"));
    CHECK(contains(st.out, "crossings min 3 max 15"));
    CHECK(contains(st.out, "noncrossing-k4-density min 0 max 4/5"));

    // Extending a saved size-5 catalog reaches the same place.
    fs::path cat5 = work_dir() / "e5.txt";
    REQUIRE(run(cli() + " enumerate --class realizable --to-n 5 --out " + cat5.string()).status ==
            0);
    RunResult ext =
        run(cli() + " enumerate --from " + cat5.string() + " --to-n 6");
    REQUIRE(ext.status == 0);
    CHECK(contains(ext.out, "count 165"));

    RunResult convex = run(cli() + " enumerate --class convex --to-n 7");
    REQUIRE(convex.status == 0);
    CHECK(contains(convex.out, "class convex n 7 count 233"));

    RunResult missing = run(cli() + " stats " + (work_dir() / "nothing.txt").string());
    CHECK(missing.status == 1);
    CHECK(contains(missing.out, "error:"));
}

TEST_CASE("crossings on a single system and a catalog") {
    std::string pentagon = "0:1,2,3,4;1:0,2,3,4;2:0,1,3,4;3:0,1,2,4;4:0,1,2,3";
    RunResult single = run(cli() + " crossings --in '" + pentagon + "'");
    REQUIRE(single.status == 0);
    CHECK(contains(single.out, "n 5"));
    CHECK(contains(single.out, "crossings 5"));
    CHECK(contains(single.out, "noncrossing-k4-density 0"));
    CHECK(contains(single.out, "hill 1"));

    RunResult verified = run(cli() + " crossings --verify --class convex --in '" + pentagon + "'");
    CHECK(verified.status == 0);
    CHECK(contains(verified.out, "in class convex: yes"));

    fs::path cat5 = work_dir() / "e5_crossings.txt";
    REQUIRE(run(cli() + " enumerate --class realizable --to-n 5 --out " + cat5.string()).status ==
            0);
    RunResult percat = run(cli() + " crossings --in " + cat5.string());
    REQUIRE(percat.status == 0);
    CHECK(contains(percat.out, "0 crossings"));

    RunResult summary = run(cli() + " crossings --summary --verify --in " + cat5.string());
    REQUIRE(summary.status == 0);
    CHECK(contains(summary.out, "count 6"));
    CHECK(contains(summary.out, "verified 6 systems in class realizable"));

    RunResult garbage = run(cli() + " crossings --in 'not a system'");
    CHECK(garbage.status == 1);
    CHECK(contains(garbage.out, "error:"));
}

TEST_CASE("bound conversion") {
    RunResult ok = run(cli() + " bound --density 26/35");
    REQUIRE(ok.status == 0);
    CHECK(contains(ok.out, "hill ratio 24/35"));
    CHECK(contains(ok.out, "0.68571428"));

    CHECK(run(cli() + " bound --density 7/5").status == 1);
    CHECK(run(cli() + " bound --density pi").status == 1);
}

TEST_CASE("flags report") {
    RunResult fl = run(cli() + " flags --class realizable --n 6 --config sigma12");
    REQUIRE(fl.status == 0);
    CHECK(contains(fl.out, "types 2"));
    CHECK(contains(fl.out, "type 0 dim 1"));
    CHECK(contains(fl.out, "type 1 dim 8"));
}

TEST_CASE("sdp export, import, round, verify via files") {
    fs::path dir = work_dir();
    fs::path cat5 = dir / "sdp_e5.txt";
    REQUIRE(run(cli() + " enumerate --class realizable --to-n 5 --out " + cat5.string()).status ==
            0);

    fs::path prob = dir / "sdp_problem.dat-s";
    RunResult ex = run(cli() + " sdp export --class realizable --n 5 --config sigma12 --catalog " +
                       cat5.string() + " --problem " + prob.string());
    REQUIRE(ex.status == 0);
    CHECK(contains(ex.out, "sha256 "));

    fs::path sol = dir / "sdp_zero.sol";
    spit(sol, "0.0 0.0 0.0 0.0 0.0 0.0\n");
    RunResult im = run(cli() + " sdp import --solution " + sol.string() +
                       " --class realizable --n 5 --config sigma12 --catalog-size 6");
    REQUIRE(im.status == 0);
    CHECK(contains(im.out, "solution accepted"));

    fs::path cert = dir / "sdp_cert.txt";
    RunResult ro = run(cli() + " sdp round --solution " + sol.string() +
                       " --class realizable --n 5 --config sigma12 --catalog " + cat5.string() +
                       " --denom-bound 32 --out " + cert.string());
    REQUIRE(ro.status == 0);
    CHECK(contains(ro.out, "certified bound 4/5 (0.800000000)"));

    RunResult ve = run(cli() + " verify --certificate " + cert.string() + " --catalog " +
                       cat5.string());
    REQUIRE(ve.status == 0);
    CHECK(contains(ve.out, "certified bound 4/5"));
    CHECK(contains(ve.out, "hill ratio 8/15"));
    CHECK(contains(ve.out, "attained by entry"));

    // An understated claim must be rejected with exit code 2.
    std::string text = slurp(cert);
    size_t at = text.find("bound=4/5");
    REQUIRE(at != std::string::npos);
    text.replace(at, std::string("bound=4/5").size(), "bound=3/5");
    fs::path bad_cert = dir / "sdp_cert_tampered.txt";
    spit(bad_cert, text);
    RunResult bad = run(cli() + " verify --certificate " + bad_cert.string() + " --catalog " +
                        cat5.string());
    CHECK(bad.status == 2);
    CHECK(contains(bad.out, "recomputed"));
}

TEST_CASE("pipeline end to end with the bundled solver") {
    fs::path dir = work_dir();
    fs::path cache = dir / "cache";
    std::string solver = "python3 " + tools_dir() + "/sdpa_solve.py {in} {out}";

    fs::path cfg = dir / "run5.cfg";
    spit(cfg, "class = realizable\nn = 5\nconfig = sigma12\nsolver = " + solver +
                  "\ndenom_bits = 32\n");
    RunResult first =
        run(cli() + " pipeline --config " + cfg.string() + " --cache " + cache.string());
    REQUIRE_MESSAGE(first.status == 0, first.out);
    CHECK(contains(first.out, "[6/6] verify: certified bound"));

    // Locate the run directory from the first line of output.
    std::istringstream lines(first.out);
    std::string line;
    std::getline(lines, line);
    REQUIRE(contains(line, "run directory "));
    fs::path run_dir = line.substr(std::string("run directory ").size());
    fs::path manifest_path = run_dir / "manifest.json";
    REQUIRE(fs::exists(manifest_path));

    json man = json::parse(slurp(manifest_path));
    CHECK(man["class"] == "realizable");
    CHECK(man["catalog_count"] == 6);
    double certified = std::stod(man["bound"]["decimal"].get<std::string>());
    CHECK(certified < 0.75);
    CHECK(certified > 0.6);
    CHECK(man["files"]["solution"]["sha256"].is_string());

    // A second invocation reuses every stage.
    RunResult again =
        run(cli() + " pipeline --config " + cfg.string() + " --cache " + cache.string());
    REQUIRE(again.status == 0);
    CHECK(contains(again.out, "[3/6] export: cached"));
    CHECK(contains(again.out, "[4/6] solve: cached"));
    CHECK(contains(again.out, "[5/6] round: cached"));

    // Replaying the recorded solver output through a fresh cache reproduces
    // the certificate byte for byte.
    fs::path replay_sol = dir / "replay.sol";
    fs::copy_file(run_dir / "solution.out", replay_sol);
    fs::path cfg2 = dir / "run5_replay.cfg";
    spit(cfg2, "class = realizable\nn = 5\nconfig = sigma12\nsolution = " + replay_sol.string() +
                   "\ndenom_bits = 32\n");
    fs::path cache2 = dir / "cache2";
    RunResult replay =
        run(cli() + " pipeline --config " + cfg2.string() + " --cache " + cache2.string());
    REQUIRE_MESSAGE(replay.status == 0, replay.out);
    std::istringstream lines2(replay.out);
    std::getline(lines2, line);
    fs::path run_dir2 = line.substr(std::string("run directory ").size());
    CHECK(slurp(run_dir2 / "certificate.txt") == slurp(run_dir / "certificate.txt"));

    json man2 = json::parse(slurp(run_dir2 / "manifest.json"));
    CHECK(man2["bound"]["certified"] == man["bound"]["certified"]);

    // Without a solver or a solution the run stops at the solve stage and
    // keeps the exported program.
    fs::path cfg3 = dir / "run5_nosolver.cfg";
    spit(cfg3, "class = realizable\nn = 5\nconfig = sigma12\n");
    RunResult stuck =
        run(cli() + " pipeline --config " + cfg3.string() + " --cache " + cache.string());
    CHECK(stuck.status == 1);
    CHECK(contains(stuck.out, "stage solve failed"));
    std::istringstream lines3(stuck.out);
    std::getline(lines3, line);
    while (!contains(line, "run directory ") && std::getline(lines3, line)) {
    }
    fs::path run_dir3 = line.substr(std::string("run directory ").size());
    CHECK(fs::exists(run_dir3 / "problem.dat-s"));
    json man3 = json::parse(slurp(run_dir3 / "manifest.json"));
    CHECK(man3["failed_stage"] == "solve");
}

TEST_CASE("pipeline smoke run at n = 6") {
    fs::path dir = work_dir();
    fs::path cache = dir / "cache6";
    std::string solver = "python3 " + tools_dir() + "/sdpa_solve.py {in} {out}";
    fs::path cfg = dir / "run6.cfg";
    spit(cfg, "class = realizable\nn = 6\nconfig = sigma12\nsolver = " + solver + "\n");
    RunResult res =
        run(cli() + " pipeline --config " + cfg.string() + " --cache " + cache.string());
    REQUIRE_MESSAGE(res.status == 0, res.out);

    std::istringstream lines(res.out);
    std::string line;
    std::getline(lines, line);
    fs::path run_dir = line.substr(std::string("run directory ").size());
    json man = json::parse(slurp(run_dir / "manifest.json"));
    CHECK(man["catalog_count"] == 165);
    double certified = std::stod(man["bound"]["decimal"].get<std::string>());
    CHECK(certified < 1.0);
    CHECK(certified > 0.5);
}
