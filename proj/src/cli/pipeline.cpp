#include "cli/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <unistd.h>

#include "json.hpp"
#include "rotsys.h"

#include "cli/capi_util.hpp"

namespace cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed(const Clock::time_point& t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string sha256_of(const fs::path& p) {
    char* d = nullptr;
    check(rs_sha256_file(p.string().c_str(), &d), "digesting " + p.string());
    return take(d);
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << text;
    f.flush();
    if (!f) throw std::runtime_error("cannot write " + p.string());
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

json file_record(const fs::path& run_dir, const std::string& name) {
    return json{{"path", name}, {"sha256", sha256_of(run_dir / name)}};
}

// A stage output is reusable when the previous manifest records it and the
// file on disk still hashes to the recorded digest.
bool fresh(const json& old_man, const std::string& key, const fs::path& run_dir) {
    if (!old_man.is_object() || !old_man.contains("files")) return false;
    const json& files = old_man["files"];
    if (!files.contains(key)) return false;
    const json& rec = files[key];
    if (!rec.contains("path") || !rec.contains("sha256")) return false;
    fs::path p = run_dir / rec["path"].get<std::string>();
    std::error_code ec;
    if (!fs::exists(p, ec)) return false;
    char* d = nullptr;
    if (rs_sha256_file(p.string().c_str(), &d) != RS_OK) return false;
    return take(d) == rec["sha256"].get<std::string>();
}

void write_manifest(const fs::path& run_dir, const json& man) {
    fs::path tmp = run_dir / "manifest.json.tmp";
    write_text(tmp, man.dump(2) + "\n");
    fs::rename(tmp, run_dir / "manifest.json");
}

}  // namespace

int run_pipeline(const Settings& cfg, const std::string& cache_root, long threads_cli) {
    std::string cls = cfg.get("class");
    int n = static_cast<int>(cfg.get_long("n"));
    std::string config = cfg.get("config", "full");
    int denom_bits = static_cast<int>(cfg.get_long("denom_bits", 32));
    int threads =
        static_cast<int>(threads_cli >= 0 ? threads_cli : cfg.get_long("threads", 0));
    std::string solver = cfg.get("solver", "");
    std::string ext_solution = cfg.get("solution", "");
    std::string catalog_src = cfg.get("catalog", "");

    fs::create_directories(cache_root);
    fs::path tmp_settings =
        fs::path(cache_root) / ("settings-tmp-" + std::to_string(::getpid()) + ".txt");
    write_text(tmp_settings, cfg.canonical());
    std::string digest = sha256_of(tmp_settings);
    fs::path run_dir = fs::path(cache_root) / ("run-" + digest.substr(0, 16));
    fs::create_directories(run_dir);
    fs::rename(tmp_settings, run_dir / "settings.txt");
    std::printf("run directory %s\n", run_dir.string().c_str());

    json old_man;
    if (fs::exists(run_dir / "manifest.json")) {
        try {
            std::ifstream f(run_dir / "manifest.json");
            old_man = json::parse(f);
        } catch (const std::exception&) {
            old_man = json();
        }
    }

    json man;
    man["tool_version"] = rs_version();
    man["class"] = cls;
    man["n"] = n;
    man["config"] = config;
    man["denom_bits"] = denom_bits;
    man["settings_digest"] = digest;
    man["files"]["settings"] = json{{"path", "settings.txt"}, {"sha256", digest}};
    json timings;
    timings["created"] = utc_now();
    Clock::time_point t_total = Clock::now();

    bool dirty = false;
    std::string current = "enumerate";
    fs::path qcache = run_dir / "qcache";
    try {
        Clock::time_point t0 = Clock::now();
        CatalogPtr cat;
        fs::path cat_path = run_dir / "catalog.txt";
        if (fresh(old_man, "catalog", run_dir)) {
            rs_catalog* raw = nullptr;
            check(rs_catalog_load(cat_path.string().c_str(), &raw), "loading cached catalog");
            cat.reset(raw);
            man["files"]["catalog"] = old_man["files"]["catalog"];
            std::printf("[1/6] enumerate: cached catalog.txt\n");
        } else {
            cat = obtain_catalog(cls, n, catalog_src, threads);
            check(rs_catalog_save(cat.get(), cat_path.string().c_str()), "saving catalog");
            man["files"]["catalog"] = file_record(run_dir, "catalog.txt");
            dirty = true;
            std::printf("[1/6] enumerate: wrote catalog.txt (%.1fs)\n", elapsed(t0));
        }
        long count = 0;
        check(rs_catalog_size(cat.get(), &count), "reading catalog size");
        man["catalog_count"] = count;
        timings["enumerate_seconds"] = elapsed(t0);

        current = "flags";
        t0 = Clock::now();
        rs_flagset* fraw = nullptr;
        check(rs_flagset_make(cls.c_str(), n, config.c_str(), &fraw), "building flag bases");
        FlagsetPtr flags(fraw);
        int types = 0;
        check(rs_flagset_types(flags.get(), &types), "counting types");
        json dims = json::array();
        for (int i = 0; i < types; ++i) {
            int d = 0;
            check(rs_flagset_dim(flags.get(), i, &d), "reading block dimension");
            dims.push_back(d);
        }
        long long ftotal = 0;
        long long vtotal = 0;
        check(rs_flagset_flag_total(flags.get(), &ftotal), "counting flags");
        check(rs_flagset_variable_total(flags.get(), &vtotal), "counting variables");
        man["flags"] = json{{"types", types},
                            {"dims", dims},
                            {"flag_total", ftotal},
                            {"variable_total", vtotal}};
        timings["flags_seconds"] = elapsed(t0);
        std::printf("[2/6] flags: %d types, %lld flags, %lld matrix variables\n", types, ftotal,
                    vtotal);

        current = "export";
        t0 = Clock::now();
        fs::path prob = run_dir / "problem.dat-s";
        if (!dirty && fresh(old_man, "problem", run_dir)) {
            man["files"]["problem"] = old_man["files"]["problem"];
            std::printf("[3/6] export: cached problem.dat-s\n");
        } else {
            fs::create_directories(qcache);
            check(rs_sdp_export(cat.get(), flags.get(), qcache.string().c_str(), threads,
                                prob.string().c_str()),
                  "exporting program");
            man["files"]["problem"] = file_record(run_dir, "problem.dat-s");
            dirty = true;
            std::printf("[3/6] export: wrote problem.dat-s (%.1fs)\n", elapsed(t0));
        }
        timings["export_seconds"] = elapsed(t0);

        current = "solve";
        t0 = Clock::now();
        fs::path sol = run_dir / "solution.out";
        if (!ext_solution.empty()) {
            std::string src_digest = sha256_of(ext_solution);
            man["files"]["solution_source"] =
                json{{"path", fs::absolute(ext_solution).string()}, {"sha256", src_digest}};
            bool reuse = !dirty && fresh(old_man, "solution", run_dir) &&
                         old_man.contains("files") &&
                         old_man["files"].contains("solution_source") &&
                         old_man["files"]["solution_source"].value("sha256", "") == src_digest;
            if (reuse) {
                std::printf("[4/6] solve: cached solution.out\n");
            } else {
                std::error_code ec;
                if (!(fs::exists(sol, ec) && fs::equivalent(ext_solution, sol, ec)))
                    fs::copy_file(ext_solution, sol, fs::copy_options::overwrite_existing);
                dirty = true;
                std::printf("[4/6] solve: copied %s\n", ext_solution.c_str());
            }
            man["files"]["solution"] = file_record(run_dir, "solution.out");
        } else if (!solver.empty()) {
            std::string cmd = replace_all(replace_all(solver, "{in}", prob.string()), "{out}",
                                          sol.string());
            man["solver_command"] = cmd;
            if (!dirty && fresh(old_man, "solution", run_dir)) {
                man["files"]["solution"] = old_man["files"]["solution"];
                std::printf("[4/6] solve: cached solution.out\n");
            } else {
                std::printf("[4/6] solve: %s\n", cmd.c_str());
                std::fflush(stdout);
                int rc = std::system(cmd.c_str());
                if (rc != 0)
                    throw std::runtime_error("solver command exited with status " +
                                             std::to_string(rc));
                std::error_code ec;
                if (!fs::exists(sol, ec))
                    throw std::runtime_error("solver left no output at " + sol.string());
                man["files"]["solution"] = file_record(run_dir, "solution.out");
                dirty = true;
            }
        } else {
            throw std::runtime_error(
                "no solver command and no solution file configured; the exported program is "
                "preserved at " +
                prob.string());
        }
        timings["solve_seconds"] = elapsed(t0);

        current = "round";
        t0 = Clock::now();
        fs::path cert_path = run_dir / "certificate.txt";
        CertificatePtr cert;
        if (!dirty && fresh(old_man, "certificate", run_dir)) {
            rs_certificate* raw = nullptr;
            check(rs_certificate_load(cert_path.string().c_str(), &raw),
                  "loading cached certificate");
            cert.reset(raw);
            man["files"]["certificate"] = old_man["files"]["certificate"];
            if (old_man.contains("solver_lambda")) man["solver_lambda"] = old_man["solver_lambda"];
            if (old_man.contains("solver_asymmetry"))
                man["solver_asymmetry"] = old_man["solver_asymmetry"];
            std::printf("[5/6] round: cached certificate.txt\n");
        } else {
            rs_solution* sraw = nullptr;
            check(rs_solution_import(sol.string().c_str(), flags.get(), count, &sraw),
                  "importing solution");
            SolutionPtr solution(sraw);
            double lambda = 0;
            double asym = 0;
            check(rs_solution_lambda(solution.get(), &lambda), "reading solver objective");
            check(rs_solution_asymmetry(solution.get(), &asym), "reading solver asymmetry");
            man["solver_lambda"] = lambda;
            man["solver_asymmetry"] = asym;
            rs_certificate* craw = nullptr;
            check(rs_certificate_make(cat.get(), flags.get(), solution.get(), denom_bits,
                                      qcache.string().c_str(), threads, &craw),
                  "rounding to certificate");
            cert.reset(craw);
            check(rs_certificate_save(cert.get(), cert_path.string().c_str()),
                  "saving certificate");
            man["files"]["certificate"] = file_record(run_dir, "certificate.txt");
            dirty = true;
            std::printf("[5/6] round: wrote certificate.txt (%.1fs)\n", elapsed(t0));
        }
        char* claimed = nullptr;
        check(rs_certificate_bound(cert.get(), &claimed), "reading claimed bound");
        man["claimed_bound"] = take(claimed);
        timings["round_seconds"] = elapsed(t0);

        current = "verify";
        t0 = Clock::now();
        char* bound = nullptr;
        long argmax = -1;
        char* witness = nullptr;
        char* ratio = nullptr;
        check(rs_certificate_verify(cert.get(), cat.get(), qcache.string().c_str(), threads,
                                    &bound, &argmax, &witness, &ratio),
              "verifying certificate");
        std::string b = take(bound);
        std::string w = take(witness);
        std::string rt = take(ratio);
        char* s = nullptr;
        check(rs_decimal_string(b.c_str(), 9, &s), "rendering bound");
        std::string bdec = take(s);
        check(rs_decimal_string(rt.c_str(), 8, &s), "rendering ratio");
        std::string rdec = take(s);
        man["bound"] = json{{"certified", b}, {"decimal", bdec},       {"ratio", rt},
                            {"ratio_decimal", rdec}, {"argmax", argmax}, {"witness", w}};
        timings["verify_seconds"] = elapsed(t0);
        std::printf("[6/6] verify: certified bound %s (%s)\n", b.c_str(), bdec.c_str());
        std::printf("hill ratio %s (%s), attained by entry %ld\n", rt.c_str(), rdec.c_str(),
                    argmax);
    } catch (const std::exception& e) {
        timings["total_seconds"] = elapsed(t_total);
        man["timings"] = timings;
        man["failed_stage"] = current;
        try {
            write_manifest(run_dir, man);
        } catch (const std::exception&) {
        }
        std::fprintf(stderr, "pipeline: stage %s failed: %s\n", current.c_str(), e.what());
        return 1;
    }

    timings["total_seconds"] = elapsed(t_total);
    man["timings"] = timings;
    write_manifest(run_dir, man);
    std::printf("manifest %s\n", (run_dir / "manifest.json").string().c_str());
    return 0;
}

}  // namespace cli
