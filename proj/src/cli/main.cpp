#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rotsys.h"

#include "cli/capi_util.hpp"
#include "cli/pipeline.hpp"
#include "cli/settings.hpp"

namespace {

namespace fs = std::filesystem;
using cli::CatalogPtr;
using cli::CertificatePtr;
using cli::check;
using cli::FlagsetPtr;
using cli::obtain_catalog;
using cli::RsError;
using cli::SolutionPtr;
using cli::SystemPtr;
using cli::take;

std::string dec(const std::string& rational, int digits) {
    char* s = nullptr;
    check(rs_decimal_string(rational.c_str(), digits, &s), "rendering decimal");
    return take(s);
}

std::string frac(long long num, long long den) {
    long long g = std::gcd(num, den);
    num /= g;
    den /= g;
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

long long choose4(long long n) { return n * (n - 1) * (n - 2) * (n - 3) / 24; }

SystemPtr parse_system_arg(const std::string& line) {
    rs_system* raw = nullptr;
    check(rs_system_parse(line.c_str(), &raw), "parsing system");
    return SystemPtr(raw);
}

SystemPtr catalog_entry(const rs_catalog* cat, long i) {
    rs_system* raw = nullptr;
    check(rs_catalog_entry(cat, i, &raw), "reading catalog entry");
    return SystemPtr(raw);
}

struct CatalogInfo {
    std::string cls;
    int n = 0;
    long count = 0;
};

CatalogInfo info_of(const rs_catalog* cat) {
    CatalogInfo info;
    char* c = nullptr;
    check(rs_catalog_class(cat, &c), "reading catalog class");
    info.cls = take(c);
    check(rs_catalog_n(cat, &info.n), "reading catalog order");
    check(rs_catalog_size(cat, &info.count), "reading catalog size");
    return info;
}

void print_crossing_stats(const rs_catalog* cat, const CatalogInfo& info) {
    if (info.n < 4 || info.count == 0) return;
    std::map<long, long> histogram;
    for (long i = 0; i < info.count; ++i) {
        SystemPtr r = catalog_entry(cat, i);
        long c = 0;
        check(rs_system_crossings(r.get(), &c), "counting crossings");
        ++histogram[c];
    }
    long lo = histogram.begin()->first;
    long hi = histogram.rbegin()->first;
    std::printf("crossings min %ld max %ld\n", lo, hi);
    long long quads = choose4(info.n);
    std::printf("noncrossing-k4-density min %s max %s\n", frac(quads - hi, quads).c_str(),
                frac(quads - lo, quads).c_str());
    std::printf("histogram:\n");
    for (const auto& [c, m] : histogram) std::printf("  %ld %ld\n", c, m);
}

long equivalence_classes(const rs_catalog* cat, long count) {
    long classes = 0;
    for (long i = 0; i < count; ++i) {
        SystemPtr r = catalog_entry(cat, i);
        rs_system* raw = nullptr;
        check(rs_system_inverse(r.get(), &raw), "inverting system");
        SystemPtr inv(raw);
        long j = -1;
        check(rs_catalog_find(cat, inv.get(), &j), "locating inverse");
        // Count each {R, inverse} pair once; an absent inverse (which a
        // complete class catalog never produces) counts as its own class.
        if (j < 0 || j >= i) ++classes;
    }
    return classes;
}

int cmd_enumerate(const std::string& cls, const std::string& from, int to_n,
                  const std::string& out, int threads) {
    std::string from_file = from == "seed" ? "" : from;
    CatalogPtr cat = obtain_catalog(cls, to_n, from_file, threads);
    CatalogInfo info = info_of(cat.get());
    std::printf("class %s n %d count %ld\n", info.cls.c_str(), info.n, info.count);
    if (!out.empty()) {
        check(rs_catalog_save(cat.get(), out.c_str()), "saving catalog");
        std::printf("wrote %s\n", out.c_str());
    }
    return 0;
}

int cmd_stats(const std::string& file) {
    rs_catalog* raw = nullptr;
    check(rs_catalog_load(file.c_str(), &raw), "loading " + file);
    CatalogPtr cat(raw);
    CatalogInfo info = info_of(cat.get());
    std::printf("class %s\n", info.cls.c_str());
    std::printf("n %d\n", info.n);
    std::printf("count %ld\n", info.count);
    std::printf("equivalence classes %ld\n", equivalence_classes(cat.get(), info.count));
    print_crossing_stats(cat.get(), info);
    return 0;
}

int verify_membership(const rs_catalog* cat, const CatalogInfo& info, const std::string& cls) {
    if (info.n < 5) {
        std::printf("verify: systems below 5 vertices have no class test\n");
        return 0;
    }
    long failures = 0;
    for (long i = 0; i < info.count; ++i) {
        SystemPtr r = catalog_entry(cat, i);
        int ok = 0;
        check(rs_system_in_class(r.get(), cls.c_str(), &ok), "class membership");
        if (!ok) {
            char* line = nullptr;
            check(rs_system_format(r.get(), &line), "formatting system");
            std::printf("entry %ld not in class %s: %s\n", i, cls.c_str(), take(line).c_str());
            ++failures;
        }
    }
    if (failures > 0) {
        std::printf("verify: %ld of %ld entries fail the class test\n", failures, info.count);
        return 1;
    }
    std::printf("verified %ld systems in class %s\n", info.count, cls.c_str());
    return 0;
}

int cmd_crossings(const std::string& in, bool summary, bool verify, const std::string& cls) {
    if (fs::exists(in)) {
        rs_catalog* raw = nullptr;
        check(rs_catalog_load(in.c_str(), &raw), "loading " + in);
        CatalogPtr cat(raw);
        CatalogInfo info = info_of(cat.get());
        if (summary) {
            std::printf("class %s n %d count %ld\n", info.cls.c_str(), info.n, info.count);
            print_crossing_stats(cat.get(), info);
        } else {
            long long quads = info.n >= 4 ? choose4(info.n) : 0;
            for (long i = 0; i < info.count; ++i) {
                SystemPtr r = catalog_entry(cat.get(), i);
                long c = 0;
                check(rs_system_crossings(r.get(), &c), "counting crossings");
                std::printf("%ld crossings %ld density %s\n", i, c,
                            frac(quads - c, quads).c_str());
            }
        }
        if (verify) return verify_membership(cat.get(), info, cls.empty() ? info.cls : cls);
        return 0;
    }

    SystemPtr r = parse_system_arg(in);
    int n = 0;
    check(rs_system_size(r.get(), &n), "reading system size");
    std::printf("n %d\n", n);
    if (n >= 4) {
        long c = 0;
        check(rs_system_crossings(r.get(), &c), "counting crossings");
        char* d = nullptr;
        check(rs_system_noncrossing_k4_density(r.get(), &d), "computing density");
        std::string density = take(d);
        std::printf("crossings %ld\n", c);
        std::printf("noncrossing-k4-density %s (%s)\n", density.c_str(),
                    dec(density, 6).c_str());
        long long hill = 0;
        check(rs_hill_number(n, &hill), "hill number");
        std::printf("hill %lld\n", hill);
        if (hill > 0) std::printf("ratio-to-hill %s\n", frac(c, hill).c_str());
    }
    if (verify) {
        std::string use = cls.empty() ? "realizable" : cls;
        int ok = 0;
        check(rs_system_in_class(r.get(), use.c_str(), &ok), "class membership");
        std::printf("in class %s: %s\n", use.c_str(), ok ? "yes" : "no");
        return ok ? 0 : 1;
    }
    return 0;
}

int cmd_flags(const std::string& cls, int n, const std::string& config) {
    rs_flagset* raw = nullptr;
    check(rs_flagset_make(cls.c_str(), n, config.c_str(), &raw), "building flag bases");
    FlagsetPtr flags(raw);
    int types = 0;
    check(rs_flagset_types(flags.get(), &types), "counting types");
    std::printf("class %s n %d config %s\n", cls.c_str(), n, config.c_str());
    std::printf("types %d\n", types);
    for (int i = 0; i < types; ++i) {
        int d = 0;
        check(rs_flagset_dim(flags.get(), i, &d), "reading block dimension");
        std::printf("type %d dim %d\n", i, d);
    }
    long long ftotal = 0;
    long long vtotal = 0;
    check(rs_flagset_flag_total(flags.get(), &ftotal), "counting flags");
    check(rs_flagset_variable_total(flags.get(), &vtotal), "counting variables");
    std::printf("flags %lld\n", ftotal);
    std::printf("matrix variables %lld\n", vtotal);
    return 0;
}

int cmd_sdp_export(const std::string& cls, int n, const std::string& config,
                   const std::string& catalog_file, const std::string& qcache, int threads,
                   const std::string& problem) {
    CatalogPtr cat = obtain_catalog(cls, n, catalog_file, threads);
    rs_flagset* raw = nullptr;
    check(rs_flagset_make(cls.c_str(), n, config.c_str(), &raw), "building flag bases");
    FlagsetPtr flags(raw);
    check(rs_sdp_export(cat.get(), flags.get(), qcache.c_str(), threads, problem.c_str()),
          "exporting program");
    char* d = nullptr;
    check(rs_sha256_file(problem.c_str(), &d), "digesting program");
    std::printf("wrote %s\n", problem.c_str());
    std::printf("sha256 %s\n", take(d).c_str());
    return 0;
}

SolutionPtr import_solution_for(const std::string& solution, const rs_flagset* flags,
                                long catalog_size) {
    rs_solution* raw = nullptr;
    check(rs_solution_import(solution.c_str(), flags, catalog_size, &raw), "importing solution");
    return SolutionPtr(raw);
}

int cmd_sdp_import(const std::string& solution, const std::string& cls, int n,
                   const std::string& config, const std::string& catalog_file, long catalog_size,
                   int threads) {
    rs_flagset* raw = nullptr;
    check(rs_flagset_make(cls.c_str(), n, config.c_str(), &raw), "building flag bases");
    FlagsetPtr flags(raw);
    if (catalog_size <= 0) {
        CatalogPtr cat = obtain_catalog(cls, n, catalog_file, threads);
        check(rs_catalog_size(cat.get(), &catalog_size), "reading catalog size");
    }
    SolutionPtr sol = import_solution_for(solution, flags.get(), catalog_size);
    double lambda = 0;
    double asym = 0;
    check(rs_solution_lambda(sol.get(), &lambda), "reading solver objective");
    check(rs_solution_asymmetry(sol.get(), &asym), "reading solver asymmetry");
    std::printf("solution accepted\n");
    std::printf("solver bound %.9f\n", lambda);
    std::printf("max asymmetry %.3g\n", asym);
    return 0;
}

int cmd_sdp_round(const std::string& solution, const std::string& cls, int n,
                  const std::string& config, const std::string& catalog_file, int denom_bits,
                  const std::string& qcache, int threads, const std::string& out) {
    CatalogPtr cat = obtain_catalog(cls, n, catalog_file, threads);
    long catalog_size = 0;
    check(rs_catalog_size(cat.get(), &catalog_size), "reading catalog size");
    rs_flagset* raw = nullptr;
    check(rs_flagset_make(cls.c_str(), n, config.c_str(), &raw), "building flag bases");
    FlagsetPtr flags(raw);
    SolutionPtr sol = import_solution_for(solution, flags.get(), catalog_size);
    rs_certificate* craw = nullptr;
    check(rs_certificate_make(cat.get(), flags.get(), sol.get(), denom_bits, qcache.c_str(),
                              threads, &craw),
          "rounding to certificate");
    CertificatePtr cert(craw);
    check(rs_certificate_save(cert.get(), out.c_str()), "saving certificate");
    char* b = nullptr;
    check(rs_certificate_bound(cert.get(), &b), "reading bound");
    std::string bound = take(b);
    std::printf("wrote %s\n", out.c_str());
    std::printf("certified bound %s (%s)\n", bound.c_str(), dec(bound, 9).c_str());
    return 0;
}

int cmd_verify(const std::string& cert_file, const std::string& catalog_file,
               const std::string& qcache, int threads) {
    rs_certificate* craw = nullptr;
    check(rs_certificate_load(cert_file.c_str(), &craw), "loading " + cert_file);
    CertificatePtr cert(craw);
    rs_catalog* araw = nullptr;
    check(rs_catalog_load(catalog_file.c_str(), &araw), "loading " + catalog_file);
    CatalogPtr cat(araw);

    char* c = nullptr;
    check(rs_certificate_class(cert.get(), &c), "reading certificate class");
    std::string cls = take(c);
    int n = 0;
    check(rs_certificate_n(cert.get(), &n), "reading certificate order");
    check(rs_certificate_config(cert.get(), &c), "reading certificate config");
    std::string config = take(c);
    std::printf("certificate class %s n %d config %s\n", cls.c_str(), n, config.c_str());

    char* bound = nullptr;
    long argmax = -1;
    char* witness = nullptr;
    char* ratio = nullptr;
    check(rs_certificate_verify(cert.get(), cat.get(), qcache.c_str(), threads, &bound, &argmax,
                                &witness, &ratio),
          "verifying certificate");
    std::string b = take(bound);
    std::string w = take(witness);
    std::string rt = take(ratio);
    std::printf("certified bound %s (%s)\n", b.c_str(), dec(b, 9).c_str());
    std::printf("hill ratio %s (%s)\n", rt.c_str(), dec(rt, 8).c_str());
    std::printf("attained by entry %ld: %s\n", argmax, w.c_str());
    return 0;
}

int cmd_bound(const std::string& density) {
    char* r = nullptr;
    check(rs_density_to_hill_ratio(density.c_str(), &r), "converting density");
    std::string ratio = take(r);
    std::printf("hill ratio %s (%s)\n", ratio.c_str(), dec(ratio, 8).c_str());
    return 0;
}

std::string default_cache_dir() {
    const char* env = std::getenv("ROTSYS_CACHE_DIR");
    return env != nullptr && *env != '\0' ? env : "rotsys-cache";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "rotation systems of complete-graph drawings: catalogs, crossing statistics, and "
        "exact certificate tooling"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", rs_version());
    long threads = 0;
    app.add_option("--threads", threads, "worker threads (0 picks the machine default)");

    auto* enumerate = app.add_subcommand("enumerate", "build a catalog of rotation systems");
    std::string en_class = "realizable";
    std::string en_from = "seed";
    std::string en_out;
    int en_to = 0;
    enumerate->add_option("--class", en_class, "system class: realizable or convex");
    enumerate->add_option("--from", en_from, "'seed' or a catalog file to extend");
    enumerate->add_option("--to-n", en_to, "target vertex count")->required();
    enumerate->add_option("--out", en_out, "write the catalog to this file");

    auto* stats = app.add_subcommand("stats", "summarize a catalog file");
    std::string st_file;
    stats->add_option("file", st_file, "catalog file")->required();

    auto* crossings =
        app.add_subcommand("crossings", "crossing counts of a catalog or one system");
    std::string cr_in;
    std::string cr_class;
    bool cr_summary = false;
    bool cr_verify = false;
    crossings->add_option("--in", cr_in, "catalog file or a single system line")->required();
    crossings->add_flag("--summary", cr_summary, "aggregate instead of per-entry lines");
    crossings->add_flag("--verify", cr_verify, "re-check 5-subsystem class membership");
    crossings->add_option("--class", cr_class, "class for --verify (default: the catalog's)");

    auto* flags = app.add_subcommand("flags", "describe a flag configuration");
    std::string fl_class = "realizable";
    std::string fl_config = "full";
    int fl_n = 0;
    flags->add_option("--class", fl_class, "system class");
    flags->add_option("--n", fl_n, "target vertex count")->required();
    flags->add_option("--config", fl_config, "configuration name: full or sigma12");

    auto* sdp = app.add_subcommand("sdp", "semidefinite program plumbing");
    sdp->require_subcommand(1);
    std::string sd_class = "realizable";
    std::string sd_config = "full";
    std::string sd_catalog;
    std::string sd_problem;
    std::string sd_solution;
    std::string sd_qcache;
    std::string sd_out;
    int sd_n = 0;
    long sd_catalog_size = 0;
    int sd_denom = 32;

    auto* sdp_export = sdp->add_subcommand("export", "write the bounding program");
    sdp_export->add_option("--class", sd_class, "system class");
    sdp_export->add_option("--n", sd_n, "target vertex count")->required();
    sdp_export->add_option("--config", sd_config, "flag configuration");
    sdp_export->add_option("--catalog", sd_catalog, "catalog file (default: build from seeds)");
    sdp_export->add_option("--q-cache", sd_qcache, "cache directory for pair-density matrices");
    sdp_export->add_option("--problem", sd_problem, "output program file")->required();

    auto* sdp_import = sdp->add_subcommand("import", "validate a solver output file");
    sdp_import->add_option("--solution", sd_solution, "solver output file")->required();
    sdp_import->add_option("--class", sd_class, "system class");
    sdp_import->add_option("--n", sd_n, "target vertex count")->required();
    sdp_import->add_option("--config", sd_config, "flag configuration");
    sdp_import->add_option("--catalog", sd_catalog, "catalog file (default: build from seeds)");
    sdp_import->add_option("--catalog-size", sd_catalog_size,
                           "constraint count, skipping the catalog build");

    auto* sdp_round = sdp->add_subcommand("round", "round a solution to an exact certificate");
    sdp_round->add_option("--solution", sd_solution, "solver output file")->required();
    sdp_round->add_option("--class", sd_class, "system class");
    sdp_round->add_option("--n", sd_n, "target vertex count")->required();
    sdp_round->add_option("--config", sd_config, "flag configuration");
    sdp_round->add_option("--catalog", sd_catalog, "catalog file (default: build from seeds)");
    sdp_round->add_option("--denom-bound", sd_denom, "dyadic rounding precision in bits");
    sdp_round->add_option("--q-cache", sd_qcache, "cache directory for pair-density matrices");
    sdp_round->add_option("--out", sd_out, "output certificate file")->required();

    auto* verify = app.add_subcommand("verify", "verify a certificate in exact arithmetic");
    std::string ve_cert;
    std::string ve_catalog;
    std::string ve_qcache;
    verify->add_option("--certificate", ve_cert, "certificate file")->required();
    verify->add_option("--catalog", ve_catalog, "catalog file")->required();
    verify->add_option("--q-cache", ve_qcache, "cache directory for pair-density matrices");

    auto* bound = app.add_subcommand("bound", "convert a density bound to a crossing ratio");
    std::string bo_density;
    bound->add_option("--density", bo_density, "non-crossing-K4 density bound as p/q")
        ->required();

    auto* pipeline = app.add_subcommand("pipeline", "run all stages from a settings file");
    std::string pi_config;
    std::string pi_cache = default_cache_dir();
    pipeline->add_option("--config", pi_config, "flat key=value settings file")->required();
    pipeline->add_option("--cache", pi_cache, "cache root (default: $ROTSYS_CACHE_DIR)");

    CLI11_PARSE(app, argc, argv);

    int threads_i = static_cast<int>(threads);
    try {
        if (*enumerate) {
            std::string cls = enumerate->count("--class") > 0 || en_from == "seed" ? en_class : "";
            return cmd_enumerate(cls, en_from, en_to, en_out, threads_i);
        }
        if (*stats) return cmd_stats(st_file);
        if (*crossings) return cmd_crossings(cr_in, cr_summary, cr_verify, cr_class);
        if (*flags) return cmd_flags(fl_class, fl_n, fl_config);
        if (*sdp_export)
            return cmd_sdp_export(sd_class, sd_n, sd_config, sd_catalog, sd_qcache, threads_i,
                                  sd_problem);
        if (*sdp_import)
            return cmd_sdp_import(sd_solution, sd_class, sd_n, sd_config, sd_catalog,
                                  sd_catalog_size, threads_i);
        if (*sdp_round)
            return cmd_sdp_round(sd_solution, sd_class, sd_n, sd_config, sd_catalog, sd_denom,
                                 sd_qcache, threads_i, sd_out);
        if (*verify) return cmd_verify(ve_cert, ve_catalog, ve_qcache, threads_i);
        if (*bound) return cmd_bound(bo_density);
        if (*pipeline) {
            cli::Settings cfg = cli::Settings::from_file(pi_config);
            long t = app.count("--threads") > 0 ? threads : -1;
            return cli::run_pipeline(cfg, pi_cache, t);
        }
    } catch (const RsError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.status == RS_ERR_VERIFY_FAILED ? 2 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
