#include "core/certificate.hpp"

#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/metrics.hpp"

namespace rotsys {

namespace {

const char* kMagic = "flagcert v1";

void write_rational_row(std::ofstream& f, const char* tag, const std::vector<mpq_class>& row) {
    f << tag;
    for (const auto& v : row) f << " " << rational_string(v);
    f << "\n";
}

}  // namespace

void save_certificate(const Certificate& c, const std::string& path) {
    if (c.sigmas.size() != c.factors.size() || c.ls.size() != c.factors.size())
        throw DimensionError("save_certificate: type arrays disagree");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write: " + path);
    f << kMagic << " class=" << class_name(c.cls) << " n=" << c.N << " config=" << c.config
      << " bound=" << rational_string(c.bound) << "\n";
    for (size_t i = 0; i < c.factors.size(); ++i) {
        const PsdFactor& m = c.factors[i];
        f << "type " << i << " l=" << c.ls[i] << " dim=" << m.dim << " rank=" << m.rows.size()
          << "\n";
        f << "sigma " << format_system(c.sigmas[i]) << "\n";
        write_rational_row(f, "diag", m.diag);
        for (const auto& row : m.rows) write_rational_row(f, "row", row);
    }
    f << "end\n";
    f.flush();
    if (!f) throw IoError("write failed: " + path);
}

namespace {

struct LineReader {
    std::ifstream f;
    std::string path;
    size_t lineno = 0;

    explicit LineReader(const std::string& p) : f(p, std::ios::binary), path(p) {
        if (!f) throw IoError("cannot open: " + p);
    }

    bool next(std::string& line) {
        if (!std::getline(f, line)) return false;
        ++lineno;
        return true;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(path + ":" + std::to_string(lineno) + ": " + msg);
    }
};

std::vector<mpq_class> parse_rational_row(LineReader& in, std::istringstream& rest,
                                          size_t expect) {
    std::vector<mpq_class> out;
    std::string tok;
    while (rest >> tok) {
        try {
            out.push_back(parse_rational(tok));
        } catch (const std::exception& e) {
            in.fail(e.what());
        }
    }
    if (out.size() != expect)
        in.fail("expected " + std::to_string(expect) + " values, got " +
                std::to_string(out.size()));
    return out;
}

}  // namespace

Certificate load_certificate(const std::string& path) {
    LineReader in(path);
    std::string line;
    if (!in.next(line)) in.fail("empty file");
    char cls_buf[32], config_buf[64], bound_buf[128];
    int n = 0;
    {
        std::string pattern = std::string(kMagic) + " class=%31s n=%d config=%63s bound=%127s";
        if (std::sscanf(line.c_str(), pattern.c_str(), cls_buf, &n, config_buf, bound_buf) != 4)
            in.fail("bad certificate header");
    }
    Certificate c;
    try {
        c.cls = class_from_name(cls_buf);
        c.bound = parse_rational(bound_buf);
    } catch (const std::exception& e) {
        in.fail(e.what());
    }
    c.N = n;
    c.config = config_buf;
    if (n < 4 || n > kMaxN) in.fail("unsupported catalog size");

    bool ended = false;
    while (in.next(line)) {
        if (line.empty()) continue;
        if (line == "end") {
            ended = true;
            break;
        }
        int idx = 0, l = 0, dim = 0;
        long rank = 0;
        if (std::sscanf(line.c_str(), "type %d l=%d dim=%d rank=%ld", &idx, &l, &dim, &rank) != 4)
            in.fail("expected a type header");
        if (idx != static_cast<int>(c.factors.size())) in.fail("type index out of order");
        if (l < 1 || l > kMaxN || dim < 1 || rank < 0 || rank > dim)
            in.fail("type header out of range");

        if (!in.next(line) || line.compare(0, 6, "sigma ") != 0) in.fail("expected a sigma line");
        try {
            c.sigmas.push_back(parse_system(line.substr(6)));
        } catch (const std::exception& e) {
            in.fail(e.what());
        }
        c.ls.push_back(l);

        PsdFactor m;
        m.dim = dim;
        if (!in.next(line)) in.fail("expected a diag line");
        std::istringstream diag(line);
        std::string tag;
        diag >> tag;
        if (tag != "diag") in.fail("expected a diag line");
        m.diag = parse_rational_row(in, diag, static_cast<size_t>(rank));
        for (const auto& v : m.diag)
            if (v < 0)
                throw InvalidCertificateError(path + ":" + std::to_string(in.lineno) +
                                              ": negative diagonal entry");
        for (long r = 0; r < rank; ++r) {
            if (!in.next(line)) in.fail("expected a row line");
            std::istringstream row(line);
            row >> tag;
            if (tag != "row") in.fail("expected a row line");
            m.rows.push_back(parse_rational_row(in, row, static_cast<size_t>(dim)));
        }
        c.factors.push_back(std::move(m));
    }
    if (!ended) throw ParseError(path + ": truncated certificate, no end marker");
    if (c.factors.empty()) throw ParseError(path + ": certificate has no types");
    return c;
}

namespace {

// <M, Q> over the full symmetric matrices; cells carry row <= col with the
// symmetric value, so off-diagonal terms count twice.
mpq_class block_inner(const std::vector<std::vector<mpq_class>>& m, const QSparse& q) {
    mpq_class t = 0;
    for (const auto& [row, col, v] : q.cells) {
        mpq_class term = v * m[row][col];
        t += row == col ? term : 2 * term;
    }
    return t;
}

FlagConfig config_for(const Certificate& c) {
    FlagConfig cfg;
    try {
        cfg = make_flag_config(c.cls, c.N, c.config);
    } catch (const std::exception& e) {
        throw InvalidCertificateError(std::string("unusable configuration: ") + e.what());
    }
    if (cfg.bases.size() != c.factors.size())
        throw InvalidCertificateError("certificate has " + std::to_string(c.factors.size()) +
                                      " types, configuration has " +
                                      std::to_string(cfg.bases.size()));
    for (size_t i = 0; i < cfg.bases.size(); ++i) {
        if (!(c.sigmas[i] == cfg.bases[i].sigma))
            throw InvalidCertificateError("type " + std::to_string(i) +
                                          ": sigma differs from the configuration");
        if (c.ls[i] != cfg.bases[i].l)
            throw InvalidCertificateError("type " + std::to_string(i) +
                                          ": flag size differs from the configuration");
        if (c.factors[i].dim != static_cast<int>(cfg.bases[i].flags.size()))
            throw InvalidCertificateError(
                "type " + std::to_string(i) + ": dimension " + std::to_string(c.factors[i].dim) +
                " != basis size " + std::to_string(cfg.bases[i].flags.size()));
        for (const auto& v : c.factors[i].diag)
            if (v < 0)
                throw InvalidCertificateError("type " + std::to_string(i) +
                                              ": negative diagonal entry");
        for (const auto& row : c.factors[i].rows)
            if (static_cast<int>(row.size()) != c.factors[i].dim)
                throw InvalidCertificateError("type " + std::to_string(i) + ": row width mismatch");
    }
    return cfg;
}

struct MaxResult {
    mpq_class value;
    long argmax = -1;
    std::string witness;
    long entries = 0;
};

MaxResult recompute_bound(const Catalog& cat, const FlagConfig& cfg,
                          const std::vector<std::vector<std::vector<mpq_class>>>& ms,
                          const std::string& cache_dir, int threads) {
    MaxResult best;
    bool first = true;
    for_each_constraint(cat, cfg, cache_dir, threads,
                        [&](long r, const RotationSystem& R, const mpq_class& b_r,
                            const std::vector<QSparse>& qs) {
                            mpq_class val = b_r;
                            for (size_t i = 0; i < ms.size(); ++i)
                                val += block_inner(ms[i], qs[i]);
                            if (first || val > best.value) {
                                first = false;
                                best.value = val;
                                best.argmax = r;
                                best.witness = format_system(R);
                            }
                            ++best.entries;
                        });
    return best;
}

}  // namespace

VerifyReport verify_certificate(const Certificate& c, const Catalog& cat,
                                const std::string& cache_dir, int threads) {
    if (cat.cls != c.cls || cat.n != c.N)
        throw InvalidCertificateError("certificate is for class=" +
                                      std::string(class_name(c.cls)) + " n=" +
                                      std::to_string(c.N) + ", catalog differs");
    FlagConfig cfg = config_for(c);
    std::vector<std::vector<std::vector<mpq_class>>> ms;
    for (const auto& f : c.factors) ms.push_back(factor_to_matrix(f));

    MaxResult best = recompute_bound(cat, cfg, ms, cache_dir, threads);
    VerifyReport report;
    report.recomputed = best.value;
    report.argmax = best.argmax;
    report.witness = best.witness;
    // Same conversion as density_to_hill_ratio, without its domain guard: a
    // recomputed bound above 1 is a vacuous but well-formed certificate.
    report.ratio = mpq_class(8, 3) * (1 - best.value);
    report.entries = best.entries;
    if (best.value > c.bound)
        throw VerifyFailedError("recomputed bound " + rational_string(best.value) +
                                    " exceeds the claimed " + rational_string(c.bound) +
                                    " at catalog entry " + std::to_string(best.argmax),
                                best.witness);
    return report;
}

Certificate make_certificate(const Catalog& cat, const FlagConfig& cfg, const SdpSolution& sol,
                             int denom_bits, const std::string& cache_dir, int threads) {
    if (cat.cls != cfg.cls || cat.n != cfg.N)
        throw DomainError("make_certificate: catalog and flag configuration disagree");
    if (sol.blocks.size() != cfg.bases.size())
        throw DimensionError("make_certificate: solution has " +
                             std::to_string(sol.blocks.size()) + " blocks, configuration has " +
                             std::to_string(cfg.bases.size()));
    Certificate c;
    c.cls = cat.cls;
    c.N = cat.n;
    c.config = cfg.name;
    std::vector<std::vector<std::vector<mpq_class>>> ms;
    for (size_t i = 0; i < cfg.bases.size(); ++i) {
        if (sol.blocks[i].size() != cfg.bases[i].flags.size())
            throw DimensionError("make_certificate: block " + std::to_string(i) +
                                 " dimension mismatch");
        c.sigmas.push_back(cfg.bases[i].sigma);
        c.ls.push_back(cfg.bases[i].l);
        c.factors.push_back(round_psd(sol.blocks[i], denom_bits));
        ms.push_back(factor_to_matrix(c.factors.back()));
    }
    c.bound = recompute_bound(cat, cfg, ms, cache_dir, threads).value;
    return c;
}

}  // namespace rotsys
