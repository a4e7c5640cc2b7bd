#include "core/sdp_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "core/errors.hpp"

namespace rotsys {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void check_pair(const Catalog& cat, const FlagConfig& cfg) {
    if (cat.cls != cfg.cls || cat.n != cfg.N)
        throw DomainError("sdp export: catalog and flag configuration disagree");
    if (cat.entries.empty()) throw DomainError("sdp export: empty catalog");
}

}  // namespace

void export_sdpa(const Catalog& cat, const FlagConfig& cfg, const std::string& cache_dir,
                 int threads, const std::string& path) {
    check_pair(cat, cfg);
    const long m = static_cast<long>(cat.entries.size());
    const int k = static_cast<int>(cfg.bases.size());
    const long lp = m + 2;

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write: " + path);
    f << "\"rotsys bound program class=" << class_name(cat.cls) << " n=" << cfg.N
      << " config=" << cfg.name << "\n";
    f << m << "\n" << (k + 1) << "\n";
    for (int i = 0; i < k; ++i) f << static_cast<int>(cfg.bases[i].flags.size()) << " ";
    f << -lp << "\n";

    std::vector<mpq_class> b = objective_vector(cat);
    for (long r = 0; r < m; ++r) {
        if (r) f << " ";
        f << fmt(-b[r].get_d());
    }
    f << "\n";

    // F_0: the dual objective max -lambda_plus + lambda_minus.
    f << "0 " << (k + 1) << " " << (m + 1) << " " << (m + 1) << " -1\n";
    f << "0 " << (k + 1) << " " << (m + 2) << " " << (m + 2) << " 1\n";

    for_each_constraint(cat, cfg, cache_dir, threads,
                        [&](long r, const RotationSystem&, const mpq_class&,
                            const std::vector<QSparse>& qs) {
                            const long j = r + 1;
                            for (int i = 0; i < k; ++i)
                                for (const auto& [row, col, v] : qs[i].cells)
                                    f << j << " " << (i + 1) << " " << (row + 1) << " "
                                      << (col + 1) << " " << fmt(v.get_d()) << "\n";
                            f << j << " " << (k + 1) << " " << j << " " << j << " 1\n";
                            f << j << " " << (k + 1) << " " << (m + 1) << " " << (m + 1)
                              << " -1\n";
                            f << j << " " << (k + 1) << " " << (m + 2) << " " << (m + 2)
                              << " 1\n";
                        });
    f.flush();
    if (!f) throw IoError("write failed: " + path);
}

namespace {

struct Cursor {
    const std::string& path;
    size_t lineno = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(path + ":" + std::to_string(lineno) + ": " + msg);
    }
};

SdpSolution make_solution(const std::vector<int>& dims) {
    SdpSolution s;
    for (int d : dims)
        s.blocks.emplace_back(d, std::vector<double>(d, 0.0));
    return s;
}

// (block, i, j, v) sinks shared by both layouts; i, j are 1-based.
class Filler {
  public:
    Filler(SdpSolution& s, const std::vector<int>& dims, long lp_size, Cursor& at)
        : s_(s), dims_(dims), lp_(lp_size), at_(at) {
        for (int d : dims) seen_.emplace_back(d, std::vector<char>(d, 0));
    }

    void set(int blk, long i, long j, double v) {
        if (blk < 1 || blk > static_cast<int>(dims_.size()) + 1) at_.fail("block out of range");
        if (blk == static_cast<int>(dims_.size()) + 1) {
            if (i != j) at_.fail("off-diagonal entry in the diagonal block");
            if (i < 1 || i > lp_) at_.fail("diagonal index out of range");
            if (i == lp_ - 1) s_.lambda_plus = v;
            if (i == lp_) s_.lambda_minus = v;
            return;
        }
        int d = dims_[blk - 1];
        if (i < 1 || i > d || j < 1 || j > d) at_.fail("matrix index out of range");
        auto& mat = s_.blocks[blk - 1];
        auto& mk = seen_[blk - 1];
        int a = static_cast<int>(i) - 1, b = static_cast<int>(j) - 1;
        if (mk[a][b]) at_.fail("duplicate matrix entry");
        if (mk[b][a]) {
            s_.max_asymmetry = std::max(s_.max_asymmetry, std::fabs(mat[b][a] - v));
            v = (mat[b][a] + v) / 2;
        }
        mat[a][b] = mat[b][a] = v;
        mk[a][b] = 1;
    }

  private:
    SdpSolution& s_;
    const std::vector<int>& dims_;
    long lp_;
    Cursor& at_;
    std::vector<std::vector<std::vector<char>>> seen_;
};

SdpSolution import_csdp(std::ifstream& f, const std::string& path, const std::vector<int>& dims,
                        long lp_size) {
    Cursor at{path};
    SdpSolution s = make_solution(dims);
    Filler fill(s, dims, lp_size, at);

    std::string line;
    if (!std::getline(f, line)) at.fail("missing dual vector line");
    ++at.lineno;
    {
        std::istringstream ys(line);
        std::string tok;
        while (ys >> tok) {
            size_t used = 0;
            try {
                std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size()) at.fail("bad dual vector entry '" + tok + "'");
        }
    }
    while (std::getline(f, line)) {
        ++at.lineno;
        if (line.empty()) continue;
        std::istringstream in(line);
        int matno = 0, blk = 0;
        long i = 0, j = 0;
        double v = 0;
        if (!(in >> matno >> blk >> i >> j >> v)) at.fail("expected 'matno blk i j value'");
        std::string rest;
        if (in >> rest) at.fail("trailing tokens");
        if (matno == 1) continue;  // the dual slack matrix, not needed
        if (matno != 2) at.fail("matrix number must be 1 or 2");
        fill.set(blk, i, j, v);
    }
    return s;
}

// The brace-delimited yMat section of an SDPA output file. Matrix blocks are
// rows of rows; the diagonal block is one flat row.
SdpSolution import_sdpa_out(std::ifstream& f, const std::string& path,
                            const std::vector<int>& dims, long lp_size) {
    Cursor at{path};
    SdpSolution s = make_solution(dims);
    Filler fill(s, dims, lp_size, at);

    std::string line;
    bool found = false;
    while (std::getline(f, line)) {
        ++at.lineno;
        if (line.compare(0, 4, "yMat") == 0) {
            found = true;
            break;
        }
    }
    if (!found) throw ParseError(path + ": no yMat section");

    // Tokenize the section character by character, tracking brace depth.
    int depth = 0, blk = 0, row = 0, col = 0;
    bool done = false;
    std::string num;
    auto flush_number = [&] {
        if (num.empty()) return;
        size_t used = 0;
        double v = 0;
        try {
            v = std::stod(num, &used);
        } catch (const std::exception&) {
            at.fail("bad number '" + num + "'");
        }
        if (used != num.size()) at.fail("bad number '" + num + "'");
        num.clear();
        if (blk < 1) at.fail("number outside any block");
        ++col;
        if (blk <= static_cast<int>(dims.size())) {
            if (depth != 3) at.fail("matrix entries must sit in a row group");
            fill.set(blk, row, col, v);
        } else {
            if (depth != 2) at.fail("diagonal entries must sit in the block group");
            fill.set(blk, col, col, v);
        }
    };
    while (!done && std::getline(f, line)) {
        ++at.lineno;
        for (char c : line) {
            if ((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.' || c == 'e' ||
                c == 'E') {
                num += c;
                continue;
            }
            flush_number();
            if (c == '{') {
                ++depth;
                if (depth == 2) {
                    ++blk;
                    row = col = 0;
                } else if (depth == 3) {
                    ++row;
                    col = 0;
                } else if (depth > 3) {
                    at.fail("braces nested too deep");
                }
            } else if (c == '}') {
                if (depth == 0) at.fail("unbalanced '}'");
                --depth;
                if (depth == 2) {
                    if (blk > static_cast<int>(dims.size())) at.fail("nested diagonal block");
                    if (col != dims[blk - 1]) at.fail("short matrix row");
                } else if (depth == 1) {
                    if (blk <= static_cast<int>(dims.size())) {
                        if (row != dims[blk - 1]) at.fail("matrix block with missing rows");
                    } else if (col != lp_size) {
                        at.fail("diagonal block with missing entries");
                    }
                } else if (depth == 0) {
                    done = true;
                }
            } else if (c != ',' && c != ' ' && c != '\t' && c != '\r') {
                at.fail(std::string("unexpected character '") + c + "'");
            }
        }
        flush_number();
    }
    if (!done) throw ParseError(path + ": unterminated yMat section");
    if (blk != static_cast<int>(dims.size()) + 1)
        throw ParseError(path + ": yMat has " + std::to_string(blk) + " blocks, expected " +
                         std::to_string(dims.size() + 1));
    return s;
}

}  // namespace

SdpSolution import_solution(const std::string& path, const std::vector<int>& dims, long lp_size) {
    if (lp_size < 3) throw DomainError("import_solution: diagonal block too small");
    for (int d : dims)
        if (d < 1) throw DomainError("import_solution: nonpositive block dimension");
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open: " + path);
    std::string line;
    bool sdpa_out = false;
    while (std::getline(probe, line))
        if (line.compare(0, 4, "yMat") == 0) {
            sdpa_out = true;
            break;
        }
    std::ifstream f(path, std::ios::binary);
    return sdpa_out ? import_sdpa_out(f, path, dims, lp_size)
                    : import_csdp(f, path, dims, lp_size);
}

namespace {

mpq_class dyadic_round(double x, int bits) {
    if (!std::isfinite(x)) throw DomainError("round_psd: non-finite value");
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 2, static_cast<unsigned long>(bits));
    mpq_class scaled = mpq_class(x) * scale + mpq_class(1, 2);
    mpz_class n;
    mpz_fdiv_q(n.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    mpq_class out(n, scale);
    out.canonicalize();
    return out;
}

}  // namespace

PsdFactor round_psd(const std::vector<std::vector<double>>& m, int denom_bits) {
    const int d = static_cast<int>(m.size());
    if (d == 0) throw DimensionError("round_psd: empty matrix");
    if (denom_bits < 1 || denom_bits > 512) throw DomainError("round_psd: bad denominator width");
    for (const auto& row : m)
        if (static_cast<int>(row.size()) != d) throw DimensionError("round_psd: not square");

    Eigen::MatrixXd em(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) em(a, b) = (m[a][b] + m[b][a]) / 2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(em);
    if (es.info() != Eigen::Success) throw DomainError("round_psd: eigendecomposition failed");

    PsdFactor f;
    f.dim = d;
    for (int j = 0; j < d; ++j) {
        if (es.eigenvalues()(j) <= 0) continue;
        mpq_class lam = dyadic_round(es.eigenvalues()(j), denom_bits);
        if (lam <= 0) continue;
        std::vector<mpq_class> row(d);
        for (int a = 0; a < d; ++a) row[a] = dyadic_round(es.eigenvectors()(a, j), denom_bits);
        f.diag.push_back(std::move(lam));
        f.rows.push_back(std::move(row));
    }
    return f;
}

std::vector<std::vector<mpq_class>> factor_to_matrix(const PsdFactor& f) {
    const int d = f.dim;
    std::vector<std::vector<mpq_class>> out(d, std::vector<mpq_class>(d, mpq_class(0)));
    std::vector<mpq_class> scaled(d);
    for (size_t j = 0; j < f.rows.size(); ++j) {
        const auto& u = f.rows[j];
        if (static_cast<int>(u.size()) != d) throw DimensionError("factor row width mismatch");
        for (int a = 0; a < d; ++a) scaled[a] = f.diag[j] * u[a];
        for (int a = 0; a < d; ++a) {
            if (u[a] == 0) continue;
            for (int b = a; b < d; ++b) out[a][b] += scaled[a] * u[b];
        }
    }
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < a; ++b) out[a][b] = out[b][a];
    return out;
}

double factor_distance(const PsdFactor& f, const std::vector<std::vector<double>>& m) {
    if (static_cast<int>(m.size()) != f.dim) throw DimensionError("factor_distance: size mismatch");
    auto exact = factor_to_matrix(f);
    double worst = 0;
    for (int a = 0; a < f.dim; ++a)
        for (int b = 0; b < f.dim; ++b)
            worst = std::max(worst, std::fabs(exact[a][b].get_d() - m[a][b]));
    return worst;
}

}  // namespace rotsys
