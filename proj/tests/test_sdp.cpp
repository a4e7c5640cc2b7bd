#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "core/errors.hpp"
#include "core/metrics.hpp"
#include "core/sdp_io.hpp"

using namespace rotsys;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << text;
}

struct ParsedEntry {
    long matno;
    int blk;
    long i, j;
    double v;
};

std::vector<ParsedEntry> parse_entries(const std::string& text, int skip_lines) {
    std::istringstream in(text);
    std::string line;
    for (int i = 0; i < skip_lines; ++i) REQUIRE(std::getline(in, line));
    std::vector<ParsedEntry> out;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        ParsedEntry e{};
        REQUIRE((ls >> e.matno >> e.blk >> e.i >> e.j >> e.v));
        out.push_back(e);
    }
    return out;
}

}  // namespace

TEST_CASE("sdpa export layout on the size-5 catalog") {
    Catalog cat = base_catalog(SystemClass::realizable, 5);
    FlagConfig cfg = make_flag_config(SystemClass::realizable, 5, "sigma12");
    REQUIRE(cfg.bases.size() == 2);
    const long m = static_cast<long>(cat.entries.size());
    REQUIRE(m == 6);

    std::string path = temp_path("rotsys_test_export.dat-s");
    export_sdpa(cat, cfg, "", 1, path);
    std::string text = slurp(path);

    std::istringstream in(text);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line[0] == '"');
    REQUIRE(std::getline(in, line));
    CHECK(line == "6");
    REQUIRE(std::getline(in, line));
    CHECK(line == "3");
    REQUIRE(std::getline(in, line));
    {
        std::istringstream sizes(line);
        int d1 = 0, d2 = 0, dlp = 0;
        REQUIRE((sizes >> d1 >> d2 >> dlp));
        CHECK(d1 == static_cast<int>(cfg.bases[0].flags.size()));
        CHECK(d2 == static_cast<int>(cfg.bases[1].flags.size()));
        CHECK(dlp == -(m + 2));
    }
    REQUIRE(std::getline(in, line));
    {
        std::istringstream cs(line);
        std::vector<mpq_class> b = objective_vector(cat);
        for (long r = 0; r < m; ++r) {
            double c = 0;
            REQUIRE((cs >> c));
            CHECK(c == doctest::Approx(-b[r].get_d()).epsilon(1e-15));
        }
        double extra;
        CHECK(!(cs >> extra));
    }

    auto entries = parse_entries(text, 5);
    REQUIRE(entries.size() > 10);
    // The objective matrix pins down the two lambda halves.
    CHECK(entries[0].matno == 0);
    CHECK(entries[0].blk == 3);
    CHECK(entries[0].i == m + 1);
    CHECK(entries[0].v == -1.0);
    CHECK(entries[1].matno == 0);
    CHECK(entries[1].i == m + 2);
    CHECK(entries[1].v == 1.0);

    // Every constraint matrix carries its slack and both lambda entries, and
    // its block entries reproduce the pair-density matrices.
    long seen_j = 0;
    size_t at = 2;
    for_each_constraint(cat, cfg, "", 1,
                        [&](long r, const RotationSystem&, const mpq_class&,
                            const std::vector<QSparse>& qs) {
                            ++seen_j;
                            for (int i = 0; i < 2; ++i)
                                for (const auto& [row, col, v] : qs[i].cells) {
                                    REQUIRE(at < entries.size());
                                    const ParsedEntry& e = entries[at++];
                                    CHECK(e.matno == r + 1);
                                    CHECK(e.blk == i + 1);
                                    CHECK(e.i == row + 1);
                                    CHECK(e.j == col + 1);
                                    CHECK(e.v == doctest::Approx(v.get_d()).epsilon(1e-15));
                                }
                            for (int t = 0; t < 3; ++t) {
                                REQUIRE(at < entries.size());
                                CHECK(entries[at].blk == 3);
                                ++at;
                            }
                        });
    CHECK(seen_j == m);
    CHECK(at == entries.size());

    // Byte-stable across runs.
    std::string again = temp_path("rotsys_test_export2.dat-s");
    export_sdpa(cat, cfg, "", 1, again);
    CHECK(slurp(again) == text);
    std::remove(path.c_str());
    std::remove(again.c_str());

    Catalog wrong = base_catalog(SystemClass::convex, 5);
    CHECK_THROWS_AS(export_sdpa(wrong, cfg, "", 1, path), DomainError);
}

TEST_CASE("csdp solution import") {
    std::string path = temp_path("rotsys_test_import.sol");
    spit(path,
         "0.1 -0.2 0.3\n"
         "1 1 1 1 9.0\n"
         "2 1 1 1 1.5\n"
         "2 1 1 2 0.25\n"
         "2 2 2 3 -0.5\n"
         "2 3 4 4 0.75\n"
         "2 3 5 5 0.125\n");
    SdpSolution s = import_solution(path, {2, 3}, 5);
    CHECK(s.blocks[0][0][0] == 1.5);
    CHECK(s.blocks[0][0][1] == 0.25);
    CHECK(s.blocks[0][1][0] == 0.25);
    CHECK(s.blocks[1][1][2] == -0.5);
    CHECK(s.blocks[1][2][1] == -0.5);
    CHECK(s.lambda_plus == 0.75);
    CHECK(s.lambda_minus == 0.125);
    CHECK(s.max_asymmetry == 0);

    // Entries reported on both sides are averaged and the gap recorded.
    spit(path,
         "0\n"
         "2 1 1 2 0.5\n"
         "2 1 2 1 0.7\n");
    s = import_solution(path, {2, 3}, 5);
    CHECK(s.blocks[0][0][1] == doctest::Approx(0.6));
    CHECK(s.max_asymmetry == doctest::Approx(0.2));

    spit(path, "0\n2 1 1 2 0.5\n2 1 1 2 0.5\n");
    CHECK_THROWS_AS(import_solution(path, {2, 3}, 5), ParseError);
    spit(path, "0\n2 1 3 1 0.5\n");
    CHECK_THROWS_AS(import_solution(path, {2, 3}, 5), ParseError);
    spit(path, "0\n2 4 1 1 0.5\n");
    CHECK_THROWS_AS(import_solution(path, {2, 3}, 5), ParseError);
    spit(path, "0\n2 3 1 2 0.5\n");
    CHECK_THROWS_AS(import_solution(path, {2, 3}, 5), ParseError);
    spit(path, "0\n3 1 1 1 0.5\n");
    CHECK_THROWS_AS(import_solution(path, {2, 3}, 5), ParseError);
    spit(path, "0\n2 1 1 1 0.5 9\n");
    CHECK_THROWS_AS(import_solution(path, {2, 3}, 5), ParseError);
    CHECK_THROWS_AS(import_solution(temp_path("rotsys_no_such.sol"), {2}, 3), IoError);
    std::remove(path.c_str());
}

TEST_CASE("sdpa output import") {
    std::string path = temp_path("rotsys_test_import.out");
    spit(path,
         "phase.value  = pdOPT\n"
         "objValPrimal = -3.0e-01\n"
         "xMat = \n"
         "{\n"
         "{ {9.0, 9.0}, {9.0, 9.0} }\n"
         "{ 9.0, 9.0, 9.0, 9.0, 9.0 }\n"
         "}\n"
         "yMat = \n"
         "{\n"
         "{ {1.5, 0.25}, {0.25, 2.0} }\n"
         "{ 0.0, 0.1, 0.2, 0.75, 0.125 }\n"
         "}\n"
         "main loop time = 0.1 sec\n");
    SdpSolution s = import_solution(path, {2}, 5);
    CHECK(s.blocks[0][0][0] == 1.5);
    CHECK(s.blocks[0][0][1] == 0.25);
    CHECK(s.blocks[0][1][1] == 2.0);
    CHECK(s.lambda_plus == 0.75);
    CHECK(s.lambda_minus == 0.125);

    // Asymmetric full matrices are symmetrized with the gap recorded.
    spit(path, "yMat = \n{\n{ {1.0, 0.4}, {0.2, 1.0} }\n{ 0.0, 0.5, 0.25 }\n}\n");
    s = import_solution(path, {2}, 3);
    CHECK(s.blocks[0][0][1] == doctest::Approx(0.3));
    CHECK(s.max_asymmetry == doctest::Approx(0.2));

    spit(path, "yMat = \n{\n{ {1.0}, {0.2} }\n{ 0.0, 0.5, 0.25 }\n}\n");
    CHECK_THROWS_AS(import_solution(path, {2}, 3), ParseError);
    spit(path, "yMat = \n{\n{ {1.0, 0.0}, {0.0, 1.0} }\n");
    CHECK_THROWS_AS(import_solution(path, {2}, 3), ParseError);
    spit(path, "yMat = \n{\n{ {1.0, 0.0}, {0.0, 1.0} }\n}\n");
    CHECK_THROWS_AS(import_solution(path, {2}, 3), ParseError);
    spit(path, "no solution here\n");
    CHECK_THROWS_AS(import_solution(path, {2}, 3), ParseError);
    std::remove(path.c_str());
}

TEST_CASE("psd rounding produces exact dyadic factorizations") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    mpz_class two32;
    mpz_ui_pow_ui(two32.get_mpz_t(), 2, 32);

    for (int trial = 0; trial < 20; ++trial) {
        int d = 1 + static_cast<int>(rng() % 5);
        std::vector<std::vector<double>> w(d, std::vector<double>(d));
        for (auto& row : w)
            for (auto& x : row) x = u(rng);
        // Gram matrix, so the input is positive semidefinite up to roundoff.
        std::vector<std::vector<double>> m(d, std::vector<double>(d, 0.0));
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int k = 0; k < d; ++k) m[a][b] += w[k][a] * w[k][b];

        PsdFactor f = round_psd(m);
        CHECK(f.dim == d);
        CHECK(factor_distance(f, m) < 1e-7);
        for (const auto& v : f.diag) {
            CHECK(v > 0);
            CHECK(mpz_divisible_p(two32.get_mpz_t(), v.get_den_mpz_t()));
        }
        for (const auto& row : f.rows)
            for (const auto& v : row)
                CHECK(mpz_divisible_p(two32.get_mpz_t(), v.get_den_mpz_t()));

        auto exact = factor_to_matrix(f);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) CHECK(exact[a][b] == exact[b][a]);
    }
}

TEST_CASE("psd rounding clamps the negative part") {
    std::vector<std::vector<double>> m = {{1.0, 0.0}, {0.0, -1.0}};
    PsdFactor f = round_psd(m);
    REQUIRE(f.diag.size() == 1);
    std::vector<std::vector<double>> clamped = {{1.0, 0.0}, {0.0, 0.0}};
    CHECK(factor_distance(f, clamped) < 1e-9);

    // A fully negative matrix rounds to the zero factorization.
    std::vector<std::vector<double>> neg = {{-2.0, 0.5}, {0.5, -2.0}};
    PsdFactor z = round_psd(neg);
    CHECK(z.diag.empty());
    CHECK(factor_to_matrix(z)[0][0] == 0);
}

TEST_CASE("psd rounding input validation") {
    CHECK_THROWS_AS(round_psd({}), DimensionError);
    CHECK_THROWS_AS(round_psd({{1.0, 2.0}}), DimensionError);
    CHECK_THROWS_AS(round_psd({{1.0}}, 0), DomainError);
    std::vector<std::vector<double>> bad = {{std::nan("")}};
    CHECK_THROWS_AS(round_psd(bad), DomainError);
}

TEST_CASE("coarser denominators stay positive semidefinite by construction") {
    std::vector<std::vector<double>> m = {{2.0, 1.0}, {1.0, 2.0}};
    for (int bits : {4, 8, 16, 52}) {
        PsdFactor f = round_psd(m, bits);
        auto exact = factor_to_matrix(f);
        // Check xT M x >= 0 on a few rational probes.
        for (int a = -2; a <= 2; ++a)
            for (int b = -2; b <= 2; ++b) {
                mpq_class x0(a, 3), x1(b, 7);
                x0.canonicalize();
                x1.canonicalize();
                mpq_class quad = exact[0][0] * x0 * x0 + 2 * exact[0][1] * x0 * x1 +
                                 exact[1][1] * x1 * x1;
                CHECK(quad >= 0);
            }
        CHECK(factor_distance(f, m) < 4.0 / (1 << bits));
    }
}
