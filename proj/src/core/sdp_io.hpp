#pragma once

#include <string>
#include <vector>

#include <gmpxx.h>

#include "core/catalog.hpp"
#include "core/flags.hpp"

namespace rotsys {

// Writes the bounding program in sparse SDPA form. The dual of the exported
// problem is
//
//   maximize  -lambda_plus + lambda_minus
//   over      Y = blockdiag(M_1, ..., M_k, diag(s_1..s_m, l+, l-)) >= 0
//   where     <Q_{i,r}, M_i> summed over i, plus s_r - l+ + l-, equals -b_r
//             for every catalog entry r,
//
// so a feasible Y gives b_r + sum_i <M_i, Q_{i,r}> <= lambda for all r with
// lambda = l+ - l-. Blocks 1..k are the type blocks of cfg in order; the
// last block is diagonal of size m + 2 (one slack per constraint, then the
// two lambda halves). Matrix entries appear in a fixed order, so the output
// is byte-stable across runs.
void export_sdpa(const Catalog& cat, const FlagConfig& cfg, const std::string& cache_dir,
                 int threads, const std::string& path);

// A solver's dual matrix, read back per type block, plus the tail of the
// diagonal block.
struct SdpSolution {
    std::vector<std::vector<std::vector<double>>> blocks;  // dense, one per type
    double lambda_plus = 0;
    double lambda_minus = 0;
    // Largest |a_ij - a_ji| over entries a solver reported on both sides of
    // the diagonal. Informational; the import symmetrizes.
    double max_asymmetry = 0;
};

// Reads a solution for a program with the given type-block dimensions and
// diagonal block size. Two layouts are recognized: the CSDP solution format
// (y vector line, then "matno blk i j value" lines, matrix 2 holding the
// dual) and the SDPA output format (the brace-delimited yMat section).
SdpSolution import_solution(const std::string& path, const std::vector<int>& dims, long lp_size);

// Exact positive semidefinite surrogate of a numeric symmetric matrix:
// M* = sum_j diag[j] * rows[j] rows[j]^T with nonnegative rational diag, so
// M* is positive semidefinite by construction no matter how coarse the
// rounding was.
struct PsdFactor {
    int dim = 0;
    std::vector<mpq_class> diag;
    std::vector<std::vector<mpq_class>> rows;
};

// Spectral rounding: eigendecompose, drop nonpositive eigenvalues, and round
// eigenvalues and eigenvectors to dyadic rationals with denominator
// 2^denom_bits.
PsdFactor round_psd(const std::vector<std::vector<double>>& m, int denom_bits = 32);

// Dense rational matrix sum_j diag[j] * rows[j] rows[j]^T.
std::vector<std::vector<mpq_class>> factor_to_matrix(const PsdFactor& f);

// Largest absolute entry difference between factor_to_matrix(f) and m.
double factor_distance(const PsdFactor& f, const std::vector<std::vector<double>>& m);

}  // namespace rotsys
