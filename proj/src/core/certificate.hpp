#pragma once

#include <string>
#include <vector>

#include <gmpxx.h>

#include "core/catalog.hpp"
#include "core/flags.hpp"
#include "core/sdp_io.hpp"

namespace rotsys {

// A self-contained proof object: for the named flag configuration over one
// catalog, rational PSD factorizations M_i = U_i^T D_i U_i and a claimed
// bound A with b_R + sum_i <M_i, Q_{i,R}> <= A for every catalog entry R.
struct Certificate {
    SystemClass cls = SystemClass::realizable;
    int N = 0;
    std::string config;
    mpq_class bound;
    std::vector<int> ls;                   // flag size per type
    std::vector<RotationSystem> sigmas;    // fully labeled type per block
    std::vector<PsdFactor> factors;
};

void save_certificate(const Certificate& c, const std::string& path);

// Structural validation only: well-formed systems, nonnegative diagonals,
// consistent dimensions. Soundness is established by verify_certificate.
Certificate load_certificate(const std::string& path);

struct VerifyReport {
    mpq_class recomputed;  // A* = max over R of b_R + sum_i <M_i, Q_{i,R}>
    long argmax = -1;      // catalog index attaining A*
    std::string witness;   // that entry, printable
    mpq_class ratio;       // density_to_hill_ratio(A*)
    long entries = 0;
};

// Recomputes the bound from scratch in exact rational arithmetic. The
// claimed bound is used only as the acceptance threshold, never as output.
// Throws InvalidCertificateError on structural defects against the catalog
// and VerifyFailedError (with the witness entry) when A* exceeds the claim.
VerifyReport verify_certificate(const Certificate& c, const Catalog& cat,
                                const std::string& cache_dir, int threads);

// Assembles a certificate from solver output: rounds each dual block to an
// exact PSD factorization and records the recomputed bound of the rounded
// matrices as the claim, so the result always verifies.
Certificate make_certificate(const Catalog& cat, const FlagConfig& cfg, const SdpSolution& sol,
                             int denom_bits, const std::string& cache_dir, int threads);

}  // namespace rotsys
