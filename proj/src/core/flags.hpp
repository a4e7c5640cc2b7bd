#pragma once

#include <functional>
#include <string>
#include <tuple>
#include <vector>

#include <gmpxx.h>

#include "core/catalog.hpp"
#include "core/rotation_system.hpp"

namespace rotsys {

// A basis of sigma-flags: rooted systems of one size over one type. Flags are
// stored root-canonically: the base is relabeled so the roots carry labels
// 0..s-1 in root order and the non-root labeling minimizes the serialization.
// Two flags are equal exactly when their stored systems are equal.
struct FlagBasis {
    RotationSystem sigma;  // fully labeled type on vertices 0..s-1
    int l = 0;             // flag size
    std::vector<RotationSystem> flags;
    std::vector<Key> keys;  // serialize(flags[i]), ascending

    int s() const { return sigma.n; }
    int find(const Key& k) const;  // index or -1
};

// Root-canonical representative of a flag whose roots already sit at labels
// 0..s-1: minimizes the serialization over relabelings of the tail s..n-1.
RotationSystem flag_canonicalize(const RotationSystem& flag, int s);

// Induced subsystem of r on order[0..l-1], relabeled so order[i] gets label i.
RotationSystem induced_ordered(const RotationSystem& r, const int* order, int l);

// All root-canonical sigma-flags of size l whose base lies in cat_l.
FlagBasis enumerate_flags(const RotationSystem& sigma, int l, const Catalog& cat_l);

void save_flags(const FlagBasis& basis, SystemClass cls, int type_index, const std::string& path);
FlagBasis load_flags(const std::string& path);

// A named family of types and flag sizes over one class and target size N,
// with the flag bases enumerated. "full" is the production configuration
// (eight types at N=7 for realizable, five at N=8 for convex); "sigma12" is
// the two smallest types with the largest sizes fitting the target, for
// cheap end-to-end runs.
struct FlagConfig {
    SystemClass cls = SystemClass::realizable;
    int N = 0;
    std::string name;
    std::vector<FlagBasis> bases;
};

FlagConfig make_flag_config(SystemClass cls, int N, const std::string& name);

long long flag_total(const FlagConfig& cfg);      // sum of basis sizes
long long variable_total(const FlagConfig& cfg);  // independent off-diagonal entries: sum of d(d-1)/2

// Sparse symmetric pair-density matrix of one (type, catalog entry). Cells
// hold the upper triangle (row <= col); the value is the full symmetric
// entry, so <M, Q> doubles the off-diagonal terms.
struct QSparse {
    int type = 0;
    int dim = 0;
    std::vector<std::tuple<int, int, mpq_class>> cells;

    mpq_class total() const;  // sum over the full matrix
};

// Entry (F1, F2) is the probability, over a uniform injection theta of the
// type's vertices into V(big), a uniform (l-s)-subset X of the rest, and a
// uniform (l-s)-subset Y of what remains, that theta induces sigma
// label-preservingly, the flag on im(theta) u X is F1 and the one on
// im(theta) u Y is F2.
QSparse pair_density_matrix(const FlagBasis& basis, const RotationSystem& big);

// Same distribution, computed by direct enumeration of ordered (s+2(l-s))-
// tuples with no shared work; kept as a cross-check.
QSparse pair_density_matrix_slow(const FlagBasis& basis, const RotationSystem& big);

// Probability that a uniform injection of sigma's vertices into V(big)
// induces sigma label-preservingly.
mpq_class sigma_embedding_density(const RotationSystem& sigma, const RotationSystem& big);

// b_R = density of the non-crossing K4 system in R, per catalog entry.
std::vector<mpq_class> objective_vector(const Catalog& cat);

// Streams one constraint per catalog entry, in catalog order: the objective
// coefficient b_r and the pair-density matrices of every type. When
// cache_dir is nonempty, chunks of matrices are read from and written to
// disk (atomically, so interrupted runs resume); otherwise everything is
// computed in memory.
using ConstraintFn =
    std::function<void(long r, const RotationSystem& R, const mpq_class& b_r, const std::vector<QSparse>& qs)>;
void for_each_constraint(const Catalog& cat, const FlagConfig& cfg, const std::string& cache_dir,
                         int threads, const ConstraintFn& fn);

}  // namespace rotsys
