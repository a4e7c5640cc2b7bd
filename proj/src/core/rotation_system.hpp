#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace rotsys {

// Hard cap for this code base: catalogs go up to n = 8 (C_8).
constexpr int kMaxN = 8;

// A rotation system on n vertices: for each vertex v, the cyclic order of the
// other n-1 vertices around v. Rotations are stored phase-normalized (each
// sequence begins with its smallest label); the cyclic order is the datum.
struct RotationSystem {
    uint8_t n = 0;
    std::array<std::array<uint8_t, kMaxN - 1>, kMaxN> rot{};

    bool operator==(const RotationSystem& o) const;
};

// Canonical serialization bytes; equal keys iff isomorphic systems.
// Ordered by plain byte comparison.
using Key = std::string;

// Parses the line format `v0:a,b,c;v1:...` (0-based labels, no whitespace).
// Accepts any phase and normalizes it. Throws std::invalid_argument on
// malformed input (bad structure, labels out of range, non-permutations).
RotationSystem parse_system(const std::string& line);

// Emits the line format, phase-normalized, without a trailing newline.
std::string format_system(const RotationSystem& r);

// Rotates every stored rotation so that it begins with its smallest label.
void normalize_phases(RotationSystem& r);

// Applies the vertex relabeling perm (perm[old] = new) and renormalizes.
RotationSystem relabel(const RotationSystem& r, const uint8_t* perm);

// Subsystem induced on the given vertex set; vertices are relabeled to
// 0..k-1 preserving their order. Throws std::invalid_argument if verts is not
// a nonempty duplicate-free subset of V(r).
RotationSystem induced_subsystem(const RotationSystem& r, const std::vector<int>& verts);

// Every rotation reversed as a cyclic order, then phase-normalized.
RotationSystem inverse(const RotationSystem& r);

// Concatenation of the phase-normalized rotations of vertices 0..n-1,
// one byte per label. Not itself canonical; see canonical_form.
Key serialize(const RotationSystem& r);

// Minimum of serialize(relabel(r, pi)) over all relabelings pi.
Key canonical_form(const RotationSystem& r);

// The relabeled system whose serialization equals canonical_form(r).
RotationSystem canonical_representative(const RotationSystem& r);

bool is_isomorphic(const RotationSystem& a, const RotationSystem& b);

// Exact fraction of |small|-subsets of V(big) inducing a subsystem
// isomorphic to small; 0 when small has more vertices than big.
mpq_class density(const RotationSystem& small, const RotationSystem& big);

// Key rendered as digits for display ("0123:4567:..." style grouping is not
// used; one digit per byte since labels are < 8).
std::string key_to_string(const Key& k);

// Enumerates all k-subsets of 0..n-1 in lexicographic order and calls fn with
// a pointer to the k chosen values.
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
    std::array<int, kMaxN> c{};
    for (int i = 0; i < k; ++i) c[i] = i;
    while (true) {
        fn(c.data());
        int i = k - 1;
        while (i >= 0 && c[i] == n - k + i) --i;
        if (i < 0) break;
        ++c[i];
        for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
    }
}

}  // namespace rotsys
