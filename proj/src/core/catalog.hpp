#pragma once

#include <bitset>
#include <string>
#include <vector>

#include "core/rotation_system.hpp"
#include "core/seeds.hpp"

namespace rotsys {

// A complete, duplicate-free set of canonical rotation systems of one size
// and one class, sorted by canonical key.
struct Catalog {
    SystemClass cls = SystemClass::realizable;
    uint8_t n = 0;
    std::vector<RotationSystem> entries;  // canonical representatives
    std::vector<Key> keys;                // serialize(entries[i]), ascending

    int find(const Key& k) const;  // index or -1
};

// Membership bitmap over the 6^5 packed encodings of labeled 5-vertex
// systems: bit set iff the encoded system is isomorphic to a member of the
// class's size-5 catalog.
struct Labeled5Lookup {
    std::bitset<7776> member;
};

// E_5 or C_5, from the validated seed data.
Catalog seed_catalog(SystemClass cls);

// Complete class catalog for 3 <= n <= 5 built without extension; for n >= 6
// callers extend. Sizes 3 and 4 coincide for both classes.
Catalog base_catalog(SystemClass cls, int n);

Labeled5Lookup build_lookup(const Catalog& size5);

// True iff every 5-subset of V(R) containing new_vertex induces a subsystem
// whose packed code is in the lookup. 5-subsets avoiding new_vertex are the
// caller's responsibility (extension preserves them).
bool passes_subsystem_filter(const RotationSystem& r, const Labeled5Lookup& lookup, int new_vertex);

// Complete catalog at size n+1 obtained by extending every entry with one new
// vertex in all ways, filtering 5-subsystems incrementally, canonicalizing
// and deduplicating. Deterministic output independent of thread count.
Catalog extend_catalog(const Catalog& cat, int threads = 0);

// One representative per {R, inverse(R)} equivalence class (the smaller key).
Catalog to_nonequivalent(const Catalog& cat);

// Inverse-closure followed by deduplication.
Catalog from_nonequivalent(const Catalog& cat);

// Catalog file I/O. Header line:
//   rotsys-catalog v1 class=<realizable|convex> n=<k> count=<m>
// then one system per line, sorted by canonical key.
void save_catalog(const Catalog& cat, const std::string& path);
Catalog load_catalog(const std::string& path);

// Packed code of the labeled 5-subsystem induced on five vertices of r given
// in ascending order (labels in the code are positions 0..4).
int pack5_induced(const RotationSystem& r, const int* quint);

}  // namespace rotsys
