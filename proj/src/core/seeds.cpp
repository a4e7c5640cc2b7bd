#include "core/seeds.hpp"

#include <algorithm>
#include <map>

#include "core/errors.hpp"
#include "core/quads.hpp"

namespace rotsys {

const char* class_name(SystemClass c) {
    return c == SystemClass::realizable ? "realizable" : "convex";
}

SystemClass class_from_name(const std::string& name) {
    if (name == "realizable") return SystemClass::realizable;
    if (name == "convex") return SystemClass::convex;
    throw ParseError("unknown system class: " + name);
}

namespace {

// The six rotation systems of good drawings of K5 and the three convex
// (straight-line) ones, as canonical representatives sorted by key. Derived
// by the planarization search in tests/realizability_oracle.cpp and the
// straight-line constructions in tests; the derivation re-runs in the test
// suite and must reproduce these lines exactly.
const char* const kRealizable5[] = {
    "0:1,2,3,4;1:0,2,3,4;2:0,1,3,4;3:0,1,2,4;4:0,1,2,3",
    "0:1,2,3,4;1:0,2,3,4;2:0,1,3,4;3:0,1,4,2;4:0,1,3,2",
    "0:1,2,3,4;1:0,2,3,4;2:0,1,3,4;3:0,4,1,2;4:0,3,1,2",
    "0:1,2,3,4;1:0,2,3,4;2:0,1,4,3;3:0,1,2,4;4:0,1,3,2",
    "0:1,2,3,4;1:0,2,4,3;2:0,1,3,4;3:0,1,4,2;4:0,3,1,2",
    "0:1,2,3,4;1:0,3,4,2;2:0,1,4,3;3:0,2,4,1;4:0,3,2,1",
};
const char* const kConvex5[] = {
    "0:1,2,3,4;1:0,2,3,4;2:0,1,3,4;3:0,1,2,4;4:0,1,2,3",
    "0:1,2,3,4;1:0,2,3,4;2:0,1,4,3;3:0,1,2,4;4:0,1,3,2",
    "0:1,2,3,4;1:0,3,4,2;2:0,1,4,3;3:0,2,4,1;4:0,3,2,1",
};

int crossing_quads(const RotationSystem& r) {
    int c = 0;
    for_each_subset(r.n, 4, [&](const int* q) {
        c += quad_table()[pack4_induced(r, q[0], q[1], q[2], q[3])].cls != QuadClass::planar;
    });
    return c;
}

void fail(const std::string& what) { throw CorruptSeedError("seed validation: " + what); }

std::vector<RotationSystem> load_and_validate(SystemClass cls) {
    std::vector<RotationSystem> e5;
    for (const char* line : kRealizable5) e5.push_back(parse_system(line));

    // Canonical, sorted, pairwise distinct.
    std::vector<Key> keys;
    for (auto& r : e5) {
        if (r.n != 5) fail("entry size");
        Key k = serialize(r);
        if (canonical_form(r) != k) fail("entry not stored canonically");
        keys.push_back(k);
    }
    for (size_t i = 0; i + 1 < keys.size(); ++i)
        if (!(keys[i] < keys[i + 1])) fail("entries not sorted/distinct");

    // Every 4-subsystem must be one of the two realizable K4 systems.
    for (auto& r : e5)
        for_each_subset(5, 4, [&](const int* q) {
            if (quad_table()[pack4_induced(r, q[0], q[1], q[2], q[3])].cls == QuadClass::nonrealizable)
                fail("nonrealizable 4-subsystem");
        });

    // Crossing counts: good drawings of K5 have odd counts; the multiset over
    // the six classes is {1,3,3,5,5,5}.
    std::vector<int> counts;
    for (auto& r : e5) counts.push_back(crossing_quads(r));
    std::vector<int> sorted_counts = counts;
    std::sort(sorted_counts.begin(), sorted_counts.end());
    if (sorted_counts != std::vector<int>{1, 3, 3, 5, 5, 5}) fail("crossing-count multiset");

    // Exactly one mutual inverse pair; the rest are self-inverse.
    int nonself = 0;
    bool paired = false;
    for (size_t i = 0; i < e5.size(); ++i) {
        Key ik = canonical_form(inverse(e5[i]));
        if (ik == keys[i]) continue;
        ++nonself;
        for (size_t j = 0; j < e5.size(); ++j)
            if (j != i && keys[j] == ik) paired = true;
    }
    if (nonself != 2 || !paired) fail("inverse pairing structure");

    if (cls == SystemClass::realizable) return e5;

    std::vector<RotationSystem> c5;
    std::vector<int> ccounts;
    for (const char* line : kConvex5) {
        RotationSystem r = parse_system(line);
        Key k = serialize(r);
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            fail("convex seed not among the realizable systems");
        c5.push_back(r);
        ccounts.push_back(crossing_quads(r));
    }
    std::sort(ccounts.begin(), ccounts.end());
    if (ccounts != std::vector<int>{1, 3, 5}) fail("convex crossing counts");
    for (size_t i = 0; i + 1 < c5.size(); ++i)
        if (!(serialize(c5[i]) < serialize(c5[i + 1]))) fail("convex entries not sorted");
    return c5;
}

}  // namespace

const std::vector<RotationSystem>& seed_systems(SystemClass cls) {
    static const std::vector<RotationSystem> e5 = load_and_validate(SystemClass::realizable);
    static const std::vector<RotationSystem> c5 = load_and_validate(SystemClass::convex);
    return cls == SystemClass::realizable ? e5 : c5;
}

const std::vector<RotationSystem>& small_systems(int n) {
    static const std::vector<RotationSystem> n3 = {parse_system("0:1,2;1:0,2;2:0,1")};
    static const std::vector<RotationSystem> n4 = [] {
        // Both size-4 classes come from straight-line drawings: triangle with
        // an interior point (non-crossing), convex quadrilateral (crossing).
        RotationSystem planar = canonical_representative(
            system_of_points({{0, 0}, {4, 0}, {2, 4}, {2, 1}}));
        RotationSystem crossing = canonical_representative(
            system_of_points({{0, 0}, {2, 0}, {2, 2}, {0, 2}}));
        std::vector<RotationSystem> v = {planar, crossing};
        if (serialize(v[1]) < serialize(v[0])) std::swap(v[0], v[1]);
        return v;
    }();
    if (n == 3) return n3;
    if (n == 4) return n4;
    throw DomainError("small_systems: only sizes 3 and 4");
}

const RotationSystem& noncrossing_k4() {
    for (const auto& r : small_systems(4))
        if (crossing_quads(r) == 0) return r;
    throw CorruptSeedError("no non-crossing K4 representative");
}

}  // namespace rotsys
