#pragma once

#include <vector>

#include "core/rotation_system.hpp"

namespace rotsys {

enum class SystemClass : uint8_t { realizable = 0, convex = 1 };

const char* class_name(SystemClass c);
SystemClass class_from_name(const std::string& name);  // throws ParseError

// The size-5 seed systems (canonical representatives, sorted by key).
// seed_systems(realizable) has six entries, seed_systems(convex) three; the
// convex ones are exactly the systems of straight-line 5-point drawings.
// Runs a validation suite before returning and throws CorruptSeedError on any
// mismatch.
const std::vector<RotationSystem>& seed_systems(SystemClass cls);

// Complete class catalogs below the seed size: n = 3 (the unique system) and
// n = 4 (the non-crossing and the crossing K4 system; both classes coincide
// for n <= 4 since both 4-systems have straight-line drawings).
const std::vector<RotationSystem>& small_systems(int n);

// The non-crossing K4 system (canonical representative).
const RotationSystem& noncrossing_k4();

}  // namespace rotsys
