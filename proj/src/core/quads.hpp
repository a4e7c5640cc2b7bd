#pragma once

#include <array>
#include <cstdint>

#include "core/rotation_system.hpp"

namespace rotsys {

// Classification of labeled 4-vertex rotation systems. A rotation of three
// elements has two cyclic orders, so a labeled 4-system packs into 4 bits.
enum class QuadClass : uint8_t {
    planar = 0,       // the non-crossing K4 system
    crossing = 1,     // the one-crossing K4 system
    nonrealizable = 2
};

struct QuadInfo {
    QuadClass cls = QuadClass::nonrealizable;
    // For crossing systems: the crossing is between edge {0, partner0} and the
    // edge on the remaining two vertices (labels are the system's own 0..3).
    uint8_t partner0 = 0;
};

// Packed code of a labeled 4-system: bit v is 0 if vertex v's rotation,
// phase-normalized as (min,a,b), has a < b, else 1.
int pack4(const RotationSystem& r);

// Packed code of the labeled subsystem induced on four vertices of r, given
// in ascending order; labels inside the code are the positions 0..3.
int pack4_induced(const RotationSystem& r, int a, int b, int c, int d);

// Table over all 16 codes, derived at startup from straight-line drawings on
// integer coordinates (a triangle with an interior point and a convex
// quadrilateral) closed under all 24 relabelings.
const std::array<QuadInfo, 16>& quad_table();

// Rotation system of a straight-line drawing: rotations are counterclockwise
// angular orders, computed with exact integer cross products. Requires
// general position (throws std::invalid_argument otherwise).
RotationSystem system_of_points(const std::vector<std::array<long, 2>>& pts);

}  // namespace rotsys
