#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "core/catalog.hpp"
#include "core/rotation_system.hpp"

namespace rotsys {

struct CrossingSummary {
    int n = 0;
    long crossing_count = 0;
    mpq_class noncrossing_k4_density;  // 1 - crossing_count / C(n,4)
    long long hill_value = 0;
    mpq_class ratio_to_hill;  // crossing_count / hill_value
};

// Number of 4-subsets of V(R) whose induced subsystem is not the non-crossing
// K4 system. Requires v(R) >= 4; realizability is the caller's concern.
long crossing_count(const RotationSystem& r);

// Exact 1 - crossing_count(r)/C(n,4).
mpq_class noncrossing_k4_density(const RotationSystem& r);

// floor(n/2) floor((n-1)/2) floor((n-2)/2) floor((n-3)/2) / 4, n >= 3.
long long hill_number(long long n);

// floor(p/2) floor((p-1)/2) floor(q/2) floor((q-1)/2), p,q >= 1.
long long zarankiewicz(long long p, long long q);

// ceil(cr_m * C(n,4) / C(m,4)): the counting lower bound lifted from m to n.
// Requires n >= m >= 5.
mpz_class counting_lift(int m, const mpz_class& cr_m, int n);

// The pre-ceiling coefficient of n(n-1)(n-2)(n-3) in the lift: cr_m / (24 C(m,4)).
mpq_class counting_lift_coefficient(int m, const mpz_class& cr_m);

// (1 - d) / (3/8): the asymptotic ratio of the crossing lower bound to the
// conjectured crossing number implied by a non-crossing-K4 density bound d.
// Requires 0 <= d <= 1.
mpq_class density_to_hill_ratio(const mpq_class& d);

CrossingSummary crossing_summary(const RotationSystem& r);

// All 5-subsystems belong to the class's size-5 catalog.
bool is_in_class(const RotationSystem& r, const Labeled5Lookup& lookup);

// Decimal rendering of an exact rational, truncated toward zero to the given
// number of fractional digits.
std::string decimal_string(const mpq_class& q, int digits);

// Parses "p/q" or "p" into an exact rational (throws ParseError).
mpq_class parse_rational(const std::string& s);

std::string rational_string(const mpq_class& q);

}  // namespace rotsys
