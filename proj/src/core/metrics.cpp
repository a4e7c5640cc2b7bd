#include "core/metrics.hpp"

#include "core/errors.hpp"
#include "core/quads.hpp"

namespace rotsys {

long crossing_count(const RotationSystem& r) {
    if (r.n < 4) throw DomainError("crossing_count: needs at least 4 vertices");
    long c = 0;
    for_each_subset(r.n, 4, [&](const int* q) {
        c += quad_table()[pack4_induced(r, q[0], q[1], q[2], q[3])].cls != QuadClass::planar;
    });
    return c;
}

static long choose4(long n) { return n * (n - 1) * (n - 2) * (n - 3) / 24; }

mpq_class noncrossing_k4_density(const RotationSystem& r) {
    mpq_class q(choose4(r.n) - crossing_count(r), choose4(r.n));
    q.canonicalize();
    return q;
}

long long hill_number(long long n) {
    if (n < 3) throw DomainError("hill_number: n >= 3 required");
    if (n > 100000) throw DomainError("hill_number: n too large");
    return (n / 2) * ((n - 1) / 2) * ((n - 2) / 2) * ((n - 3) / 2) / 4;
}

long long zarankiewicz(long long p, long long q) {
    if (p < 1 || q < 1) throw DomainError("zarankiewicz: p,q >= 1 required");
    if (p > 100000 || q > 100000) throw DomainError("zarankiewicz: arguments too large");
    return (p / 2) * ((p - 1) / 2) * (q / 2) * ((q - 1) / 2);
}

static mpz_class binom4(long n) {
    mpz_class t = n;
    t *= n - 1;
    t *= n - 2;
    t *= n - 3;
    return t / 24;
}

mpz_class counting_lift(int m, const mpz_class& cr_m, int n) {
    if (m < 5 || n < m) throw DomainError("counting_lift: n >= m >= 5 required");
    if (cr_m < 0) throw DomainError("counting_lift: cr_m >= 0 required");
    mpz_class num = cr_m * binom4(n);
    mpz_class den = binom4(m);
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return q;
}

mpq_class counting_lift_coefficient(int m, const mpz_class& cr_m) {
    if (m < 5) throw DomainError("counting_lift_coefficient: m >= 5 required");
    if (cr_m < 0) throw DomainError("counting_lift_coefficient: cr_m >= 0 required");
    mpq_class q(cr_m, binom4(m) * 24);
    q.canonicalize();
    return q;
}

mpq_class density_to_hill_ratio(const mpq_class& d) {
    if (d < 0 || d > 1) throw DomainError("density_to_hill_ratio: density outside [0,1]");
    mpq_class r = (1 - d) * mpq_class(8, 3);
    r.canonicalize();
    return r;
}

CrossingSummary crossing_summary(const RotationSystem& r) {
    CrossingSummary s;
    s.n = r.n;
    s.crossing_count = crossing_count(r);
    s.noncrossing_k4_density = noncrossing_k4_density(r);
    s.hill_value = hill_number(r.n);
    s.ratio_to_hill = mpq_class(s.crossing_count, static_cast<long>(s.hill_value));
    s.ratio_to_hill.canonicalize();
    return s;
}

bool is_in_class(const RotationSystem& r, const Labeled5Lookup& lookup) {
    if (r.n < 5) return true;
    bool ok = true;
    for_each_subset(r.n, 5, [&](const int* q) {
        if (ok && !lookup.member[pack5_induced(r, q)]) ok = false;
    });
    return ok;
}

std::string decimal_string(const mpq_class& q, int digits) {
    if (digits < 0) throw DomainError("decimal_string: digits >= 0 required");
    mpq_class a = q < 0 ? mpq_class(-q) : q;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    mpz_class scaled = (a.get_num() * scale) / a.get_den();  // floor: truncation toward zero
    mpz_class ip = scaled / scale;
    std::string out = (q < 0 && scaled != 0 ? "-" : "") + ip.get_str();
    if (digits > 0) {
        std::string frac = mpz_class(scaled % scale).get_str();
        frac.insert(frac.begin(), static_cast<size_t>(digits) - frac.size(), '0');
        out += "." + frac;
    }
    return out;
}

mpq_class parse_rational(const std::string& s) {
    if (s.empty()) throw ParseError("empty rational");
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (!(c == '/' || c == '-' || (c >= '0' && c <= '9')))
            throw ParseError("bad rational: " + s);
    }
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw ParseError("bad rational: " + s);
    if (q.get_den() == 0) throw ParseError("bad rational (zero denominator): " + s);
    q.canonicalize();
    return q;
}

std::string rational_string(const mpq_class& q) { return q.get_str(); }

}  // namespace rotsys
