#include "core/quads.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace rotsys {

namespace {

long cross(long ax, long ay, long bx, long by) { return ax * by - ay * bx; }

// True if segments pq and rs cross in their interiors (general position).
bool segments_cross(const std::array<long, 2>& p, const std::array<long, 2>& q,
                    const std::array<long, 2>& r, const std::array<long, 2>& s) {
    auto side = [](const std::array<long, 2>& a, const std::array<long, 2>& b,
                   const std::array<long, 2>& c) {
        return cross(b[0] - a[0], b[1] - a[1], c[0] - a[0], c[1] - a[1]);
    };
    long d1 = side(p, q, r), d2 = side(p, q, s);
    long d3 = side(r, s, p), d4 = side(r, s, q);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

RotationSystem system_of_points(const std::vector<std::array<long, 2>>& pts) {
    const int n = static_cast<int>(pts.size());
    if (n < 1 || n > kMaxN) throw std::invalid_argument("system_of_points: bad point count");
    RotationSystem r;
    r.n = static_cast<uint8_t>(n);
    for (int v = 0; v < n; ++v) {
        std::vector<int> others;
        for (int u = 0; u < n; ++u)
            if (u != v) others.push_back(u);
        // Counterclockwise angular order around pts[v], angle 0 first.
        auto half = [&](int u) {
            long dx = pts[u][0] - pts[v][0], dy = pts[u][1] - pts[v][1];
            return (dy > 0 || (dy == 0 && dx > 0)) ? 0 : 1;
        };
        std::sort(others.begin(), others.end(), [&](int a, int b) {
            int ha = half(a), hb = half(b);
            if (ha != hb) return ha < hb;
            long c = cross(pts[a][0] - pts[v][0], pts[a][1] - pts[v][1],
                           pts[b][0] - pts[v][0], pts[b][1] - pts[v][1]);
            if (c == 0) throw std::invalid_argument("system_of_points: collinear points");
            return c > 0;
        });
        for (int i = 0; i < n - 1; ++i) r.rot[v][i] = static_cast<uint8_t>(others[i]);
    }
    normalize_phases(r);
    return r;
}

int pack4(const RotationSystem& r) {
    int code = 0;
    for (int v = 0; v < 4; ++v)
        if (r.rot[v][1] > r.rot[v][2]) code |= 1 << v;
    return code;
}

int pack4_induced(const RotationSystem& r, int a, int b, int c, int d) {
    const int quad[4] = {a, b, c, d};
    int local[kMaxN];
    for (int i = 0; i < 4; ++i) local[quad[i]] = i;
    int code = 0;
    for (int i = 0; i < 4; ++i) {
        int v = quad[i];
        uint8_t seq[3];
        int k = 0;
        for (int j = 0; j + 1 < r.n; ++j) {
            int u = r.rot[v][j];
            if (u == a || u == b || u == c || u == d)
                seq[k++] = static_cast<uint8_t>(local[u]);
        }
        int m = (seq[0] < seq[1] && seq[0] < seq[2]) ? 0 : (seq[1] < seq[2] ? 1 : 2);
        if (seq[(m + 1) % 3] > seq[(m + 2) % 3]) code |= 1 << i;
    }
    return code;
}

namespace {

std::array<QuadInfo, 16> build_quad_table() {
    std::array<QuadInfo, 16> table{};
    // Straight-line drawings generate the two realizable classes: a triangle
    // with an interior point draws K4 without crossings, a convex
    // quadrilateral draws it with the diagonals crossing.
    const std::vector<std::array<long, 2>> planar_pts = {{0, 0}, {4, 0}, {2, 4}, {2, 1}};
    const std::vector<std::array<long, 2>> convex_pts = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};

    RotationSystem planar = system_of_points(planar_pts);
    RotationSystem convex = system_of_points(convex_pts);

    // The unique crossing pair of the convex drawing, found by segment tests.
    int ca = -1, cb = -1;
    static const int pairings[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
    int crossings = 0;
    for (auto& pr : pairings) {
        if (segments_cross(convex_pts[pr[0]], convex_pts[pr[1]], convex_pts[pr[2]], convex_pts[pr[3]])) {
            ca = pr[0];
            cb = pr[1];
            ++crossings;
        }
        if (segments_cross(planar_pts[pr[0]], planar_pts[pr[1]], planar_pts[pr[2]], planar_pts[pr[3]]))
            throw std::logic_error("quad table: planar drawing has a crossing");
    }
    if (crossings != 1) throw std::logic_error("quad table: convex drawing must have one crossing");

    std::array<uint8_t, 4> perm = {0, 1, 2, 3};
    do {
        int pcode = pack4(relabel(planar, perm.data()));
        if (table[pcode].cls == QuadClass::crossing)
            throw std::logic_error("quad table: class collision");
        table[pcode].cls = QuadClass::planar;

        int ccode = pack4(relabel(convex, perm.data()));
        if (table[ccode].cls == QuadClass::planar)
            throw std::logic_error("quad table: class collision");
        table[ccode].cls = QuadClass::crossing;
        // The crossing pairing of the relabeled system is {perm[ca],perm[cb]}
        // against the complementary pair; partner0 records whichever label
        // shares its crossing edge with label 0.
        int x = perm[ca], y = perm[cb];
        int partner;
        if (x == 0) partner = y;
        else if (y == 0) partner = x;
        else {
            // 0 lies on the complementary edge; its partner is the remaining
            // label not in {x, y}.
            partner = 6 - x - y;  // labels sum to 6
        }
        if (table[ccode].partner0 != 0 && table[ccode].partner0 != partner)
            throw std::logic_error("quad table: inconsistent crossing pair");
        table[ccode].partner0 = static_cast<uint8_t>(partner);
    } while (std::next_permutation(perm.begin(), perm.end()));

    int planar_count = 0, crossing_count = 0;
    for (auto& q : table) {
        planar_count += q.cls == QuadClass::planar;
        crossing_count += q.cls == QuadClass::crossing;
    }
    if (planar_count != 2 || crossing_count != 6)
        throw std::logic_error("quad table: unexpected orbit sizes");
    return table;
}

}  // namespace

const std::array<QuadInfo, 16>& quad_table() {
    static const std::array<QuadInfo, 16> table = build_quad_table();
    return table;
}

}  // namespace rotsys
