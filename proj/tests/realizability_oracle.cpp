#include "realizability_oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "core/quads.hpp"

namespace rotsys::oracle {

int pack5(const RotationSystem& r) {
    int code = 0, mul = 1;
    for (int v = 0; v < 5; ++v) {
        const auto& seq = r.rot[v];  // phase-normalized: seq[0] is the minimum
        uint8_t a = seq[1], b = seq[2], c = seq[3];
        // Rank of a among the three non-minimal labels in ascending order.
        uint8_t rest[3];
        int k = 0;
        for (int u = 0; u < 5; ++u)
            if (u != v && u != seq[0]) rest[k++] = static_cast<uint8_t>(u);
        int ia = a == rest[0] ? 0 : (a == rest[1] ? 1 : 2);
        code += mul * (2 * ia + (b > c ? 1 : 0));
        mul *= 6;
    }
    return code;
}

RotationSystem unpack5(int code) {
    RotationSystem r;
    r.n = 5;
    for (int v = 0; v < 5; ++v) {
        int digit = code % 6;
        code /= 6;
        uint8_t others[4];
        int k = 0;
        for (int u = 0; u < 5; ++u)
            if (u != v) others[k++] = static_cast<uint8_t>(u);
        // others[0] is the minimum; distribute the rest by rank.
        uint8_t rest[3] = {others[1], others[2], others[3]};
        int ia = digit / 2;
        uint8_t a = rest[ia];
        uint8_t lo = rest[(ia + 1) % 3], hi = rest[(ia + 2) % 3];
        if (lo > hi) std::swap(lo, hi);
        r.rot[v][0] = others[0];
        r.rot[v][1] = a;
        r.rot[v][2] = (digit % 2) ? hi : lo;
        r.rot[v][3] = (digit % 2) ? lo : hi;
    }
    return r;
}

namespace {

struct Crossing {
    int e1, e2;  // edge ids, e1 < e2
};

int edge_id(int u, int v) {
    if (u > v) std::swap(u, v);
    static const int base[5] = {0, 4, 7, 9, 10};
    return base[u] + (v - u - 1);
}

struct EdgeRef {
    int u, v;  // u < v
};

// One fully specified planarization attempt: per-edge crossing orders plus a
// strand orientation bit per crossing. Returns its Euler characteristic
// verdict.
bool embeds(const RotationSystem& r, const std::vector<Crossing>& crossings,
            const std::array<std::vector<int>, 10>& order, unsigned orient_bits,
            const std::array<EdgeRef, 10>& edges) {
    const int nc = static_cast<int>(crossings.size());
    const int nodes = 5 + nc;
    // Node path of each edge: u, crossings in order, v.
    // Darts: two per segment; dart 2s and 2s+1 are twins.
    int nseg = 0;
    std::array<int, 10> seg_base{};
    for (int e = 0; e < 10; ++e) {
        seg_base[e] = nseg;
        nseg += static_cast<int>(order[e].size()) + 1;
    }
    const int ndart = 2 * nseg;
    std::vector<int> dart_node(ndart);     // node a dart leaves
    std::vector<int> rot_order(ndart, -1); // position of dart in its node's rotation
    std::vector<std::vector<int>> node_rot(nodes);

    auto seg_fwd = [&](int e, int s) { return 2 * (seg_base[e] + s); };      // leaves earlier node
    auto seg_bwd = [&](int e, int s) { return 2 * (seg_base[e] + s) + 1; };  // leaves later node

    for (int e = 0; e < 10; ++e) {
        const int k = static_cast<int>(order[e].size());
        for (int s = 0; s <= k; ++s) {
            int from = (s == 0) ? edges[e].u : 5 + order[e][s - 1];
            int to = (s == k) ? edges[e].v : 5 + order[e][s];
            dart_node[seg_fwd(e, s)] = from;
            dart_node[seg_bwd(e, s)] = to;
        }
    }

    // Vertex rotations follow the rotation system.
    for (int v = 0; v < 5; ++v) {
        for (int i = 0; i < 4; ++i) {
            int u = r.rot[v][i];
            int e = edge_id(u, v);
            int k = static_cast<int>(order[e].size());
            int d = (v == edges[e].u) ? seg_fwd(e, 0) : seg_bwd(e, k);
            node_rot[v].push_back(d);
        }
    }
    // Crossing rotations alternate the two strands; the orientation bit picks
    // one of the two alternating cyclic orders.
    for (int ci = 0; ci < nc; ++ci) {
        int e = crossings[ci].e1, f = crossings[ci].e2;
        auto pos_in = [&](int edge) {
            for (size_t s = 0; s < order[edge].size(); ++s)
                if (order[edge][s] == ci) return static_cast<int>(s);
            return -1;
        };
        int se = pos_in(e), sf = pos_in(f);
        int e_back = seg_bwd(e, se), e_fwd = seg_fwd(e, se + 1);
        int f_back = seg_bwd(f, sf), f_fwd = seg_fwd(f, sf + 1);
        auto& lst = node_rot[5 + ci];
        if (orient_bits >> ci & 1)
            lst = {e_back, f_fwd, e_fwd, f_back};
        else
            lst = {e_back, f_back, e_fwd, f_fwd};
    }

    std::vector<int> next_at_node(ndart);
    for (int nd = 0; nd < nodes; ++nd) {
        auto& lst = node_rot[nd];
        for (size_t i = 0; i < lst.size(); ++i) {
            rot_order[lst[i]] = static_cast<int>(i);
            next_at_node[lst[i]] = lst[(i + 1) % lst.size()];
        }
    }
    // Faces: orbits of d -> next_at_node(twin(d)).
    std::vector<char> seen(ndart, 0);
    int faces = 0;
    for (int d = 0; d < ndart; ++d) {
        if (seen[d]) continue;
        ++faces;
        int x = d;
        while (!seen[x]) {
            seen[x] = 1;
            x = next_at_node[x ^ 1];
        }
    }
    return nodes - nseg + faces == 2;
}

bool search_orders(const RotationSystem& r, const std::vector<Crossing>& crossings,
                   std::array<std::vector<int>, 10>& order,
                   const std::array<std::vector<int>, 10>& on_edge, int e,
                   const std::array<EdgeRef, 10>& edges) {
    if (e == 10) {
        const unsigned lim = 1u << crossings.size();
        for (unsigned bits = 0; bits < lim; ++bits)
            if (embeds(r, crossings, order, bits, edges)) return true;
        return false;
    }
    order[e] = on_edge[e];
    std::sort(order[e].begin(), order[e].end());
    do {
        if (search_orders(r, crossings, order, on_edge, e + 1, edges)) return true;
    } while (std::next_permutation(order[e].begin(), order[e].end()));
    return false;
}

}  // namespace

bool realizable5(const RotationSystem& r) {
    const auto& table = quad_table();
    std::vector<Crossing> crossings;
    bool ok = true;
    for_each_subset(5, 4, [&](const int* q) {
        if (!ok) return;
        int code = pack4_induced(r, q[0], q[1], q[2], q[3]);
        const QuadInfo& info = table[code];
        if (info.cls == QuadClass::nonrealizable) {
            ok = false;
            return;
        }
        if (info.cls == QuadClass::crossing) {
            int p = info.partner0;
            int e1 = edge_id(q[0], q[p]);
            int others[2], k = 0;
            for (int i = 1; i < 4; ++i)
                if (i != p) others[k++] = i;
            int e2 = edge_id(q[others[0]], q[others[1]]);
            if (e1 > e2) std::swap(e1, e2);
            crossings.push_back({e1, e2});
        }
    });
    if (!ok) return false;

    std::array<EdgeRef, 10> edges;
    for (int u = 0; u < 5; ++u)
        for (int v = u + 1; v < 5; ++v) edges[edge_id(u, v)] = {u, v};
    std::array<std::vector<int>, 10> on_edge;
    for (size_t ci = 0; ci < crossings.size(); ++ci) {
        on_edge[crossings[ci].e1].push_back(static_cast<int>(ci));
        on_edge[crossings[ci].e2].push_back(static_cast<int>(ci));
    }
    std::array<std::vector<int>, 10> order;
    return search_orders(r, crossings, order, on_edge, 0, edges);
}

std::vector<RotationSystem> derive_realizable5() {
    std::map<Key, RotationSystem> classes;
    for (int code = 0; code < 7776; ++code) {
        RotationSystem r = unpack5(code);
        if (!realizable5(r)) continue;
        Key k = canonical_form(r);
        if (!classes.count(k)) classes.emplace(k, canonical_representative(r));
    }
    std::vector<RotationSystem> out;
    for (auto& [k, v] : classes) out.push_back(v);
    return out;
}

}  // namespace rotsys::oracle
