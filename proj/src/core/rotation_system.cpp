#include "core/rotation_system.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace rotsys {

bool RotationSystem::operator==(const RotationSystem& o) const {
    if (n != o.n) return false;
    for (int v = 0; v < n; ++v)
        for (int i = 0; i + 1 < n; ++i)
            if (rot[v][i] != o.rot[v][i]) return false;
    return true;
}

void normalize_phases(RotationSystem& r) {
    const int m = r.n - 1;
    if (m <= 1) return;
    for (int v = 0; v < r.n; ++v) {
        auto& seq = r.rot[v];
        int best = 0;
        for (int i = 1; i < m; ++i)
            if (seq[i] < seq[best]) best = i;
        if (best == 0) continue;
        std::array<uint8_t, kMaxN - 1> tmp;
        for (int i = 0; i < m; ++i) tmp[i] = seq[(best + i) % m];
        for (int i = 0; i < m; ++i) seq[i] = tmp[i];
    }
}

RotationSystem parse_system(const std::string& line) {
    std::vector<std::string> parts;
    size_t start = 0;
    std::string body = line;
    while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
    while (start <= body.size()) {
        size_t semi = body.find(';', start);
        if (semi == std::string::npos) {
            parts.push_back(body.substr(start));
            break;
        }
        parts.push_back(body.substr(start, semi - start));
        start = semi + 1;
    }
    const int n = static_cast<int>(parts.size());
    if (n < 1 || n > kMaxN) throw std::invalid_argument("rotation system: bad vertex count");

    RotationSystem r;
    r.n = static_cast<uint8_t>(n);
    for (int v = 0; v < n; ++v) {
        const std::string& p = parts[v];
        size_t colon = p.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("rotation system: missing ':'");
        // Vertex ids must appear in ascending order 0..n-1.
        if (p.substr(0, colon) != std::to_string(v))
            throw std::invalid_argument("rotation system: vertex ids must be 0..n-1 in order");
        std::array<bool, kMaxN> seen{};
        int count = 0;
        size_t pos = colon + 1;
        while (pos < p.size()) {
            size_t comma = p.find(',', pos);
            std::string tok = p.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            if (tok.empty() || tok.size() > 1 || tok[0] < '0' || tok[0] > '7')
                throw std::invalid_argument("rotation system: bad label token");
            int u = tok[0] - '0';
            if (u >= n || u == v || seen[u])
                throw std::invalid_argument("rotation system: rotation is not a permutation of the other vertices");
            if (count >= n - 1) throw std::invalid_argument("rotation system: rotation too long");
            seen[u] = true;
            r.rot[v][count++] = static_cast<uint8_t>(u);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (count != n - 1) throw std::invalid_argument("rotation system: rotation too short");
    }
    normalize_phases(r);
    return r;
}

std::string format_system(const RotationSystem& r) {
    std::string out;
    for (int v = 0; v < r.n; ++v) {
        if (v) out += ';';
        out += static_cast<char>('0' + v);
        out += ':';
        for (int i = 0; i + 1 < r.n; ++i) {
            if (i) out += ',';
            out += static_cast<char>('0' + r.rot[v][i]);
        }
    }
    return out;
}

RotationSystem relabel(const RotationSystem& r, const uint8_t* perm) {
    RotationSystem s;
    s.n = r.n;
    for (int v = 0; v < r.n; ++v)
        for (int i = 0; i + 1 < r.n; ++i)
            s.rot[perm[v]][i] = perm[r.rot[v][i]];
    normalize_phases(s);
    return s;
}

RotationSystem induced_subsystem(const RotationSystem& r, const std::vector<int>& verts) {
    std::vector<int> s(verts);
    std::sort(s.begin(), s.end());
    if (s.empty() || s.size() > r.n) throw std::invalid_argument("induced_subsystem: bad subset size");
    std::array<int, kMaxN> local;
    local.fill(-1);
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0 || s[i] >= r.n || (i > 0 && s[i] == s[i - 1]))
            throw std::invalid_argument("induced_subsystem: not a duplicate-free subset of V(R)");
        local[s[i]] = static_cast<int>(i);
    }
    RotationSystem out;
    out.n = static_cast<uint8_t>(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        int k = 0;
        for (int j = 0; j + 1 < r.n; ++j) {
            int u = r.rot[s[i]][j];
            if (local[u] >= 0) out.rot[i][k++] = static_cast<uint8_t>(local[u]);
        }
    }
    normalize_phases(out);
    return out;
}

RotationSystem inverse(const RotationSystem& r) {
    RotationSystem s;
    s.n = r.n;
    const int m = r.n - 1;
    for (int v = 0; v < r.n; ++v)
        for (int i = 0; i < m; ++i)
            s.rot[v][i] = r.rot[v][m - 1 - i];
    normalize_phases(s);
    return s;
}

Key serialize(const RotationSystem& r) {
    Key k;
    k.reserve(static_cast<size_t>(r.n) * (r.n - 1));
    for (int v = 0; v < r.n; ++v)
        for (int i = 0; i + 1 < r.n; ++i)
            k.push_back(static_cast<char>(r.rot[v][i]));
    return k;
}

namespace {

// The lexicographic minimum over relabelings always assigns some vertex u the
// label 0 and maps u's rotation onto (1,2,...,n-1); each of the n*(n-1)
// choices of (u, phase) determines the full relabeling, so only those
// candidates need to be serialized.
void canonical_scan(const RotationSystem& r, Key* best_key, RotationSystem* best_sys) {
    const int n = r.n;
    const int m = n - 1;
    if (n == 1) {
        *best_key = Key();
        if (best_sys) *best_sys = r;
        return;
    }
    Key best;
    RotationSystem best_rs;
    bool have = false;
    std::array<uint8_t, kMaxN> perm;
    for (int u = 0; u < n; ++u) {
        for (int p = 0; p < m; ++p) {
            perm[u] = 0;
            for (int j = 0; j < m; ++j) perm[r.rot[u][(p + j) % m]] = static_cast<uint8_t>(j + 1);
            RotationSystem cand = relabel(r, perm.data());
            Key k = serialize(cand);
            if (!have || k < best) {
                best = std::move(k);
                best_rs = cand;
                have = true;
            }
        }
    }
    *best_key = std::move(best);
    if (best_sys) *best_sys = best_rs;
}

}  // namespace

Key canonical_form(const RotationSystem& r) {
    Key k;
    canonical_scan(r, &k, nullptr);
    return k;
}

RotationSystem canonical_representative(const RotationSystem& r) {
    Key k;
    RotationSystem s;
    canonical_scan(r, &k, &s);
    return s;
}

bool is_isomorphic(const RotationSystem& a, const RotationSystem& b) {
    if (a.n != b.n) return false;
    return canonical_form(a) == canonical_form(b);
}

mpq_class density(const RotationSystem& small, const RotationSystem& big) {
    const int k = small.n;
    const int n = big.n;
    if (k > n) return mpq_class(0);
    Key target = canonical_form(small);
    long hits = 0, total = 0;
    std::vector<int> sub(k);
    for_each_subset(n, k, [&](const int* c) {
        sub.assign(c, c + k);
        ++total;
        if (canonical_form(induced_subsystem(big, sub)) == target) ++hits;
    });
    mpq_class q(hits, total);
    q.canonicalize();
    return q;
}

std::string key_to_string(const Key& k) {
    std::string out;
    out.reserve(k.size());
    for (char c : k) out += static_cast<char>('0' + c);
    return out;
}

}  // namespace rotsys
