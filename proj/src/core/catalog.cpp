#include "core/catalog.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>
#include <unordered_map>

#include "core/errors.hpp"
#include "core/quads.hpp"

namespace rotsys {

int Catalog::find(const Key& k) const {
    auto it = std::lower_bound(keys.begin(), keys.end(), k);
    if (it != keys.end() && *it == k) return static_cast<int>(it - keys.begin());
    return -1;
}

Catalog seed_catalog(SystemClass cls) {
    Catalog c;
    c.cls = cls;
    c.n = 5;
    c.entries = seed_systems(cls);
    for (auto& r : c.entries) c.keys.push_back(serialize(r));
    return c;
}

Catalog base_catalog(SystemClass cls, int n) {
    if (n == 5) return seed_catalog(cls);
    if (n != 3 && n != 4) throw DomainError("base_catalog: size must be 3, 4 or 5");
    Catalog c;
    c.cls = cls;
    c.n = static_cast<uint8_t>(n);
    c.entries = small_systems(n);
    for (auto& r : c.entries) c.keys.push_back(serialize(r));
    return c;
}

namespace {

// others_of[i] = the other four position labels, ascending.
constexpr uint8_t kOthers5[5][4] = {
    {1, 2, 3, 4}, {0, 2, 3, 4}, {0, 1, 3, 4}, {0, 1, 2, 4}, {0, 1, 2, 3}};

// Digit of one position's rotation: seq is the cyclic order of the other four
// position labels; result is the rank (0..5) of the phase-normalized tail.
inline int digit5(const uint8_t seq[4], int self) {
    int m = 0;
    for (int t = 1; t < 4; ++t)
        if (seq[t] < seq[m]) m = t;
    uint8_t a = seq[(m + 1) & 3], b = seq[(m + 2) & 3], c = seq[(m + 3) & 3];
    const uint8_t* oth = kOthers5[self];  // oth[0] is the minimum
    int ia = a == oth[1] ? 0 : (a == oth[2] ? 1 : 2);
    return 2 * ia + (b > c ? 1 : 0);
}

}  // namespace

int pack5_induced(const RotationSystem& r, const int* quint) {
    int local[kMaxN];
    for (int i = 0; i < kMaxN; ++i) local[i] = -1;
    for (int i = 0; i < 5; ++i) local[quint[i]] = i;
    int code = 0, mul = 1;
    for (int i = 0; i < 5; ++i) {
        int v = quint[i];
        uint8_t seq[4];
        int k = 0;
        for (int j = 0; j + 1 < r.n; ++j) {
            int u = r.rot[v][j];
            if (local[u] >= 0) seq[k++] = static_cast<uint8_t>(local[u]);
        }
        code += mul * digit5(seq, i);
        mul *= 6;
    }
    return code;
}

Labeled5Lookup build_lookup(const Catalog& size5) {
    if (size5.n != 5) throw DomainError("build_lookup: catalog must have size 5");
    Labeled5Lookup lk;
    static const int quint[5] = {0, 1, 2, 3, 4};
    std::array<uint8_t, 5> perm = {0, 1, 2, 3, 4};
    for (const auto& r : size5.entries) {
        std::sort(perm.begin(), perm.end());
        do {
            lk.member.set(pack5_induced(relabel(r, perm.data()), quint));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return lk;
}

bool passes_subsystem_filter(const RotationSystem& r, const Labeled5Lookup& lookup, int new_vertex) {
    bool ok = true;
    for_each_subset(r.n - 1, 4, [&](const int* q) {
        if (!ok) return;
        int quint[5];
        int k = 0;
        for (int i = 0; i < 4; ++i) {
            int u = q[i] >= new_vertex ? q[i] + 1 : q[i];
            quint[k++] = u;
        }
        quint[4] = new_vertex;
        std::sort(quint, quint + 5);
        if (!lookup.member[pack5_induced(r, quint)]) ok = false;
    });
    return ok;
}

namespace {

// Combinadic rank of a 4-subset a<b<c<d of 0..7; fits in [0, 70).
inline int quad_rank(int a, int b, int c, int d) {
    static const int c2[8] = {0, 0, 1, 3, 6, 10, 15, 21};
    static const int c3[8] = {0, 0, 0, 1, 4, 10, 20, 35};
    static const int c4[8] = {0, 0, 0, 0, 1, 5, 15, 35};
    return a + c2[b] + c3[c] + c4[d];
}

// Extension search for one base system and one rotation of the new vertex w:
// depth-first over the insertion slot of w in each old rotation, checking
// every 5-subset {a,b,c,v,w} as soon as its last old vertex v is decided.
struct Extender {
    const RotationSystem* base = nullptr;
    const Labeled5Lookup* lookup = nullptr;
    int n_old = 0;
    std::array<uint8_t, kMaxN> wrot{};  // w's rotation over old vertices, wrot[0] = 0
    uint8_t wdigit[70] = {0};           // digit of w on each old 4-subset
    std::array<std::array<uint8_t, kMaxN>, kMaxN> newrot{};
    std::unordered_map<Key, RotationSystem>* out = nullptr;

    void prepare_wdigits() {
        for_each_subset(n_old, 4, [&](const int* q) {
            int local[kMaxN];
            for (int i = 0; i < n_old; ++i) local[i] = -1;
            for (int i = 0; i < 4; ++i) local[q[i]] = i;
            uint8_t seq[4];
            int k = 0;
            for (int j = 0; j < n_old; ++j)
                if (local[wrot[j]] >= 0) seq[k++] = static_cast<uint8_t>(local[wrot[j]]);
            wdigit[quad_rank(q[0], q[1], q[2], q[3])] = static_cast<uint8_t>(digit5(seq, 4));
        });
    }

    bool check_quint(int a, int b, int c, int d) const {
        int local[kMaxN + 1];
        for (int i = 0; i <= kMaxN; ++i) local[i] = -1;
        local[a] = 0;
        local[b] = 1;
        local[c] = 2;
        local[d] = 3;
        local[n_old] = 4;  // w
        int code = 1296 * wdigit[quad_rank(a, b, c, d)];
        const int quint[4] = {a, b, c, d};
        int mul = 1;
        for (int i = 0; i < 4; ++i) {
            int v = quint[i];
            uint8_t seq[4];
            int k = 0;
            for (int j = 0; j <= n_old - 1; ++j) {
                int u = newrot[v][j];
                if (local[u] >= 0) seq[k++] = static_cast<uint8_t>(local[u]);
            }
            code += mul * digit5(seq, i);
            mul *= 6;
        }
        return lookup->member[code];
    }

    void dfs(int v) {
        if (v == n_old) {
            RotationSystem cand;
            cand.n = static_cast<uint8_t>(n_old + 1);
            for (int u = 0; u < n_old; ++u)
                for (int i = 0; i < n_old; ++i) cand.rot[u][i] = newrot[u][i];
            for (int i = 0; i < n_old; ++i) cand.rot[n_old][i] = wrot[i];
            Key k;
            RotationSystem rep = canonical_representative(cand);
            k = serialize(rep);
            out->emplace(std::move(k), rep);
            return;
        }
        const uint8_t* old = base->rot[v].data();
        for (int p = 0; p < n_old - 1; ++p) {
            // Insert w after index p; the rotation stays phase-normalized
            // because position 0 keeps the minimum label and w is largest.
            auto& nr = newrot[v];
            for (int i = 0; i <= p; ++i) nr[i] = old[i];
            nr[p + 1] = static_cast<uint8_t>(n_old);
            for (int i = p + 1; i < n_old - 1; ++i) nr[i + 1] = old[i];
            bool ok = true;
            if (v >= 3) {
                for (int a = 0; a < v - 2 && ok; ++a)
                    for (int b = a + 1; b < v - 1 && ok; ++b)
                        for (int c = b + 1; c < v && ok; ++c)
                            ok = check_quint(a, b, c, v);
            }
            if (ok) dfs(v + 1);
        }
    }
};

void extend_one_base(const RotationSystem& base, const Labeled5Lookup& lookup,
                     std::unordered_map<Key, RotationSystem>& out) {
    Extender ex;
    ex.base = &base;
    ex.lookup = &lookup;
    ex.n_old = base.n;
    ex.out = &out;
    ex.wrot[0] = 0;
    std::vector<uint8_t> tail;
    for (int i = 1; i < ex.n_old; ++i) tail.push_back(static_cast<uint8_t>(i));
    do {
        for (int i = 1; i < ex.n_old; ++i) ex.wrot[i] = tail[i - 1];
        ex.prepare_wdigits();
        ex.dfs(0);
    } while (std::next_permutation(tail.begin(), tail.end()));
}

}  // namespace

Catalog extend_catalog(const Catalog& cat, int threads) {
    if (cat.n < 5) throw DomainError("extend_catalog: base catalog must have size >= 5");
    if (cat.n >= kMaxN) throw DomainError("extend_catalog: size cap is 8");
    Catalog size5 = cat.n == 5 ? cat : seed_catalog(cat.cls);
    Labeled5Lookup lookup = build_lookup(size5);

    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = std::min(threads, static_cast<int>(std::max<size_t>(cat.entries.size(), 1)));

    std::vector<std::unordered_map<Key, RotationSystem>> found(threads);
    std::atomic<size_t> next{0};
    auto worker = [&](int t) {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= cat.entries.size()) break;
            extend_one_base(cat.entries[i], lookup, found[t]);
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    std::unordered_map<Key, RotationSystem> merged;
    for (auto& m : found) merged.merge(m);
    Catalog out;
    out.cls = cat.cls;
    out.n = cat.n + 1;
    out.keys.reserve(merged.size());
    for (auto& [k, v] : merged) out.keys.push_back(k);
    std::sort(out.keys.begin(), out.keys.end());
    out.entries.reserve(merged.size());
    for (auto& k : out.keys) out.entries.push_back(merged.at(k));
    return out;
}

Catalog to_nonequivalent(const Catalog& cat) {
    Catalog out;
    out.cls = cat.cls;
    out.n = cat.n;
    for (size_t i = 0; i < cat.entries.size(); ++i) {
        Key ik = canonical_form(inverse(cat.entries[i]));
        if (ik < cat.keys[i]) continue;  // the inverse's class representative carries the pair
        out.entries.push_back(cat.entries[i]);
        out.keys.push_back(cat.keys[i]);
    }
    return out;
}

Catalog from_nonequivalent(const Catalog& cat) {
    std::unordered_map<Key, RotationSystem> merged;
    for (size_t i = 0; i < cat.entries.size(); ++i) {
        merged.emplace(cat.keys[i], cat.entries[i]);
        RotationSystem inv = canonical_representative(inverse(cat.entries[i]));
        merged.emplace(serialize(inv), inv);
    }
    Catalog out;
    out.cls = cat.cls;
    out.n = cat.n;
    for (auto& [k, v] : merged) out.keys.push_back(k);
    std::sort(out.keys.begin(), out.keys.end());
    for (auto& k : out.keys) out.entries.push_back(merged.at(k));
    return out;
}

void save_catalog(const Catalog& cat, const std::string& path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw IoError("cannot open for writing: " + tmp);
        f << "rotsys-catalog v1 class=" << class_name(cat.cls) << " n=" << int(cat.n)
          << " count=" << cat.entries.size() << "\n";
        for (const auto& r : cat.entries) f << format_system(r) << "\n";
        if (!f.flush()) throw IoError("write failure: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed: " + path + ": " + ec.message());
}

Catalog load_catalog(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::string header;
    if (!std::getline(f, header)) throw ParseError(path + ": empty file");
    char cls_buf[32];
    int n = 0;
    unsigned long count = 0;
    if (std::sscanf(header.c_str(), "rotsys-catalog v1 class=%31s n=%d count=%lu", cls_buf, &n,
                    &count) != 3)
        throw ParseError(path + ": bad catalog header");
    Catalog cat;
    cat.cls = class_from_name(cls_buf);
    if (n < 3 || n > kMaxN) throw ParseError(path + ": unsupported size");
    cat.n = static_cast<uint8_t>(n);
    std::string line;
    size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        RotationSystem r;
        try {
            r = parse_system(line);
        } catch (const std::invalid_argument& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (r.n != cat.n) throw ParseError(path + ":" + std::to_string(lineno) + ": wrong size");
        Key k = serialize(r);
        if (canonical_form(r) != k)
            throw ParseError(path + ":" + std::to_string(lineno) + ": entry is not canonical");
        if (!cat.keys.empty() && !(cat.keys.back() < k))
            throw ParseError(path + ":" + std::to_string(lineno) + ": entries out of order");
        cat.keys.push_back(std::move(k));
        cat.entries.push_back(r);
    }
    if (cat.entries.size() != count)
        throw ParseError(path + ": header count " + std::to_string(count) + " != " +
                         std::to_string(cat.entries.size()) + " entries");
    return cat;
}

}  // namespace rotsys
