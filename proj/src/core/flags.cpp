#include "core/flags.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>
#include <unordered_map>

#include "core/errors.hpp"
#include "core/metrics.hpp"

namespace rotsys {

int FlagBasis::find(const Key& k) const {
    auto it = std::lower_bound(keys.begin(), keys.end(), k);
    if (it != keys.end() && *it == k) return static_cast<int>(it - keys.begin());
    return -1;
}

RotationSystem flag_canonicalize(const RotationSystem& flag, int s) {
    const int n = flag.n;
    if (s < 0 || s > n) throw DomainError("flag_canonicalize: bad root count");
    if (n - s <= 1) return flag;
    std::array<uint8_t, kMaxN> perm;
    for (int i = 0; i < s; ++i) perm[i] = static_cast<uint8_t>(i);
    std::array<uint8_t, kMaxN> tail;
    for (int i = s; i < n; ++i) tail[i - s] = static_cast<uint8_t>(i);
    RotationSystem best = flag;
    Key best_key = serialize(flag);
    do {
        for (int i = s; i < n; ++i) perm[i] = tail[i - s];
        RotationSystem cand = relabel(flag, perm.data());
        Key k = serialize(cand);
        if (k < best_key) {
            best_key = std::move(k);
            best = cand;
        }
    } while (std::next_permutation(tail.begin(), tail.begin() + (n - s)));
    return best;
}

RotationSystem induced_ordered(const RotationSystem& r, const int* order, int l) {
    int local[kMaxN];
    for (int i = 0; i < r.n; ++i) local[i] = -1;
    for (int i = 0; i < l; ++i) local[order[i]] = i;
    RotationSystem out;
    out.n = static_cast<uint8_t>(l);
    for (int i = 0; i < l; ++i) {
        int k = 0;
        const auto& seq = r.rot[order[i]];
        for (int j = 0; j + 1 < r.n; ++j) {
            int u = local[seq[j]];
            if (u >= 0) out.rot[i][k++] = static_cast<uint8_t>(u);
        }
    }
    normalize_phases(out);
    return out;
}

FlagBasis enumerate_flags(const RotationSystem& sigma, int l, const Catalog& cat_l) {
    const int s = sigma.n;
    if (s < 1 || s > l) throw DomainError("enumerate_flags: type size exceeds flag size");
    if (cat_l.n != l) throw DomainError("enumerate_flags: catalog size does not match flag size");

    std::unordered_map<Key, RotationSystem> found;
    int order[kMaxN];
    for (const RotationSystem& base : cat_l.entries) {
        for_each_subset(l, s, [&](const int* sub) {
            int theta[kMaxN];
            for (int i = 0; i < s; ++i) theta[i] = sub[i];
            std::sort(theta, theta + s);
            do {
                if (!(induced_ordered(base, theta, s) == sigma)) continue;
                int k = 0;
                for (int i = 0; i < s; ++i) order[k++] = theta[i];
                for (int v = 0; v < l; ++v) {
                    bool is_root = false;
                    for (int i = 0; i < s; ++i) is_root = is_root || theta[i] == v;
                    if (!is_root) order[k++] = v;
                }
                RotationSystem flag = flag_canonicalize(induced_ordered(base, order, l), s);
                found.emplace(serialize(flag), flag);
            } while (std::next_permutation(theta, theta + s));
        });
    }

    FlagBasis basis;
    basis.sigma = sigma;
    basis.l = l;
    basis.keys.reserve(found.size());
    for (auto& [k, v] : found) basis.keys.push_back(k);
    std::sort(basis.keys.begin(), basis.keys.end());
    basis.flags.reserve(found.size());
    for (auto& k : basis.keys) basis.flags.push_back(found.at(k));
    return basis;
}

void save_flags(const FlagBasis& basis, SystemClass cls, int type_index, const std::string& path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw IoError("cannot open for writing: " + tmp);
        f << "flags v1 class=" << class_name(cls) << " type=" << type_index << " l=" << basis.l
          << " count=" << basis.flags.size() << "\n";
        for (const auto& flag : basis.flags) {
            f << format_system(flag) << "|";
            for (int i = 0; i < basis.s(); ++i) f << (i ? "," : "") << i;
            f << "\n";
        }
        if (!f.flush()) throw IoError("write failure: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed: " + path + ": " + ec.message());
}

FlagBasis load_flags(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::string header;
    if (!std::getline(f, header)) throw ParseError(path + ": empty file");
    char cls_buf[32];
    int type_index = 0, l = 0;
    unsigned long count = 0;
    if (std::sscanf(header.c_str(), "flags v1 class=%31s type=%d l=%d count=%lu", cls_buf,
                    &type_index, &l, &count) != 4)
        throw ParseError(path + ": bad flags header");
    class_from_name(cls_buf);
    if (l < 1 || l > kMaxN) throw ParseError(path + ": unsupported flag size");

    FlagBasis basis;
    basis.l = l;
    std::string line;
    size_t lineno = 1;
    int s = -1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        size_t bar = line.find('|');
        if (bar == std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) + ": missing '|'");
        RotationSystem flag;
        try {
            flag = parse_system(line.substr(0, bar));
        } catch (const std::invalid_argument& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (flag.n != l) throw ParseError(path + ":" + std::to_string(lineno) + ": wrong flag size");
        // Root image: this writer always emits 0,1,...,s-1.
        int expect = 0;
        size_t pos = bar + 1;
        while (pos < line.size()) {
            size_t comma = line.find(',', pos);
            std::string tok =
                line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            if (tok != std::to_string(expect))
                throw ParseError(path + ":" + std::to_string(lineno) + ": unsupported root image");
            ++expect;
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (expect < 1 || expect > l)
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad root count");
        if (s < 0) s = expect;
        if (s != expect)
            throw ParseError(path + ":" + std::to_string(lineno) + ": inconsistent root count");
        Key k = serialize(flag);
        if (serialize(flag_canonicalize(flag, s)) != k)
            throw ParseError(path + ":" + std::to_string(lineno) + ": flag is not root-canonical");
        if (!basis.keys.empty() && !(basis.keys.back() < k))
            throw ParseError(path + ":" + std::to_string(lineno) + ": flags out of order");
        basis.keys.push_back(std::move(k));
        basis.flags.push_back(flag);
    }
    if (basis.flags.empty()) throw ParseError(path + ": no flags");
    if (basis.flags.size() != count)
        throw ParseError(path + ": header count " + std::to_string(count) + " != " +
                         std::to_string(basis.flags.size()) + " flags");
    int roots[kMaxN];
    for (int i = 0; i < s; ++i) roots[i] = i;
    basis.sigma = induced_ordered(basis.flags[0], roots, s);
    for (const auto& flag : basis.flags)
        if (!(induced_ordered(flag, roots, s) == basis.sigma))
            throw ParseError(path + ": flags disagree on the induced type");
    return basis;
}

namespace {

RotationSystem single_vertex() {
    RotationSystem r;
    r.n = 1;
    return r;
}

Catalog class_catalog(SystemClass cls, int n) {
    if (n <= 5) return base_catalog(cls, n);
    Catalog c = seed_catalog(cls);
    for (int k = 5; k < n; ++k) c = extend_catalog(c);
    return c;
}

}  // namespace

FlagConfig make_flag_config(SystemClass cls, int N, const std::string& name) {
    FlagConfig cfg;
    cfg.cls = cls;
    cfg.N = N;
    cfg.name = name;

    std::vector<std::pair<RotationSystem, int>> types;  // (sigma, l)
    if (name == "full") {
        int expected = cls == SystemClass::realizable ? 7 : 8;
        if (N != expected)
            throw DomainError("make_flag_config: the full configuration targets size " +
                              std::to_string(expected) + " for this class");
        types.emplace_back(single_vertex(), 4);
        types.emplace_back(small_systems(3)[0], 5);
        for (const auto& seed : seed_systems(cls)) types.emplace_back(seed, 6);
    } else if (name == "sigma12") {
        if (N < 5 || N > kMaxN) throw DomainError("make_flag_config: sigma12 needs 5 <= N <= 8");
        types.emplace_back(single_vertex(), (N + 1) / 2);
        types.emplace_back(small_systems(3)[0], (N + 3) / 2);
    } else {
        throw DomainError("make_flag_config: unknown configuration '" + name + "'");
    }

    for (auto& [sigma, l] : types) {
        if (2 * l - sigma.n > N) throw DomainError("make_flag_config: flag size exceeds target");
        cfg.bases.push_back(enumerate_flags(sigma, l, class_catalog(cls, l)));
    }
    return cfg;
}

long long flag_total(const FlagConfig& cfg) {
    long long t = 0;
    for (const auto& b : cfg.bases) t += static_cast<long long>(b.flags.size());
    return t;
}

long long variable_total(const FlagConfig& cfg) {
    long long t = 0;
    for (const auto& b : cfg.bases) {
        long long d = static_cast<long long>(b.flags.size());
        t += d * (d - 1) / 2;
    }
    return t;
}

mpq_class QSparse::total() const {
    mpq_class t = 0;
    for (const auto& [r, c, v] : cells) t += r == c ? v : 2 * v;
    return t;
}

namespace {

long falling(int n, int k) {
    long p = 1;
    for (int i = 0; i < k; ++i) p *= n - i;
    return p;
}

long choose(int n, int k) {
    if (k < 0 || k > n) return 0;
    long p = 1;
    for (int i = 0; i < k; ++i) p = p * (n - i) / (i + 1);
    return p;
}

// Ordered-pair counts keyed by a*dim+b, converted to the upper triangle with
// a symmetry check.
QSparse counts_to_matrix(int dim, long denom, const std::unordered_map<long, long>& cnt) {
    QSparse q;
    q.dim = dim;
    for (const auto& [key, c] : cnt) {
        int a = static_cast<int>(key / dim), b = static_cast<int>(key % dim);
        if (a > b) continue;
        auto it = cnt.find(static_cast<long>(b) * dim + a);
        long mirror = it == cnt.end() ? 0 : it->second;
        if (mirror != c) throw DimensionError("pair density matrix is not symmetric");
        mpq_class v(c, denom);
        v.canonicalize();
        q.cells.emplace_back(a, b, std::move(v));
    }
    std::sort(q.cells.begin(), q.cells.end(),
              [](const auto& x, const auto& y) {
                  return std::get<0>(x) != std::get<0>(y) ? std::get<0>(x) < std::get<0>(y)
                                                          : std::get<1>(x) < std::get<1>(y);
              });
    return q;
}

int flag_index(const FlagBasis& basis, const RotationSystem& flag) {
    int idx = basis.find(serialize(flag_canonicalize(flag, basis.sigma.n)));
    if (idx < 0)
        throw DomainError(
            "pair_density_matrix: flag not in basis (incomplete catalog or system outside class)");
    return idx;
}

}  // namespace

QSparse pair_density_matrix(const FlagBasis& basis, const RotationSystem& big) {
    const int s = basis.s(), l = basis.l, r = l - s, N = big.n;
    if (N < s + 2 * r) throw DomainError("pair_density_matrix: target too small for flag pairs");
    const int dim = static_cast<int>(basis.flags.size());
    const long denom = falling(N, s) * choose(N - s, r) * choose(N - s - r, r);

    std::unordered_map<long, long> cnt;
    int order[kMaxN];
    std::vector<int> fidx;          // flag index per r-subset of the non-root vertices
    std::vector<unsigned> fmask;    // the subset as a bitmask over positions in `others`
    for_each_subset(N, s, [&](const int* sub) {
        int theta[kMaxN];
        for (int i = 0; i < s; ++i) theta[i] = sub[i];
        std::sort(theta, theta + s);
        do {
            if (!(induced_ordered(big, theta, s) == basis.sigma)) continue;
            int others[kMaxN];
            int m = 0;
            for (int v = 0; v < N; ++v) {
                bool is_root = false;
                for (int i = 0; i < s; ++i) is_root = is_root || theta[i] == v;
                if (!is_root) others[m++] = v;
            }
            fidx.clear();
            fmask.clear();
            for (int i = 0; i < s; ++i) order[i] = theta[i];
            for_each_subset(m, r, [&](const int* x) {
                unsigned mask = 0;
                for (int i = 0; i < r; ++i) {
                    order[s + i] = others[x[i]];
                    mask |= 1u << x[i];
                }
                fidx.push_back(flag_index(basis, induced_ordered(big, order, l)));
                fmask.push_back(mask);
            });
            for (size_t i = 0; i < fidx.size(); ++i)
                for (size_t j = 0; j < fidx.size(); ++j)
                    if (!(fmask[i] & fmask[j]))
                        ++cnt[static_cast<long>(fidx[i]) * dim + fidx[j]];
        } while (std::next_permutation(theta, theta + s));
    });
    return counts_to_matrix(dim, denom, cnt);
}

QSparse pair_density_matrix_slow(const FlagBasis& basis, const RotationSystem& big) {
    const int s = basis.s(), l = basis.l, r = l - s, N = big.n;
    if (N < s + 2 * r) throw DomainError("pair_density_matrix: target too small for flag pairs");
    const int dim = static_cast<int>(basis.flags.size());
    const int t = s + 2 * r;
    const long denom = falling(N, t);

    std::unordered_map<long, long> cnt;
    int tuple[kMaxN];
    bool used[kMaxN] = {false};
    auto rec = [&](auto&& self, int depth) -> void {
        if (depth == t) {
            if (!(induced_ordered(big, tuple, s) == basis.sigma)) return;
            int a = flag_index(basis, induced_ordered(big, tuple, l));
            int order2[kMaxN];
            for (int i = 0; i < s; ++i) order2[i] = tuple[i];
            for (int i = 0; i < r; ++i) order2[s + i] = tuple[s + r + i];
            int b = flag_index(basis, induced_ordered(big, order2, l));
            ++cnt[static_cast<long>(a) * dim + b];
            return;
        }
        for (int v = 0; v < N; ++v) {
            if (used[v]) continue;
            used[v] = true;
            tuple[depth] = v;
            self(self, depth + 1);
            used[v] = false;
        }
    };
    rec(rec, 0);
    return counts_to_matrix(dim, denom, cnt);
}

mpq_class sigma_embedding_density(const RotationSystem& sigma, const RotationSystem& big) {
    const int s = sigma.n, N = big.n;
    if (s > N) return mpq_class(0);
    long hits = 0;
    for_each_subset(N, s, [&](const int* sub) {
        int theta[kMaxN];
        for (int i = 0; i < s; ++i) theta[i] = sub[i];
        std::sort(theta, theta + s);
        do {
            if (induced_ordered(big, theta, s) == sigma) ++hits;
        } while (std::next_permutation(theta, theta + s));
    });
    mpq_class q(hits, falling(N, s));
    q.canonicalize();
    return q;
}

std::vector<mpq_class> objective_vector(const Catalog& cat) {
    if (cat.n < 4) throw DomainError("objective_vector: catalog size must be >= 4");
    std::vector<mpq_class> b;
    b.reserve(cat.entries.size());
    for (const auto& r : cat.entries) b.push_back(noncrossing_k4_density(r));
    return b;
}

namespace {

constexpr long kChunk = 500;

std::string chunk_path(const std::string& dir, const FlagConfig& cfg, long lo) {
    return dir + "/q_" + class_name(cfg.cls) + "_n" + std::to_string(cfg.N) + "_" + cfg.name +
           "_" + std::to_string(lo) + ".txt";
}

std::vector<std::vector<QSparse>> compute_chunk(const Catalog& cat, const FlagConfig& cfg, long lo,
                                                long hi, int threads) {
    std::vector<std::vector<QSparse>> result(hi - lo);
    std::atomic<long> next{lo};
    auto worker = [&] {
        while (true) {
            long r = next.fetch_add(1);
            if (r >= hi) break;
            auto& qs = result[r - lo];
            qs.reserve(cfg.bases.size());
            for (size_t i = 0; i < cfg.bases.size(); ++i) {
                QSparse q = pair_density_matrix(cfg.bases[i], cat.entries[r]);
                q.type = static_cast<int>(i);
                qs.push_back(std::move(q));
            }
        }
    };
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = static_cast<int>(std::min<long>(threads, hi - lo));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return result;
}

void write_chunk(const std::string& path, const FlagConfig& cfg, long lo,
                 const std::vector<std::vector<QSparse>>& chunk) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw IoError("cannot open for writing: " + tmp);
        for (size_t k = 0; k < chunk.size(); ++k) {
            for (const QSparse& q : chunk[k]) {
                f << "qmat v1 class=" << class_name(cfg.cls) << " n=" << cfg.N
                  << " config=" << cfg.name << " type=" << q.type << " r=" << lo + k
                  << " dim=" << q.dim << " nnz=" << q.cells.size() << "\n";
                for (const auto& [row, col, v] : q.cells)
                    f << row << " " << col << " " << v.get_str() << "\n";
            }
        }
        if (!f.flush()) throw IoError("write failure: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed: " + path + ": " + ec.message());
}

std::vector<std::vector<QSparse>> read_chunk(const std::string& path, const FlagConfig& cfg,
                                             long lo, long hi) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::vector<std::vector<QSparse>> chunk(hi - lo);
    std::string line;
    size_t lineno = 0;
    long expect_r = lo;
    size_t expect_type = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        char cls_buf[32], name_buf[64];
        int n = 0, type = 0, dim = 0;
        long r = 0;
        unsigned long nnz = 0;
        if (std::sscanf(line.c_str(), "qmat v1 class=%31s n=%d config=%63s type=%d r=%ld dim=%d nnz=%lu",
                        cls_buf, &n, name_buf, &type, &r, &dim, &nnz) != 7)
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad qmat header");
        if (class_from_name(cls_buf) != cfg.cls || n != cfg.N || name_buf != cfg.name)
            throw ParseError(path + ":" + std::to_string(lineno) + ": qmat for a different problem");
        if (r != expect_r || type != static_cast<int>(expect_type))
            throw ParseError(path + ":" + std::to_string(lineno) + ": qmat out of order");
        if (expect_type >= cfg.bases.size() ||
            dim != static_cast<int>(cfg.bases[expect_type].flags.size()))
            throw ParseError(path + ":" + std::to_string(lineno) + ": qmat dimension mismatch");
        QSparse q;
        q.type = type;
        q.dim = dim;
        q.cells.reserve(nnz);
        for (unsigned long i = 0; i < nnz; ++i) {
            if (!std::getline(f, line))
                throw ParseError(path + ":" + std::to_string(lineno) + ": truncated qmat");
            ++lineno;
            char frac[64];
            int row = 0, col = 0;
            if (std::sscanf(line.c_str(), "%d %d %63s", &row, &col, frac) != 3)
                throw ParseError(path + ":" + std::to_string(lineno) + ": bad qmat cell");
            if (row < 0 || col < row || col >= dim)
                throw ParseError(path + ":" + std::to_string(lineno) + ": cell out of range");
            mpq_class v = parse_rational(frac);
            if (v < 0 || v > 1)
                throw ParseError(path + ":" + std::to_string(lineno) + ": cell outside [0,1]");
            q.cells.emplace_back(row, col, std::move(v));
        }
        chunk[expect_r - lo].push_back(std::move(q));
        if (++expect_type == cfg.bases.size()) {
            expect_type = 0;
            ++expect_r;
        }
    }
    if (expect_r != hi || expect_type != 0)
        throw ParseError(path + ": truncated qmat chunk (expected entries up to " +
                         std::to_string(hi) + ")");
    return chunk;
}

}  // namespace

void for_each_constraint(const Catalog& cat, const FlagConfig& cfg, const std::string& cache_dir,
                         int threads, const ConstraintFn& fn) {
    if (cat.cls != cfg.cls || cat.n != cfg.N)
        throw DomainError("for_each_constraint: catalog does not match the configuration");
    if (!cache_dir.empty()) std::filesystem::create_directories(cache_dir);
    const long total = static_cast<long>(cat.entries.size());
    for (long lo = 0; lo < total; lo += kChunk) {
        long hi = std::min(lo + kChunk, total);
        std::vector<std::vector<QSparse>> chunk;
        if (!cache_dir.empty()) {
            std::string path = chunk_path(cache_dir, cfg, lo);
            if (std::filesystem::exists(path)) {
                chunk = read_chunk(path, cfg, lo, hi);
            } else {
                chunk = compute_chunk(cat, cfg, lo, hi, threads);
                write_chunk(path, cfg, lo, chunk);
            }
        } else {
            chunk = compute_chunk(cat, cfg, lo, hi, threads);
        }
        for (long r = lo; r < hi; ++r)
            fn(r, cat.entries[r], noncrossing_k4_density(cat.entries[r]), chunk[r - lo]);
    }
}

}  // namespace rotsys
