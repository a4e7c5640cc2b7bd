#include "rotsys.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "core/catalog.hpp"
#include "core/certificate.hpp"
#include "core/digest.hpp"
#include "core/errors.hpp"
#include "core/flags.hpp"
#include "core/metrics.hpp"
#include "core/quads.hpp"
#include "core/rotation_system.hpp"
#include "core/sdp_io.hpp"
#include "core/seeds.hpp"

struct rs_system {
    rotsys::RotationSystem v;
};
struct rs_catalog {
    rotsys::Catalog v;
};
struct rs_flagset {
    rotsys::FlagConfig v;
};
struct rs_solution {
    rotsys::SdpSolution v;
};
struct rs_certificate {
    rotsys::Certificate v;
};

namespace {

thread_local std::string g_error;

void require(bool cond, const char* msg) {
    if (!cond) throw rotsys::DomainError(msg);
}

// Returned strings are released by the caller with rs_string_free, so they
// must come from malloc.
char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Owns a malloc'd string until every output of a multi-string call is ready,
// so a later allocation failure cannot leak the earlier ones.
struct MallocString {
    char* p = nullptr;
    MallocString() = default;
    explicit MallocString(const std::string& s) : p(dup_string(s)) {}
    MallocString(const MallocString&) = delete;
    MallocString& operator=(const MallocString&) = delete;
    ~MallocString() { std::free(p); }
    char* release() {
        char* out = p;
        p = nullptr;
        return out;
    }
};

template <typename Fn>
rs_status guarded(Fn&& fn) {
    try {
        fn();
        g_error.clear();
        return RS_OK;
    } catch (const rotsys::VerifyFailedError& e) {
        g_error = e.what();
        return RS_ERR_VERIFY_FAILED;
    } catch (const rotsys::InvalidCertificateError& e) {
        g_error = e.what();
        return RS_ERR_INVALID_CERTIFICATE;
    } catch (const rotsys::CorruptSeedError& e) {
        g_error = e.what();
        return RS_ERR_CORRUPT_SEED;
    } catch (const rotsys::DimensionError& e) {
        g_error = e.what();
        return RS_ERR_DIMENSION;
    } catch (const rotsys::ParseError& e) {
        g_error = e.what();
        return RS_ERR_PARSE;
    } catch (const rotsys::IoError& e) {
        g_error = e.what();
        return RS_ERR_IO;
    } catch (const std::bad_alloc&) {
        g_error = "out of memory";
        return RS_ERR_NOMEM;
    } catch (const std::invalid_argument& e) {
        g_error = e.what();
        return RS_ERR_DOMAIN;
    } catch (const std::exception& e) {
        g_error = e.what();
        return RS_ERR_UNKNOWN;
    }
}

const rotsys::Labeled5Lookup& lookup_for(rotsys::SystemClass cls) {
    static const rotsys::Labeled5Lookup realizable =
        rotsys::build_lookup(rotsys::base_catalog(rotsys::SystemClass::realizable, 5));
    static const rotsys::Labeled5Lookup convex =
        rotsys::build_lookup(rotsys::base_catalog(rotsys::SystemClass::convex, 5));
    return cls == rotsys::SystemClass::convex ? convex : realizable;
}

std::vector<int> block_dims(const rotsys::FlagConfig& cfg) {
    std::vector<int> dims;
    dims.reserve(cfg.bases.size());
    for (const auto& basis : cfg.bases) dims.push_back(static_cast<int>(basis.flags.size()));
    return dims;
}

mpz_class parse_integer(const char* s, const char* what) {
    require(s != nullptr, what);
    try {
        return mpz_class(std::string(s));
    } catch (const std::invalid_argument&) {
        throw rotsys::ParseError(std::string(what) + ": not an integer: " + s);
    }
}

}  // namespace

extern "C" {

const char* rs_last_error(void) { return g_error.c_str(); }

void rs_string_free(char* s) { std::free(s); }

const char* rs_version(void) { return "1.0.0"; }

/* ---- rotation systems ---------------------------------------------- */

rs_status rs_system_parse(const char* line, rs_system** out) {
    return guarded([&] {
        require(line != nullptr && out != nullptr, "rs_system_parse: null argument");
        rotsys::RotationSystem r;
        try {
            r = rotsys::parse_system(line);
        } catch (const std::invalid_argument& e) {
            throw rotsys::ParseError(e.what());
        }
        *out = new rs_system{r};
    });
}

rs_status rs_system_format(const rs_system* r, char** out) {
    return guarded([&] {
        require(r != nullptr && out != nullptr, "rs_system_format: null argument");
        *out = dup_string(rotsys::format_system(r->v));
    });
}

void rs_system_free(rs_system* r) { delete r; }

rs_status rs_system_size(const rs_system* r, int* out) {
    return guarded([&] {
        require(r != nullptr && out != nullptr, "rs_system_size: null argument");
        *out = r->v.n;
    });
}

rs_status rs_system_equal(const rs_system* a, const rs_system* b, int* out) {
    return guarded([&] {
        require(a != nullptr && b != nullptr && out != nullptr, "rs_system_equal: null argument");
        *out = rotsys::is_isomorphic(a->v, b->v) ? 1 : 0;
    });
}

rs_status rs_system_canonical(const rs_system* r, rs_system** out) {
    return guarded([&] {
        require(r != nullptr && out != nullptr, "rs_system_canonical: null argument");
        *out = new rs_system{rotsys::canonical_representative(r->v)};
    });
}

rs_status rs_system_canonical_key(const rs_system* r, char** out) {
    return guarded([&] {
        require(r != nullptr && out != nullptr, "rs_system_canonical_key: null argument");
        *out = dup_string(rotsys::key_to_string(rotsys::canonical_form(r->v)));
    });
}

rs_status rs_system_inverse(const rs_system* r, rs_system** out) {
    return guarded([&] {
        require(r != nullptr && out != nullptr, "rs_system_inverse: null argument");
        *out = new rs_system{rotsys::inverse(r->v)};
    });
}

rs_status rs_system_induced(const rs_system* r, const int* vertices, int count, rs_system** out) {
    return guarded([&] {
        require(r != nullptr && vertices != nullptr && out != nullptr,
                "rs_system_induced: null argument");
        require(count > 0, "rs_system_induced: empty vertex set");
        std::vector<int> verts(vertices, vertices + count);
        *out = new rs_system{rotsys::induced_subsystem(r->v, verts)};
    });
}

rs_status rs_system_crossings(const rs_system* r, long* out) {
    return guarded([&] {
        require(r != nullptr && out != nullptr, "rs_system_crossings: null argument");
        require(r->v.n >= 4, "rs_system_crossings: needs at least 4 vertices");
        *out = rotsys::crossing_count(r->v);
    });
}

rs_status rs_system_density(const rs_system* small, const rs_system* big, char** out) {
    return guarded([&] {
        require(small != nullptr && big != nullptr && out != nullptr,
                "rs_system_density: null argument");
        *out = dup_string(rotsys::rational_string(rotsys::density(small->v, big->v)));
    });
}

rs_status rs_system_noncrossing_k4_density(const rs_system* r, char** out) {
    return guarded([&] {
        require(r != nullptr && out != nullptr, "rs_system_noncrossing_k4_density: null argument");
        require(r->v.n >= 4, "rs_system_noncrossing_k4_density: needs at least 4 vertices");
        *out = dup_string(rotsys::rational_string(rotsys::noncrossing_k4_density(r->v)));
    });
}

rs_status rs_system_in_class(const rs_system* r, const char* cls, int* out) {
    return guarded([&] {
        require(r != nullptr && cls != nullptr && out != nullptr,
                "rs_system_in_class: null argument");
        require(r->v.n >= 5, "rs_system_in_class: needs at least 5 vertices");
        *out = rotsys::is_in_class(r->v, lookup_for(rotsys::class_from_name(cls))) ? 1 : 0;
    });
}

rs_status rs_system_from_points(const long* xy, int n, rs_system** out) {
    return guarded([&] {
        require(xy != nullptr && out != nullptr, "rs_system_from_points: null argument");
        require(n >= 3 && n <= rotsys::kMaxN, "rs_system_from_points: point count out of range");
        std::vector<std::array<long, 2>> pts(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) pts[static_cast<size_t>(i)] = {xy[2 * i], xy[2 * i + 1]};
        *out = new rs_system{rotsys::system_of_points(pts)};
    });
}

/* ---- catalogs ------------------------------------------------------- */

rs_status rs_catalog_build(const char* cls, int n, int threads, rs_catalog** out) {
    return guarded([&] {
        require(cls != nullptr && out != nullptr, "rs_catalog_build: null argument");
        require(n >= 3 && n <= rotsys::kMaxN, "rs_catalog_build: n out of range");
        rotsys::SystemClass c = rotsys::class_from_name(cls);
        rotsys::Catalog cat = rotsys::base_catalog(c, n <= 5 ? n : 5);
        while (cat.n < n) cat = rotsys::extend_catalog(cat, threads);
        *out = new rs_catalog{std::move(cat)};
    });
}

rs_status rs_catalog_extend(const rs_catalog* cat, int threads, rs_catalog** out) {
    return guarded([&] {
        require(cat != nullptr && out != nullptr, "rs_catalog_extend: null argument");
        require(cat->v.n >= 5, "rs_catalog_extend: catalog too small to filter extensions");
        require(cat->v.n < rotsys::kMaxN, "rs_catalog_extend: catalog already at the size cap");
        *out = new rs_catalog{rotsys::extend_catalog(cat->v, threads)};
    });
}

rs_status rs_catalog_load(const char* path, rs_catalog** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "rs_catalog_load: null argument");
        *out = new rs_catalog{rotsys::load_catalog(path)};
    });
}

rs_status rs_catalog_save(const rs_catalog* cat, const char* path) {
    return guarded([&] {
        require(cat != nullptr && path != nullptr, "rs_catalog_save: null argument");
        rotsys::save_catalog(cat->v, path);
    });
}

void rs_catalog_free(rs_catalog* cat) { delete cat; }

rs_status rs_catalog_size(const rs_catalog* cat, long* out) {
    return guarded([&] {
        require(cat != nullptr && out != nullptr, "rs_catalog_size: null argument");
        *out = static_cast<long>(cat->v.entries.size());
    });
}

rs_status rs_catalog_n(const rs_catalog* cat, int* out) {
    return guarded([&] {
        require(cat != nullptr && out != nullptr, "rs_catalog_n: null argument");
        *out = cat->v.n;
    });
}

rs_status rs_catalog_class(const rs_catalog* cat, char** out) {
    return guarded([&] {
        require(cat != nullptr && out != nullptr, "rs_catalog_class: null argument");
        *out = dup_string(rotsys::class_name(cat->v.cls));
    });
}

rs_status rs_catalog_entry(const rs_catalog* cat, long index, rs_system** out) {
    return guarded([&] {
        require(cat != nullptr && out != nullptr, "rs_catalog_entry: null argument");
        require(index >= 0 && index < static_cast<long>(cat->v.entries.size()),
                "rs_catalog_entry: index out of range");
        *out = new rs_system{cat->v.entries[static_cast<size_t>(index)]};
    });
}

rs_status rs_catalog_find(const rs_catalog* cat, const rs_system* r, long* out) {
    return guarded([&] {
        require(cat != nullptr && r != nullptr && out != nullptr, "rs_catalog_find: null argument");
        *out = cat->v.find(rotsys::canonical_form(r->v));
    });
}

rs_status rs_catalog_crossing_range(const rs_catalog* cat, long* min_out, long* max_out) {
    return guarded([&] {
        require(cat != nullptr, "rs_catalog_crossing_range: null argument");
        require(!cat->v.entries.empty(), "rs_catalog_crossing_range: empty catalog");
        require(cat->v.n >= 4, "rs_catalog_crossing_range: needs at least 4 vertices");
        long lo = -1;
        long hi = -1;
        for (const auto& r : cat->v.entries) {
            long c = rotsys::crossing_count(r);
            if (lo < 0 || c < lo) lo = c;
            if (c > hi) hi = c;
        }
        if (min_out != nullptr) *min_out = lo;
        if (max_out != nullptr) *max_out = hi;
    });
}

/* ---- closed-form values --------------------------------------------- */

rs_status rs_hill_number(long n, long long* out) {
    return guarded([&] {
        require(out != nullptr, "rs_hill_number: null argument");
        require(n >= 3, "rs_hill_number: n must be at least 3");
        *out = rotsys::hill_number(n);
    });
}

rs_status rs_zarankiewicz(long p, long q, long long* out) {
    return guarded([&] {
        require(out != nullptr, "rs_zarankiewicz: null argument");
        require(p >= 1 && q >= 1, "rs_zarankiewicz: sides must be at least 1");
        *out = rotsys::zarankiewicz(p, q);
    });
}

rs_status rs_counting_lift(int m, const char* bound, int n, char** out) {
    return guarded([&] {
        require(out != nullptr, "rs_counting_lift: null argument");
        mpz_class b = parse_integer(bound, "rs_counting_lift");
        *out = dup_string(rotsys::counting_lift(m, b, n).get_str());
    });
}

rs_status rs_counting_lift_coefficient(int m, const char* bound, char** out) {
    return guarded([&] {
        require(out != nullptr, "rs_counting_lift_coefficient: null argument");
        mpz_class b = parse_integer(bound, "rs_counting_lift_coefficient");
        *out = dup_string(rotsys::rational_string(rotsys::counting_lift_coefficient(m, b)));
    });
}

rs_status rs_density_to_hill_ratio(const char* density, char** out) {
    return guarded([&] {
        require(density != nullptr && out != nullptr, "rs_density_to_hill_ratio: null argument");
        mpq_class d = rotsys::parse_rational(density);
        *out = dup_string(rotsys::rational_string(rotsys::density_to_hill_ratio(d)));
    });
}

rs_status rs_decimal_string(const char* rational, int digits, char** out) {
    return guarded([&] {
        require(rational != nullptr && out != nullptr, "rs_decimal_string: null argument");
        require(digits >= 0, "rs_decimal_string: negative digit count");
        mpq_class q = rotsys::parse_rational(rational);
        *out = dup_string(rotsys::decimal_string(q, digits));
    });
}

/* ---- flag configurations and the bounding program ------------------- */

rs_status rs_flagset_make(const char* cls, int n, const char* config, rs_flagset** out) {
    return guarded([&] {
        require(cls != nullptr && config != nullptr && out != nullptr,
                "rs_flagset_make: null argument");
        rotsys::SystemClass c = rotsys::class_from_name(cls);
        *out = new rs_flagset{rotsys::make_flag_config(c, n, config)};
    });
}

void rs_flagset_free(rs_flagset* f) { delete f; }

rs_status rs_flagset_types(const rs_flagset* f, int* out) {
    return guarded([&] {
        require(f != nullptr && out != nullptr, "rs_flagset_types: null argument");
        *out = static_cast<int>(f->v.bases.size());
    });
}

rs_status rs_flagset_dim(const rs_flagset* f, int type, int* out) {
    return guarded([&] {
        require(f != nullptr && out != nullptr, "rs_flagset_dim: null argument");
        require(type >= 0 && type < static_cast<int>(f->v.bases.size()),
                "rs_flagset_dim: type index out of range");
        *out = static_cast<int>(f->v.bases[static_cast<size_t>(type)].flags.size());
    });
}

rs_status rs_flagset_flag_total(const rs_flagset* f, long long* out) {
    return guarded([&] {
        require(f != nullptr && out != nullptr, "rs_flagset_flag_total: null argument");
        *out = rotsys::flag_total(f->v);
    });
}

rs_status rs_flagset_variable_total(const rs_flagset* f, long long* out) {
    return guarded([&] {
        require(f != nullptr && out != nullptr, "rs_flagset_variable_total: null argument");
        *out = rotsys::variable_total(f->v);
    });
}

rs_status rs_sdp_export(const rs_catalog* cat, const rs_flagset* f, const char* cache_dir,
                        int threads, const char* path) {
    return guarded([&] {
        require(cat != nullptr && f != nullptr && path != nullptr,
                "rs_sdp_export: null argument");
        rotsys::export_sdpa(cat->v, f->v, cache_dir == nullptr ? "" : cache_dir, threads, path);
    });
}

rs_status rs_solution_import(const char* path, const rs_flagset* f, long catalog_size,
                             rs_solution** out) {
    return guarded([&] {
        require(path != nullptr && f != nullptr && out != nullptr,
                "rs_solution_import: null argument");
        require(catalog_size > 0, "rs_solution_import: catalog size must be positive");
        *out = new rs_solution{rotsys::import_solution(path, block_dims(f->v), catalog_size + 2)};
    });
}

void rs_solution_free(rs_solution* s) { delete s; }

rs_status rs_solution_asymmetry(const rs_solution* s, double* out) {
    return guarded([&] {
        require(s != nullptr && out != nullptr, "rs_solution_asymmetry: null argument");
        *out = s->v.max_asymmetry;
    });
}

rs_status rs_solution_lambda(const rs_solution* s, double* out) {
    return guarded([&] {
        require(s != nullptr && out != nullptr, "rs_solution_lambda: null argument");
        *out = s->v.lambda_plus - s->v.lambda_minus;
    });
}

/* ---- certificates ---------------------------------------------------- */

rs_status rs_certificate_make(const rs_catalog* cat, const rs_flagset* f, const rs_solution* s,
                              int denom_bits, const char* cache_dir, int threads,
                              rs_certificate** out) {
    return guarded([&] {
        require(cat != nullptr && f != nullptr && s != nullptr && out != nullptr,
                "rs_certificate_make: null argument");
        *out = new rs_certificate{rotsys::make_certificate(
            cat->v, f->v, s->v, denom_bits, cache_dir == nullptr ? "" : cache_dir, threads)};
    });
}

rs_status rs_certificate_load(const char* path, rs_certificate** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "rs_certificate_load: null argument");
        *out = new rs_certificate{rotsys::load_certificate(path)};
    });
}

rs_status rs_certificate_save(const rs_certificate* c, const char* path) {
    return guarded([&] {
        require(c != nullptr && path != nullptr, "rs_certificate_save: null argument");
        rotsys::save_certificate(c->v, path);
    });
}

void rs_certificate_free(rs_certificate* c) { delete c; }

rs_status rs_certificate_class(const rs_certificate* c, char** out) {
    return guarded([&] {
        require(c != nullptr && out != nullptr, "rs_certificate_class: null argument");
        *out = dup_string(rotsys::class_name(c->v.cls));
    });
}

rs_status rs_certificate_n(const rs_certificate* c, int* out) {
    return guarded([&] {
        require(c != nullptr && out != nullptr, "rs_certificate_n: null argument");
        *out = c->v.N;
    });
}

rs_status rs_certificate_config(const rs_certificate* c, char** out) {
    return guarded([&] {
        require(c != nullptr && out != nullptr, "rs_certificate_config: null argument");
        *out = dup_string(c->v.config);
    });
}

rs_status rs_certificate_bound(const rs_certificate* c, char** out) {
    return guarded([&] {
        require(c != nullptr && out != nullptr, "rs_certificate_bound: null argument");
        *out = dup_string(rotsys::rational_string(c->v.bound));
    });
}

rs_status rs_certificate_verify(const rs_certificate* c, const rs_catalog* cat,
                                const char* cache_dir, int threads, char** bound_out,
                                long* argmax_out, char** witness_out, char** ratio_out) {
    return guarded([&] {
        require(c != nullptr && cat != nullptr, "rs_certificate_verify: null argument");
        rotsys::VerifyReport report = rotsys::verify_certificate(
            c->v, cat->v, cache_dir == nullptr ? "" : cache_dir, threads);
        MallocString bound(rotsys::rational_string(report.recomputed));
        MallocString witness(report.witness);
        MallocString ratio(rotsys::rational_string(report.ratio));
        if (bound_out != nullptr) *bound_out = bound.release();
        if (argmax_out != nullptr) *argmax_out = report.argmax;
        if (witness_out != nullptr) *witness_out = witness.release();
        if (ratio_out != nullptr) *ratio_out = ratio.release();
    });
}

/* ---- miscellany ------------------------------------------------------ */

rs_status rs_sha256_file(const char* path, char** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "rs_sha256_file: null argument");
        *out = dup_string(rotsys::sha256_file(path));
    });
}

}  // extern "C"
