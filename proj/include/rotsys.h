/* C interface to the rotation-system library.
 *
 * Conventions:
 *   - Every fallible function returns rs_status; RS_OK is 0. On failure the
 *     thread-local message of rs_last_error() describes the problem and
 *     output parameters are left untouched.
 *   - Strings returned through char** are heap-allocated; release them with
 *     rs_string_free. Handles are released with their matching *_free, which
 *     accepts NULL.
 *   - Exact rationals cross this boundary as "p/q" (or plain "p") strings.
 *   - System classes are named "realizable" or "convex".
 */

#ifndef ROTSYS_H
#define ROTSYS_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rs_status {
    RS_OK = 0,
    RS_ERR_DOMAIN = 1,              /* invalid argument or out of range */
    RS_ERR_PARSE = 2,               /* malformed text input or file */
    RS_ERR_IO = 3,                  /* file system failure */
    RS_ERR_CORRUPT_SEED = 4,        /* embedded seed data failed validation */
    RS_ERR_DIMENSION = 5,           /* matrix or basis shape mismatch */
    RS_ERR_INVALID_CERTIFICATE = 6, /* certificate structurally unusable */
    RS_ERR_VERIFY_FAILED = 7,       /* recomputed bound exceeds the claim */
    RS_ERR_NOMEM = 8,
    RS_ERR_UNKNOWN = 9
} rs_status;

typedef struct rs_system rs_system;
typedef struct rs_catalog rs_catalog;
typedef struct rs_flagset rs_flagset;
typedef struct rs_solution rs_solution;
typedef struct rs_certificate rs_certificate;

/* Message of the most recent failure on this thread; empty string if the
 * last call succeeded. The pointer stays valid until the next library call
 * on the same thread. */
const char* rs_last_error(void);

void rs_string_free(char* s);

const char* rs_version(void);

/* ---- rotation systems ---------------------------------------------- */

/* Parses "0:1,2,3;1:0,3,2;..." (vertex: its rotation, semicolon-joined). */
rs_status rs_system_parse(const char* line, rs_system** out);
rs_status rs_system_format(const rs_system* r, char** out);
void rs_system_free(rs_system* r);

rs_status rs_system_size(const rs_system* r, int* out);
rs_status rs_system_equal(const rs_system* a, const rs_system* b, int* out);

/* Lexicographically least relabeling; equal canonical forms characterize
 * isomorphic systems. */
rs_status rs_system_canonical(const rs_system* r, rs_system** out);
rs_status rs_system_canonical_key(const rs_system* r, char** out);
rs_status rs_system_inverse(const rs_system* r, rs_system** out);
rs_status rs_system_induced(const rs_system* r, const int* vertices, int count, rs_system** out);

/* Number of 4-subsets inducing a crossing K4. */
rs_status rs_system_crossings(const rs_system* r, long* out);

/* Probability that a uniform |small|-subset of big induces small, "p/q". */
rs_status rs_system_density(const rs_system* small, const rs_system* big, char** out);
rs_status rs_system_noncrossing_k4_density(const rs_system* r, char** out);

/* Membership test driven by the class's size-5 catalog: every 5-subsystem
 * must belong to it. Requires at least 5 vertices. */
rs_status rs_system_in_class(const rs_system* r, const char* cls, int* out);

/* Rotation system of the straight-line drawing on the given points
 * (x0,y0,x1,y1,...), which must be in general position. */
rs_status rs_system_from_points(const long* xy, int n, rs_system** out);

/* ---- catalogs ------------------------------------------------------- */

/* All non-isomorphic systems of the class on n vertices, 3 <= n <= 8,
 * built by repeated one-vertex extension of the embedded size-5 seeds.
 * threads <= 0 picks a machine-dependent default. */
rs_status rs_catalog_build(const char* cls, int n, int threads, rs_catalog** out);
rs_status rs_catalog_extend(const rs_catalog* cat, int threads, rs_catalog** out);
rs_status rs_catalog_load(const char* path, rs_catalog** out);
rs_status rs_catalog_save(const rs_catalog* cat, const char* path);
void rs_catalog_free(rs_catalog* cat);

rs_status rs_catalog_size(const rs_catalog* cat, long* out);
rs_status rs_catalog_n(const rs_catalog* cat, int* out);
rs_status rs_catalog_class(const rs_catalog* cat, char** out);
rs_status rs_catalog_entry(const rs_catalog* cat, long index, rs_system** out);
/* Index of the entry equivalent to r, or -1. */
rs_status rs_catalog_find(const rs_catalog* cat, const rs_system* r, long* out);
rs_status rs_catalog_crossing_range(const rs_catalog* cat, long* min_out, long* max_out);

/* ---- closed-form values --------------------------------------------- */

/* Conjectured crossing number of K_n, n >= 3. */
rs_status rs_hill_number(long n, long long* out);
/* Conjectured crossing number of K_{p,q}, p, q >= 1. */
rs_status rs_zarankiewicz(long p, long q, long long* out);
/* ceil(bound * C(n,4) / C(m,4)) as a decimal string: the counting bound
 * lifted from K_m to K_n, n >= m >= 5. */
rs_status rs_counting_lift(int m, const char* bound, int n, char** out);
/* bound / (24 C(m,4)) as "p/q". */
rs_status rs_counting_lift_coefficient(int m, const char* bound, char** out);
/* (1 - d) / (3/8) for a density d in [0,1], as "p/q". */
rs_status rs_density_to_hill_ratio(const char* density, char** out);
/* Exact decimal rendering of "p/q", truncated toward zero. */
rs_status rs_decimal_string(const char* rational, int digits, char** out);

/* ---- flag configurations and the bounding program ------------------- */

/* config is "full" (realizable n=7 or convex n=8) or "sigma12". */
rs_status rs_flagset_make(const char* cls, int n, const char* config, rs_flagset** out);
void rs_flagset_free(rs_flagset* f);
rs_status rs_flagset_types(const rs_flagset* f, int* out);
rs_status rs_flagset_dim(const rs_flagset* f, int type, int* out);
rs_status rs_flagset_flag_total(const rs_flagset* f, long long* out);
rs_status rs_flagset_variable_total(const rs_flagset* f, long long* out);

/* Writes the bounding semidefinite program in sparse SDPA form. cache_dir
 * may be empty; when set, pair-density matrices are cached there in chunks
 * and interrupted runs resume. */
rs_status rs_sdp_export(const rs_catalog* cat, const rs_flagset* f, const char* cache_dir,
                        int threads, const char* path);

/* Reads a solver's output (CSDP solution layout or SDPA yMat layout) for
 * the program exported from this flag set and catalog size. */
rs_status rs_solution_import(const char* path, const rs_flagset* f, long catalog_size,
                             rs_solution** out);
void rs_solution_free(rs_solution* s);
rs_status rs_solution_asymmetry(const rs_solution* s, double* out);
/* The solver's own objective value lambda_plus - lambda_minus, before any
 * rounding. Informational; certificates recompute exactly. */
rs_status rs_solution_lambda(const rs_solution* s, double* out);

/* ---- certificates ---------------------------------------------------- */

/* Rounds the solution to exact rational PSD factorizations and stores the
 * recomputed exact bound as the claim. denom_bits is the dyadic precision
 * of the rounding (32 is ample). */
rs_status rs_certificate_make(const rs_catalog* cat, const rs_flagset* f, const rs_solution* s,
                              int denom_bits, const char* cache_dir, int threads,
                              rs_certificate** out);
rs_status rs_certificate_load(const char* path, rs_certificate** out);
rs_status rs_certificate_save(const rs_certificate* c, const char* path);
void rs_certificate_free(rs_certificate* c);

rs_status rs_certificate_class(const rs_certificate* c, char** out);
rs_status rs_certificate_n(const rs_certificate* c, int* out);
rs_status rs_certificate_config(const rs_certificate* c, char** out);
rs_status rs_certificate_bound(const rs_certificate* c, char** out);

/* Recomputes max over the catalog of b_R + sum_i <M_i, Q_{i,R}> in exact
 * rational arithmetic. On success writes the recomputed bound, the index
 * and printable form of the entry attaining it, and the bound converted by
 * rs_density_to_hill_ratio. Fails with RS_ERR_VERIFY_FAILED when the
 * recomputed bound exceeds the certificate's claim; the message then names
 * the witness entry and the recomputed value, never the claim alone. Output
 * pointers may be NULL when the caller does not need them. */
rs_status rs_certificate_verify(const rs_certificate* c, const rs_catalog* cat,
                                const char* cache_dir, int threads, char** bound_out,
                                long* argmax_out, char** witness_out, char** ratio_out);

/* ---- miscellany ------------------------------------------------------ */

rs_status rs_sha256_file(const char* path, char** out);

#ifdef __cplusplus
}
#endif

#endif /* ROTSYS_H */
