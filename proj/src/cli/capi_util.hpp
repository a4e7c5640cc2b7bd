#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "rotsys.h"

namespace cli {

// Library failure surfaced to the command line; carries the status so main
// can pick the exit code.
struct RsError : std::runtime_error {
    rs_status status;
    RsError(rs_status st, const std::string& msg) : std::runtime_error(msg), status(st) {}
};

inline void check(rs_status st, const std::string& what) {
    if (st != RS_OK) throw RsError(st, what + ": " + rs_last_error());
}

// Adopts a string returned by the library and releases it.
inline std::string take(char* s) {
    std::string out = s == nullptr ? "" : s;
    rs_string_free(s);
    return out;
}

struct SystemDeleter {
    void operator()(rs_system* p) const { rs_system_free(p); }
};
struct CatalogDeleter {
    void operator()(rs_catalog* p) const { rs_catalog_free(p); }
};
struct FlagsetDeleter {
    void operator()(rs_flagset* p) const { rs_flagset_free(p); }
};
struct SolutionDeleter {
    void operator()(rs_solution* p) const { rs_solution_free(p); }
};
struct CertificateDeleter {
    void operator()(rs_certificate* p) const { rs_certificate_free(p); }
};

using SystemPtr = std::unique_ptr<rs_system, SystemDeleter>;
using CatalogPtr = std::unique_ptr<rs_catalog, CatalogDeleter>;
using FlagsetPtr = std::unique_ptr<rs_flagset, FlagsetDeleter>;
using SolutionPtr = std::unique_ptr<rs_solution, SolutionDeleter>;
using CertificatePtr = std::unique_ptr<rs_certificate, CertificateDeleter>;

// Builds the class catalog at size n, starting from a saved catalog file when
// `from` is nonempty and extending one vertex at a time as needed. An empty
// `cls` accepts whatever class the file declares.
inline CatalogPtr obtain_catalog(const std::string& cls, int n, const std::string& from,
                                 int threads) {
    if (from.empty()) {
        rs_catalog* cat = nullptr;
        check(rs_catalog_build(cls.c_str(), n, threads, &cat), "building catalog");
        return CatalogPtr(cat);
    }
    rs_catalog* raw = nullptr;
    check(rs_catalog_load(from.c_str(), &raw), "loading " + from);
    CatalogPtr cat(raw);
    char* c = nullptr;
    check(rs_catalog_class(cat.get(), &c), "reading catalog class");
    std::string file_cls = take(c);
    if (!cls.empty() && file_cls != cls)
        throw RsError(RS_ERR_DOMAIN,
                      from + ": catalog class is " + file_cls + ", expected " + cls);
    int have = 0;
    check(rs_catalog_n(cat.get(), &have), "reading catalog size");
    if (have > n)
        throw RsError(RS_ERR_DOMAIN, from + ": catalog is on " + std::to_string(have) +
                                         " vertices, beyond the requested " + std::to_string(n));
    while (have < n) {
        rs_catalog* next = nullptr;
        check(rs_catalog_extend(cat.get(), threads, &next), "extending catalog");
        cat.reset(next);
        ++have;
    }
    return cat;
}

}  // namespace cli
