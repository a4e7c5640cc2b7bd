#include "core/digest.hpp"

#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "core/errors.hpp"

namespace rotsys {

namespace {

struct Hasher {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(),
                                                                EVP_MD_CTX_free};

    Hasher() {
        if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
            throw IoError("sha256: init failed");
    }

    void update(const char* data, size_t len) {
        if (EVP_DigestUpdate(ctx.get(), data, len) != 1) throw IoError("sha256: update failed");
    }

    std::string finish() {
        unsigned char out[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx.get(), out, &len) != 1) throw IoError("sha256: final failed");
        static const char* hex = "0123456789abcdef";
        std::string s;
        s.reserve(2 * len);
        for (unsigned int i = 0; i < len; ++i) {
            s += hex[out[i] >> 4];
            s += hex[out[i] & 15];
        }
        return s;
    }
};

}  // namespace

std::string sha256_hex(const std::string& data) {
    Hasher h;
    h.update(data.data(), data.size());
    return h.finish();
}

std::string sha256_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    Hasher h;
    char buf[1 << 16];
    while (f.read(buf, sizeof(buf)) || f.gcount() > 0)
        h.update(buf, static_cast<size_t>(f.gcount()));
    return h.finish();
}

}  // namespace rotsys
