// one PASS/FAIL line per criterion; exit status 1 if any fails
#include <cstdio>
#include <cstring>
#include <string>

#include "qes/error.hpp"
#include "qes/verify.hpp"

int main(int argc, char** argv) {
    std::string only;
    qes::Tolerances tol;
    try {
        for (int i = 1; i < argc; ++i) {
            if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
                only = argv[++i];
            } else if (!std::strcmp(argv[i], "--tol") && i + 1 < argc) {
                const std::string kv = argv[++i];
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw qes::Error(qes::ErrorKind::config, "--tol expects NAME=VALUE");
                tol.set(kv.substr(0, eq), std::stod(kv.substr(eq + 1)));
            } else {
                std::fprintf(stderr, "usage: %s [--only N|slug] [--tol NAME=VALUE]...\n", argv[0]);
                return 2;
            }
        }
        bool all = true;
        for (const auto& r : qes::run_verify(qes::select_criteria(only), tol)) {
            std::printf("criterion %2d %-16s %s  (%.2fs)  %s\n", r.id, r.slug.c_str(), r.passed ? "PASS" : "FAIL",
                        r.seconds, r.detail.c_str());
            all = all && r.passed;
        }
        return all ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
