#include "nlrom/poly.hpp"

#include <cstdio>

namespace nlrom {

RealPoly real_part(const ComplexPoly& p, double tol) {
    double scale = 0.0;
    for (const auto& [e, c] : p.terms()) scale = std::max(scale, std::abs(c));
    RealPoly r(p.nvars());
    for (const auto& [e, c] : p.terms()) {
        if (std::abs(c.imag()) > tol * std::max(scale, 1.0))
            throw std::runtime_error("polynomial has a non-negligible imaginary part");
        r.add(e, c.real());
    }
    return r;
}

ComplexPoly to_complex(const RealPoly& p) {
    ComplexPoly c(p.nvars());
    for (const auto& [e, v] : p.terms()) c.add(e, cplx(v, 0.0));
    return c;
}

std::string to_string(const RealPoly& p, int n_disp) {
    std::string s;
    char buf[64];
    for (const auto& [e, c] : p.terms()) {
        std::snprintf(buf, sizeof buf, "%s%.6g", s.empty() ? "" : (c < 0 ? " - " : " + "),
                      s.empty() ? c : std::abs(c));
        s += buf;
        for (int v = 0; v < p.nvars(); ++v) {
            if (!e[v]) continue;
            s += "*";
            s += v < n_disp ? "x" + std::to_string(v) : "y" + std::to_string(v - n_disp);
            if (e[v] > 1) s += "^" + std::to_string(e[v]);
        }
    }
    return s.empty() ? "0" : s;
}

}  // namespace nlrom
