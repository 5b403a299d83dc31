#ifndef NLROM_POLY_HPP
#define NLROM_POLY_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlrom {

using Exps = std::vector<int>;
using cplx = std::complex<double>;

inline int degree(const Exps& e) { return std::accumulate(e.begin(), e.end(), 0); }

/// Sparse multivariate polynomial with coefficients of type S.
template <typename S>
class Poly {
public:
    Poly() = default;
    explicit Poly(int nvars) : nvars_(nvars) {}

    static Poly variable(int nvars, int v, S c = S(1)) {
        Poly p(nvars);
        Exps e(nvars, 0);
        e[v] = 1;
        p.add(e, c);
        return p;
    }

    static Poly constant(int nvars, S c) {
        Poly p(nvars);
        p.add(Exps(nvars, 0), c);
        return p;
    }

    int nvars() const { return nvars_; }
    const std::map<Exps, S>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    S coeff(const Exps& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? S(0) : it->second;
    }

    void add(const Exps& e, S c) {
        if (int(e.size()) != nvars_) throw std::invalid_argument("exponent length mismatch");
        if (c == S(0)) return;
        auto [it, fresh] = terms_.emplace(e, c);
        if (!fresh) {
            it->second += c;
            if (it->second == S(0)) terms_.erase(it);
        }
    }

    void set(const Exps& e, S c) {
        if (c == S(0))
            terms_.erase(e);
        else
            terms_[e] = c;
    }

    int max_degree() const {
        int d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, degree(e));
        return d;
    }

    int min_degree() const {
        int d = 1 << 20;
        for (const auto& [e, c] : terms_) d = std::min(d, degree(e));
        return d;
    }

    Poly homogeneous(int k) const {
        Poly p(nvars_);
        for (const auto& [e, c] : terms_)
            if (degree(e) == k) p.terms_.emplace(e, c);
        return p;
    }

    Poly truncated(int max_deg) const {
        Poly p(nvars_);
        for (const auto& [e, c] : terms_)
            if (degree(e) <= max_deg) p.terms_.emplace(e, c);
        return p;
    }

    Poly& operator+=(const Poly& o) {
        adopt(o);
        for (const auto& [e, c] : o.terms_) add(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        adopt(o);
        for (const auto& [e, c] : o.terms_) add(e, -c);
        return *this;
    }
    Poly& operator*=(S s) {
        if (s == S(0)) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, S s) { return a *= s; }
    friend Poly operator*(S s, Poly a) { return a *= s; }

    /// Product, dropping terms above max_deg (negative means keep all).
    Poly mul(const Poly& o, int max_deg = -1) const {
        Poly p(std::max(nvars_, o.nvars_));
        Exps e(p.nvars_);
        for (const auto& [ea, ca] : terms_) {
            int da = degree(ea);
            for (const auto& [eb, cb] : o.terms_) {
                if (max_deg >= 0 && da + degree(eb) > max_deg) continue;
                for (int v = 0; v < p.nvars_; ++v) e[v] = ea[v] + eb[v];
                p.add(e, ca * cb);
            }
        }
        return p;
    }

    Poly derivative(int v) const {
        Poly p(nvars_);
        for (const auto& [e, c] : terms_) {
            if (e[v] == 0) continue;
            Exps d = e;
            d[v] -= 1;
            p.add(d, c * S(double(e[v])));
        }
        return p;
    }

    template <typename T>
    T evaluate(const std::vector<T>& x) const {
        T sum = T(0);
        for (const auto& [e, c] : terms_) {
            T m = T(c);
            for (int v = 0; v < nvars_; ++v)
                for (int k = 0; k < e[v]; ++k) m *= x[v];
            sum += m;
        }
        return sum;
    }

    /// Substitutes variable v -> subs[v], truncating at max_deg.
    Poly compose(const std::vector<Poly>& subs, int max_deg) const {
        if (int(subs.size()) != nvars_) throw std::invalid_argument("substitution size mismatch");
        const int nv = subs.empty() ? 0 : subs[0].nvars();
        Poly out(nv);
        // cache powers per variable
        std::vector<std::vector<Poly>> pw(nvars_);
        for (const auto& [e, c] : terms_) {
            Poly m = Poly::constant(nv, c);
            for (int v = 0; v < nvars_; ++v) {
                if (e[v] == 0) continue;
                auto& cache = pw[v];
                if (cache.empty()) cache.push_back(Poly::constant(nv, S(1)));
                while (int(cache.size()) <= e[v]) cache.push_back(cache.back().mul(subs[v], max_deg));
                m = m.mul(cache[e[v]], max_deg);
            }
            out += m;
        }
        return out;
    }

    /// Drops coefficients with |c| <= tol.
    void prune(double tol) {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (std::abs(it->second) <= tol)
                it = terms_.erase(it);
            else
                ++it;
        }
    }

private:
    void adopt(const Poly& o) {
        if (nvars_ == 0) nvars_ = o.nvars_;
        if (o.nvars_ != 0 && o.nvars_ != nvars_) throw std::invalid_argument("polynomial variable count mismatch");
    }

    int nvars_ = 0;
    std::map<Exps, S> terms_;
};

using RealPoly = Poly<double>;
using ComplexPoly = Poly<cplx>;

/// Real part of a complex polynomial; throws if any imaginary part exceeds tol * scale.
RealPoly real_part(const ComplexPoly& p, double tol);

ComplexPoly to_complex(const RealPoly& p);

/// Human readable form, e.g. "0.5*x0^2 - 1*y0".
std::string to_string(const RealPoly& p, int n_disp);

}  // namespace nlrom

#endif
