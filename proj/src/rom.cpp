#include "nlrom/rom.hpp"

#include <cmath>

namespace nlrom {

namespace {

std::vector<double> stack(const VectorXd& x, const VectorXd& y) {
    std::vector<double> s(x.size() + y.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) s[i] = x(i);
    for (Eigen::Index i = 0; i < y.size(); ++i) s[x.size() + i] = y(i);
    return s;
}

}  // namespace

VectorXd ManifoldMap::displacement_at(const VectorXd& x, const VectorXd& y) const {
    auto s = stack(x, y);
    VectorXd out(n_outputs());
    for (int i = 0; i < n_outputs(); ++i) out(i) = displacement[i].evaluate(s);
    return out;
}

VectorXd ManifoldMap::velocity_at(const VectorXd& x, const VectorXd& y) const {
    auto s = stack(x, y);
    VectorXd out(n_outputs());
    for (int i = 0; i < n_outputs(); ++i) out(i) = velocity[i].evaluate(s);
    return out;
}

VectorXd ReducedModel::acceleration(const VectorXd& x, const VectorXd& v, double t) const {
    return acceleration(x, v, t, force_frequency);
}

VectorXd ReducedModel::acceleration(const VectorXd& x, const VectorXd& v, double t,
                                    double frequency) const {
    auto s = stack(x, v);
    VectorXd a(m());
    for (int r = 0; r < m(); ++r) {
        a(r) = -omega(r) * omega(r) * x(r) - 2.0 * xi(r) * omega(r) * v(r) - restoring[r].evaluate(s);
        if (force_amplitude.size()) a(r) += force_amplitude(r) * std::cos(frequency * t);
    }
    return a;
}

RealPoly zero_poly(int m) { return RealPoly(2 * m); }

Exps exponents(const std::vector<int>& disp, const std::vector<int>& vel) {
    if (disp.size() != vel.size()) throw std::invalid_argument("exponent vectors differ in length");
    Exps e(disp);
    e.insert(e.end(), vel.begin(), vel.end());
    return e;
}

double coefficient(const RealPoly& p, const std::vector<int>& disp, const std::vector<int>& vel) {
    return p.coeff(exponents(disp, vel));
}

bool even_in_velocity(const RealPoly& p, int m) {
    for (const auto& [e, c] : p.terms()) {
        int v = 0;
        for (int r = 0; r < m; ++r) v += e[m + r];
        if (v % 2) return false;
    }
    return true;
}

bool velocity_free(const RealPoly& p, int m) {
    for (const auto& [e, c] : p.terms())
        for (int r = 0; r < m; ++r)
            if (e[m + r]) return false;
    return true;
}

double hb_gamma(const ReducedModel& rm, int r) {
    const int m = rm.m();
    if (r < 0 || r >= m) throw std::invalid_argument("master index out of range");
    double a2 = 0, b2 = 0, a3 = 0, b3 = 0;
    for (const auto& [e, c] : rm.restoring[r].terms()) {
        bool other = false;
        for (int q = 0; q < m; ++q)
            if (q != r && (e[q] || e[m + q])) other = true;
        if (other) continue;
        int dx = e[r], dv = e[m + r];
        if (dv % 2) throw std::invalid_argument("odd velocity term: backbone curvature undefined");
        if (dx == 2 && dv == 0) a2 += c;
        else if (dx == 0 && dv == 2) b2 += c;
        else if (dx == 3 && dv == 0) a3 += c;
        else if (dx == 1 && dv == 2) b3 += c;
    }
    const double w = rm.omega(r), w2 = w * w;
    return 3.0 * a3 / (8.0 * w2) + b3 / 8.0 -
           (5.0 * a2 * a2 + 5.0 * a2 * b2 * w2 + 2.0 * b2 * b2 * w2 * w2) / (12.0 * w2 * w2);
}

ManifoldMap linear_modal_map(int n_modes, const std::vector<int>& masters, const std::string& style) {
    check_masters(n_modes, masters);
    const int m = int(masters.size());
    ManifoldMap map;
    map.style = style;
    map.space = "modal";
    map.order = 1;
    map.masters = masters;
    map.displacement.assign(n_modes, zero_poly(m));
    map.velocity.assign(n_modes, zero_poly(m));
    for (int a = 0; a < m; ++a) {
        map.displacement[masters[a]] = RealPoly::variable(2 * m, a);
        map.velocity[masters[a]] = RealPoly::variable(2 * m, m + a);
    }
    return map;
}

}  // namespace nlrom
