#include "nlrom/invariant.hpp"

#include "nlrom/parametrisation.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace nlrom {

namespace {

std::string mode_name(int p) { return "mode " + std::to_string(p + 1); }

void check_index(int N, int m) {
    if (m < 0 || m >= N) throw std::invalid_argument("master index out of range");
}

using Coef4 = std::function<double(int, int, int, int)>;  // by master positions

// Trivially resonant cubic reduced dynamics shared by the modal and direct
// normal forms: for equation r the monomials built on {r, j, j}.
std::vector<RealPoly> nf_reduced_terms(int m, const Coef4& A, const Coef4& B, const Coef4& h) {
    std::vector<RealPoly> out(m, zero_poly(m));
    auto mono = [m](std::initializer_list<std::pair<int, int>> xs, std::initializer_list<std::pair<int, int>> ys) {
        std::vector<int> d(m, 0), v(m, 0);
        for (auto [i, e] : xs) d[i] += e;
        for (auto [i, e] : ys) v[i] += e;
        return exponents(d, v);
    };
    for (int r = 0; r < m; ++r) {
        RealPoly& p = out[r];
        p.add(mono({{r, 3}}, {}), A(r, r, r, r) + h(r, r, r, r));
        p.add(mono({{r, 1}}, {{r, 2}}), B(r, r, r, r));
        for (int j = 0; j < m; ++j) {
            if (j == r) continue;
            p.add(mono({{r, 1}, {j, 2}}, {}),
                  A(r, j, j, r) + A(r, j, r, j) + A(r, r, j, j) + 3.0 * h(r, r, j, j));
            p.add(mono({{r, 1}}, {{j, 2}}), B(r, r, j, j));
            p.add(mono({{j, 1}}, {{r, 1}, {j, 1}}), B(r, j, j, r) + B(r, j, r, j));
        }
        p.prune(1e-15);
    }
    return out;
}

// Non-trivial third-order resonances among the masters with nonzero coupling.
void reject_master_resonances(const VectorXd& w, int m, const Coef4& A, const Coef4& B, const Coef4& h,
                              const std::vector<int>& masters, double tol) {
    for (int r = 0; r < m; ++r)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j)
                for (int k = j; k < m; ++k) {
                    std::vector<int> idx{i, j, k};
                    bool trivial = false;
                    for (int a = 0; a < 3; ++a)
                        if (idx[a] == r && idx[(a + 1) % 3] == idx[(a + 2) % 3]) trivial = true;
                    if (trivial) continue;
                    bool hit = false;
                    for (int mask = 0; mask < 8 && !hit; ++mask) {
                        double c = 0.0;
                        for (int a = 0; a < 3; ++a) c += ((mask >> a) & 1 ? -1.0 : 1.0) * w(idx[a]);
                        hit = std::abs(c - w(r)) < tol * w(r);
                    }
                    if (!hit) continue;
                    double mag = 0.0;
                    std::sort(idx.begin(), idx.end());
                    do {
                        mag += std::abs(A(r, idx[0], idx[1], idx[2])) + std::abs(B(r, idx[0], idx[1], idx[2])) +
                               std::abs(h(r, idx[0], idx[1], idx[2]));
                    } while (std::next_permutation(idx.begin(), idx.end()));
                    if (mag == 0.0) continue;
                    std::ostringstream os;
                    os << "internal resonance among masters: monomial of " << mode_name(masters[i]) << ", "
                       << mode_name(masters[j]) << ", " << mode_name(masters[k]) << " is resonant on the equation of "
                       << mode_name(masters[r]) << " and must be retained; use the parametrisation engine";
                    throw ResonanceError(os.str());
                }
}

// Eigenvalue of K v = mu M v closest to sigma, by inverse iteration.
double nearest_eigenvalue(const MatrixXd& K, const MatrixXd& M, double sigma) {
    Eigen::PartialPivLU<MatrixXd> lu(sigma * M - K);
    VectorXd v = VectorXd::LinSpaced(K.rows(), 1.0, 2.0);
    v.normalize();
    for (int it = 0; it < 50; ++it) {
        VectorXd w = lu.solve(M * v);
        double nw = w.norm();
        if (!std::isfinite(nw) || nw == 0.0) return sigma;
        v = w / nw;
    }
    return v.dot(K * v) / v.dot(M * v);
}

}  // namespace

Rom graph_single(const ModalModel& mm, int m, double tol) {
    const int N = mm.size();
    check_index(N, m);
    const double wm = mm.omega(m), wm2 = wm * wm;

    Rom rom;
    rom.map = linear_modal_map(N, {m}, "graph");
    rom.map.order = 2;
    RealPoly rest = zero_poly(1);
    rest.add({2, 0}, mm.g({m, m, m}));
    double c3 = mm.h({m, m, m, m}), c12 = 0.0;
    for (int s = 0; s < N; ++s) {
        if (s == m) continue;
        const double gs = mm.g({s, m, m});
        if (gs == 0.0) continue;
        const double ws2 = mm.omega(s) * mm.omega(s);
        if (std::abs(mm.omega(s) - 2.0 * wm) < tol * wm)
            throw ResonanceError("cross resonance: " + mode_name(s) + " is in 1:2 internal resonance with master " +
                                 mode_name(m) + "; the single-master manifold does not exist, add " +
                                 mode_name(s) + " to the masters");
        const double den = ws2 * (ws2 - 4.0 * wm2);
        const double a = (2.0 * wm2 - ws2) * gs / den;
        const double b = 2.0 * gs / den;
        const double alpha = -2.0 * gs / (ws2 - 4.0 * wm2);
        rom.map.displacement[s].add({2, 0}, a);
        rom.map.displacement[s].add({0, 2}, b);
        rom.map.velocity[s].add({1, 1}, alpha);
        c3 += 2.0 * gs * a;
        c12 += 2.0 * gs * b;
    }
    rest.add({3, 0}, c3);
    rest.add({1, 2}, c12);

    ReducedModel& rm = rom.reduced;
    rm.method = "graph";
    rm.masters = {m};
    rm.omega = VectorXd::Constant(1, wm);
    if (mm.xi(m) != 0.0) rm.damping_ratio = VectorXd::Constant(1, mm.xi(m));
    rm.restoring = {rest};
    return rom;
}

Rom graph_multi(const ModalModel& mm, const std::vector<int>& masters) {
    check_masters(mm.size(), masters);
    DiagonalSystem sys = diagonalize(mm);
    Parametrisation par = parametrise(sys, masters, 3, Style::Graph);
    Rom rom = to_real_form(par, sys, "graph");
    return rom;
}

NfQuadratic nf_quadratic(const ModalModel& mm, const std::vector<int>& masters, double tol) {
    const int N = mm.size();
    check_masters(N, masters);
    NfQuadratic q;
    q.masters = masters;
    for (int i : masters)
        for (int j : masters) {
            VectorXd a = VectorXd::Zero(N), b = VectorXd::Zero(N), c = VectorXd::Zero(N);
            const double wi = mm.omega(i), wj = mm.omega(j);
            for (int k = 0; k < N; ++k) {
                const double g = mm.g({k, i, j});
                if (g == 0.0) continue;
                const double wk = mm.omega(k), wk2 = wk * wk;
                if (std::abs(wk - (wi + wj)) < tol * wk || std::abs(wk - std::abs(wi - wj)) < tol * wk) {
                    std::ostringstream os;
                    os << "cross resonance: " << mode_name(k) << " is in second-order internal resonance with "
                       << mode_name(i) << " and " << mode_name(j) << " (w" << k + 1 << " = w" << i + 1
                       << (std::abs(wk - (wi + wj)) < tol * wk ? " + " : " - ") << "w" << j + 1
                       << "); add " << mode_name(k) << " to the masters";
                    throw ResonanceError(os.str());
                }
                const double dp = (wi + wj) * (wi + wj) - wk2;
                const double dn = (wi - wj) * (wi - wj) - wk2;
                const double den = dp * dn;
                a(k) = (wi * wi + wj * wj - wk2) * g / den;
                b(k) = 2.0 * g / den;
                c(k) = 2.0 * g * (wj * wj - wi * wi - wk2) / den;
            }
            q.a[{i, j}] = a;
            q.b[{i, j}] = b;
            q.gamma[{i, j}] = c;
        }
    return q;
}

Rom nf_third_order(const ModalModel& mm, const std::vector<int>& masters, double tol) {
    const int N = mm.size();
    NfQuadratic q = nf_quadratic(mm, masters, tol);
    const int m = int(masters.size());

    auto A = [&](int r, int i, int j, int k) {
        const VectorXd& a = q.a.at({masters[j], masters[k]});
        double s = 0.0;
        for (int p = 0; p < N; ++p) s += 2.0 * mm.g({masters[r], masters[i], p}) * a(p);
        return s;
    };
    auto B = [&](int r, int i, int j, int k) {
        const VectorXd& b = q.b.at({masters[j], masters[k]});
        double s = 0.0;
        for (int p = 0; p < N; ++p) s += 2.0 * mm.g({masters[r], masters[i], p}) * b(p);
        return s;
    };
    auto h = [&](int r, int i, int j, int k) {
        return mm.h({masters[r], masters[i], masters[j], masters[k]});
    };
    VectorXd wmaster(m);
    for (int a = 0; a < m; ++a) wmaster(a) = mm.omega(masters[a]);
    reject_master_resonances(wmaster, m, A, B, h, masters, tol);

    Rom rom;
    rom.map = linear_modal_map(N, masters, "normal-form");
    rom.map.order = 2;
    for (int ia = 0; ia < m; ++ia)
        for (int ib = 0; ib < m; ++ib) {
            const VectorXd& a = q.a.at({masters[ia], masters[ib]});
            const VectorXd& b = q.b.at({masters[ia], masters[ib]});
            const VectorXd& c = q.gamma.at({masters[ia], masters[ib]});
            std::vector<int> xx(m, 0), yy(m, 0), none(m, 0), xy(m, 0), yx(m, 0);
            xx[ia] += 1;
            xx[ib] += 1;
            yy[ia] += 1;
            yy[ib] += 1;
            xy[ia] = 1;
            yx[ib] = 1;
            for (int k = 0; k < N; ++k) {
                rom.map.displacement[k].add(exponents(xx, none), a(k));
                rom.map.displacement[k].add(exponents(none, yy), b(k));
                rom.map.velocity[k].add(exponents(xy, yx), c(k));
            }
        }

    ReducedModel& rm = rom.reduced;
    rm.method = "nf";
    rm.masters = masters;
    rm.omega = wmaster;
    bool damped = false;
    VectorXd xi(m);
    for (int a = 0; a < m; ++a) {
        xi(a) = mm.xi(masters[a]);
        damped = damped || xi(a) != 0.0;
    }
    if (damped) rm.damping_ratio = xi;
    rm.restoring = nf_reduced_terms(m, A, B, h);
    return rom;
}

DnfResult dnf_second_order(const PhysicalModel& model, const std::vector<int>& masters, double tol) {
    const int n = model.n;
    check_masters(n, masters);
    const int m = int(masters.size());
    int top = *std::max_element(masters.begin(), masters.end()) + 1;
    ModalModel basis = assemble_modal(PhysicalModel{model.n, model.mass, model.stiffness, QuadTensor(n), CubicTensor(n)}, top);

    DnfResult res;
    res.phi.resize(n, m);
    res.omega.resize(m);
    for (int a = 0; a < m; ++a) {
        res.phi.col(a) = basis.V.col(masters[a]);
        res.omega(a) = basis.omega(masters[a]);
    }
    const MatrixXd& M = model.mass;
    const MatrixXd& K = model.stiffness;

    auto solve_shift = [&](double w, const VectorXd& rhs, int i, int j, const char* op) -> VectorXd {
        const double sigma = w * w;
        if (w > 0) {
            double mu = nearest_eigenvalue(K, M, sigma);
            if (std::abs(std::sqrt(std::max(mu, 0.0)) - w) < tol * w) {
                std::ostringstream os;
                os << "cross resonance: w" << masters[i] + 1 << " " << op << " w" << masters[j] + 1 << " = " << w
                   << " coincides with an eigenfrequency " << std::sqrt(std::max(mu, 0.0))
                   << "; the direct normal form is singular, enlarge the master set";
                throw ResonanceError(os.str());
            }
        }
        Eigen::PartialPivLU<MatrixXd> lu(sigma * M - K);
        VectorXd x = lu.solve(rhs);
        if (!x.allFinite()) throw NumericalError("singular shifted stiffness in the direct normal form");
        return x;
    };

    for (int ia = 0; ia < m; ++ia)
        for (int ib = ia; ib < m; ++ib) {
            const double wi = res.omega(ia), wj = res.omega(ib);
            VectorXd pi = res.phi.col(ia), pj = res.phi.col(ib);
            VectorXd G = quad_apply(model.quad, pi, pj);
            VectorXd psiP = VectorXd::Zero(n), psiN = VectorXd::Zero(n);
            if (G.norm() > 0) {
                psiP = solve_shift(wi + wj, G, ia, ib, "+");
                psiN = solve_shift(std::abs(wi - wj), G, ia, ib, "-");
            }
            VectorXd a = 0.5 * (psiP + psiN);
            VectorXd b = -(psiP - psiN) / (2.0 * wi * wj);
            res.a[{ia, ib}] = res.a[{ib, ia}] = a;
            res.b[{ia, ib}] = res.b[{ib, ia}] = b;
            res.gamma[{ia, ib}] = ((wj + wi) / wj) * psiP + ((wj - wi) / wj) * psiN;
            res.gamma[{ib, ia}] = ((wi + wj) / wi) * psiP + ((wi - wj) / wi) * psiN;
        }

    auto proj = [&](int r, int i, const VectorXd& v) {
        VectorXd pi = res.phi.col(i);
        return res.phi.col(r).dot(quad_apply(model.quad, pi, v));
    };
    auto A = [&](int r, int i, int j, int k) { return 2.0 * proj(r, i, res.a.at({j, k})); };
    auto B = [&](int r, int i, int j, int k) { return 2.0 * proj(r, i, res.b.at({j, k})); };
    auto h = [&](int r, int i, int j, int k) {
        if (!model.cubic.nnz()) return 0.0;
        VectorXd pi = res.phi.col(i), pj = res.phi.col(j), pk = res.phi.col(k);
        return res.phi.col(r).dot(cubic_apply(model.cubic, pi, pj, pk));
    };
    reject_master_resonances(res.omega, m, A, B, h, masters, tol);

    Rom& rom = res.rom;
    ManifoldMap& map = rom.map;
    map.style = "normal-form";
    map.space = "physical";
    map.order = 2;
    map.masters = masters;
    map.displacement.assign(n, zero_poly(m));
    map.velocity.assign(n, zero_poly(m));
    std::vector<int> none(m, 0);
    for (int a = 0; a < m; ++a) {
        std::vector<int> e(m, 0);
        e[a] = 1;
        for (int d = 0; d < n; ++d) {
            map.displacement[d].add(exponents(e, none), res.phi(d, a));
            map.velocity[d].add(exponents(none, e), res.phi(d, a));
        }
    }
    for (int ia = 0; ia < m; ++ia)
        for (int ib = 0; ib < m; ++ib) {
            std::vector<int> two(m, 0), x1(m, 0), y1(m, 0);
            two[ia] += 1;
            two[ib] += 1;
            x1[ia] = 1;
            y1[ib] = 1;
            const VectorXd& a = res.a.at({ia, ib});
            const VectorXd& b = res.b.at({ia, ib});
            const VectorXd& c = res.gamma.at({ia, ib});
            for (int d = 0; d < n; ++d) {
                map.displacement[d].add(exponents(two, none), a(d));
                map.displacement[d].add(exponents(none, two), b(d));
                map.velocity[d].add(exponents(x1, y1), c(d));
            }
        }
    for (auto& p : map.displacement) p.prune(0.0);
    for (auto& p : map.velocity) p.prune(0.0);

    ReducedModel& rm = rom.reduced;
    rm.method = "dnf";
    rm.masters = masters;
    rm.omega = res.omega;
    rm.restoring = nf_reduced_terms(m, A, B, h);
    return res;
}

EquivalenceReport gamma_equivalence_check(const ModalModel& mm, int m) {
    Rom graph = graph_single(mm, m);
    Rom nf = nf_third_order(mm, {m});
    EquivalenceReport rep;
    rep.gamma_graph = hb_gamma(graph.reduced);
    rep.gamma_nf = hb_gamma(nf.reduced);

    for (int s = 0; s < mm.size(); ++s) {
        if (s == m) continue;
        for (auto e : {Exps{2, 0}, Exps{0, 2}}) {
            double d = std::abs(graph.map.displacement[s].coeff(e) - nf.map.displacement[s].coeff(e));
            rep.max_coefficient_gap = std::max(rep.max_coefficient_gap, d);
        }
        double d = std::abs(graph.map.velocity[s].coeff({1, 1}) - nf.map.velocity[s].coeff({1, 1}));
        rep.max_coefficient_gap = std::max(rep.max_coefficient_gap, d);
    }

    // Lie derivative along the normal-form flow R' = S, S' = -w^2 R - N(R, S)
    const double w = mm.omega(m), w2 = w * w;
    RealPoly Sdot = RealPoly::variable(2, 0, -w2) - nf.reduced.restoring[0];
    auto lie = [&](const RealPoly& p) {
        return p.derivative(0).mul(RealPoly::variable(2, 1)) + p.derivative(1).mul(Sdot);
    };
    const RealPoly X = nf.map.displacement[m];
    const RealPoly Xd = lie(X);
    const RealPoly Xdd = lie(Xd);
    RealPoly res = Xdd + X * w2 + graph.reduced.restoring[0].compose({X, Xd}, -1);

    for (int k = 0; k < 6; ++k) {
        double A = 1e-3 * std::pow(10.0, k / 5.0);
        double worst = 0.0;
        for (int t = 0; t < 64; ++t) {
            double th = 2.0 * M_PI * t / 64.0;
            worst = std::max(worst, std::abs(res.evaluate<double>({A * std::cos(th), -A * w * std::sin(th)})));
        }
        rep.amplitudes.push_back(A);
        rep.residuals.push_back(worst);
    }
    const bool exact = *std::max_element(rep.residuals.begin(), rep.residuals.end()) == 0.0;
    rep.slope = exact ? std::numeric_limits<double>::infinity() : loglog_slope(rep.amplitudes, rep.residuals);
    return rep;
}

}  // namespace nlrom
