#include "nlrom/parametrisation.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace nlrom {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

VectorXcd modal_force(const ModalModel& mm, const VectorXcd& x) {
    VectorXcd F = VectorXcd::Zero(mm.size());
    if (mm.g.nnz()) F += quad_apply(mm.g, x, x);
    if (mm.h.nnz()) F += cubic_apply(mm.h, x, x, x);
    return F;
}

// g(X,X) and h(X,X,X) for a vector of polynomials, truncated at max_deg.
std::vector<ComplexPoly> poly_force(const ModalModel& mm, const std::vector<ComplexPoly>& X,
                                    int max_deg) {
    const int N = mm.size();
    const int nv = X[0].nvars();
    std::vector<ComplexPoly> F(N, ComplexPoly(nv));
    std::map<std::pair<int, int>, ComplexPoly> pairs;
    auto pair = [&](int i, int j) -> const ComplexPoly& {
        if (i > j) std::swap(i, j);
        auto it = pairs.find({i, j});
        if (it == pairs.end()) it = pairs.emplace(std::make_pair(i, j), X[i].mul(X[j], max_deg)).first;
        return it->second;
    };
    for (const auto& [key, v] : mm.g.entries()) {
        auto p = key;
        do {
            F[p[0]] += pair(p[1], p[2]) * cplx(v);
        } while (std::next_permutation(p.begin(), p.end()));
    }
    for (const auto& [key, v] : mm.h.entries()) {
        auto p = key;
        do {
            F[p[0]] += pair(p[1], p[2]).mul(X[p[3]], max_deg) * cplx(v);
        } while (std::next_permutation(p.begin(), p.end()));
    }
    return F;
}

ComplexPoly drop_linear(const ComplexPoly& p) {
    ComplexPoly q(p.nvars());
    for (const auto& [e, c] : p.terms())
        if (degree(e) >= 2) q.add(e, c);
    return q;
}

std::string monomial_text(const Exps& e) {
    std::ostringstream os;
    os << "[";
    for (std::size_t v = 0; v < e.size(); ++v) os << (v ? "," : "") << e[v];
    os << "]";
    return os.str();
}

}  // namespace

VectorXcd DiagonalSystem::nonlinear(const VectorXcd& z) const {
    const int N = n_modes();
    VectorXcd x(N);
    for (int p = 0; p < N; ++p) x(p) = z(2 * p) + z(2 * p + 1);
    VectorXcd F = modal_force(modal, x);
    VectorXcd out(2 * N);
    for (int p = 0; p < N; ++p) {
        cplx d = lambda(2 * p) - lambda(2 * p + 1);
        out(2 * p) = -F(p) / d;
        out(2 * p + 1) = F(p) / d;
    }
    return out;
}

VectorXcd DiagonalSystem::field(const VectorXcd& z) const {
    return lambda.cwiseProduct(z) + nonlinear(z);
}

DiagonalSystem diagonalize(const ModalModel& mm) {
    DiagonalSystem sys;
    sys.modal = mm;
    const int N = mm.size();
    sys.lambda.resize(2 * N);
    sys.P = MatrixXcd::Zero(2 * N, 2 * N);
    for (int p = 0; p < N; ++p) {
        const double w = mm.omega(p), xi = mm.xi(p);
        cplx root = std::sqrt(cplx(xi * xi - 1.0, 0.0)) * w;
        cplx lp = -xi * w + root, lm = -xi * w - root;
        if (std::abs(lp - lm) < 1e-12 * std::max(w, 1.0))
            throw NumericalError("defective linear part for mode " + std::to_string(p + 1));
        sys.lambda(2 * p) = lp;
        sys.lambda(2 * p + 1) = lm;
        sys.P(p, 2 * p) = 1.0;
        sys.P(p, 2 * p + 1) = 1.0;
        sys.P(N + p, 2 * p) = lp;
        sys.P(N + p, 2 * p + 1) = lm;
    }
    return sys;
}

Parametrisation parametrise(const DiagonalSystem& sys, const std::vector<int>& masters, int order,
                            Style style, const ParametriseOptions& opt) {
    const int N = sys.n_modes();
    check_masters(N, masters);
    if (order < 1) throw std::invalid_argument("order must be at least 1");
    if (order > opt.max_order) throw std::invalid_argument("order exceeds the configured cap");

    const int m = int(masters.size());
    const int nv = 2 * m;
    Parametrisation par;
    par.style = style;
    par.order = order;
    par.masters = masters;
    par.lambda_master.resize(nv);
    // component index -> master variable, or -1 for slave coordinates
    std::vector<int> var_of(2 * N, -1);
    for (int a = 0; a < m; ++a) {
        par.lambda_master(2 * a) = sys.lambda(2 * masters[a]);
        par.lambda_master(2 * a + 1) = sys.lambda(2 * masters[a] + 1);
        var_of[2 * masters[a]] = 2 * a;
        var_of[2 * masters[a] + 1] = 2 * a + 1;
    }

    par.W.assign(2 * N, ComplexPoly(nv));
    par.f.assign(nv, ComplexPoly(nv));
    for (int v = 0; v < nv; ++v) par.f[v] = ComplexPoly::variable(nv, v, par.lambda_master(v));
    for (int i = 0; i < 2 * N; ++i)
        if (var_of[i] >= 0) par.W[i] = ComplexPoly::variable(nv, var_of[i]);

    for (int k = 2; k <= order; ++k) {
        std::vector<ComplexPoly> X(N, ComplexPoly(nv));
        for (int p = 0; p < N; ++p) X[p] = par.W[2 * p] + par.W[2 * p + 1];
        std::vector<ComplexPoly> F = poly_force(sys.modal, X, k);

        std::vector<ComplexPoly> fnl(nv);
        for (int v = 0; v < nv; ++v) fnl[v] = drop_linear(par.f[v]);

        std::vector<ComplexPoly> eta(2 * N, ComplexPoly(nv));
        double scale = 0.0;
        for (int i = 0; i < 2 * N; ++i) {
            const int p = i / 2;
            cplx d = sys.lambda(2 * p) - sys.lambda(2 * p + 1);
            cplx c = (i % 2 == 0) ? -1.0 / d : 1.0 / d;
            // eta = -N_k + [D W_{<k} f_{<k}]_k
            ComplexPoly e = F[p].homogeneous(k) * (-c);
            ComplexPoly Wnl = drop_linear(par.W[i]);
            for (int v = 0; v < nv; ++v) {
                if (fnl[v].empty()) continue;
                ComplexPoly dW = Wnl.derivative(v);
                if (dW.empty()) continue;
                e += dW.mul(fnl[v], k).homogeneous(k);
            }
            for (const auto& [ex, cc] : e.terms()) scale = std::max(scale, std::abs(cc));
            eta[i] = std::move(e);
        }

        for (int i = 0; i < 2 * N; ++i) {
            const cplx li = sys.lambda(i);
            for (const auto& [ex, val] : eta[i].terms()) {
                cplx md = 0.0;
                for (int v = 0; v < nv; ++v) md += double(ex[v]) * par.lambda_master(v);
                const cplx div = li - md;
                const bool resonant = std::abs(div) < opt.near_resonance * std::abs(li);
                const int v = var_of[i];
                if (v < 0) {
                    if (resonant) {
                        if (std::abs(val) <= 1e-13 * std::max(scale, 1.0)) continue;
                        std::ostringstream os;
                        os << "cross resonance: slave mode " << i / 2 + 1
                           << " is resonant with master monomial " << monomial_text(ex) << " at order "
                           << k << "; enlarge the master set to include mode " << i / 2 + 1;
                        throw ResonanceError(os.str());
                    }
                    par.W[i].add(ex, val / div);
                } else if (style == Style::Graph) {
                    par.f[v].add(ex, -val);
                } else if (resonant) {
                    par.f[v].add(ex, -val);
                    std::ostringstream os;
                    os << "kept resonant monomial " << monomial_text(ex) << " in master coordinate " << v;
                    par.resonance_log.push_back(os.str());
                } else {
                    par.W[i].add(ex, val / div);
                }
            }
        }
    }
    return par;
}

std::vector<double> invariance_residual(const Parametrisation& par, const DiagonalSystem& sys,
                                        const std::vector<double>& amplitudes, int samples) {
    const int nv = par.n_vars();
    const int m = nv / 2;
    const int n = int(par.W.size());
    std::vector<std::vector<ComplexPoly>> dW(n, std::vector<ComplexPoly>(nv));
    for (int i = 0; i < n; ++i)
        for (int v = 0; v < nv; ++v) dW[i][v] = par.W[i].derivative(v);

    std::vector<double> out;
    for (double A : amplitudes) {
        double worst = 0.0;
        long total = 1;
        for (int a = 0; a < m; ++a) total *= samples;
        for (long idx = 0; idx < total; ++idx) {
            std::vector<cplx> s(nv);
            long rem = idx;
            for (int a = 0; a < m; ++a) {
                double th = 2.0 * M_PI * double(rem % samples) / samples + 0.1 * (a + 1);
                rem /= samples;
                s[2 * a] = 0.5 * A * std::exp(cplx(0.0, th));
                s[2 * a + 1] = std::conj(s[2 * a]);
            }
            VectorXcd z(n), lhs(n);
            std::vector<cplx> fv(nv);
            for (int v = 0; v < nv; ++v) fv[v] = par.f[v].evaluate(s);
            for (int i = 0; i < n; ++i) {
                z(i) = par.W[i].evaluate(s);
                cplx acc = 0.0;
                for (int v = 0; v < nv; ++v) acc += dW[i][v].evaluate(s) * fv[v];
                lhs(i) = acc;
            }
            worst = std::max(worst, (sys.field(z) - lhs).norm());
        }
        out.push_back(worst);
    }
    return out;
}

double loglog_slope(const std::vector<double>& amplitudes, const std::vector<double>& residuals) {
    if (amplitudes.size() != residuals.size() || amplitudes.size() < 2)
        throw std::invalid_argument("slope fit needs at least two points");
    const int n = int(amplitudes.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        double x = std::log(amplitudes[i]), y = std::log(residuals[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Parametrisation without_order(Parametrisation par, int k) {
    for (auto& w : par.W) {
        ComplexPoly q(w.nvars());
        for (const auto& [e, c] : w.terms())
            if (degree(e) != k) q.add(e, c);
        w = q;
    }
    return par;
}

Rom to_real_form(const Parametrisation& par, const DiagonalSystem& sys, const std::string& method) {
    const int nv = par.n_vars();
    const int m = nv / 2;
    const int K = par.order;
    const int N = sys.n_modes();

    // s in terms of real (x, y)
    std::vector<ComplexPoly> subs(nv, ComplexPoly(nv));
    for (int a = 0; a < m; ++a) {
        cplx lp = par.lambda_master(2 * a), lm = par.lambda_master(2 * a + 1), d = lp - lm;
        Exps ex(nv, 0), ey(nv, 0);
        ex[a] = 1;
        ey[m + a] = 1;
        subs[2 * a].add(ex, -lm / d);
        subs[2 * a].add(ey, 1.0 / d);
        subs[2 * a + 1].add(ex, lp / d);
        subs[2 * a + 1].add(ey, -1.0 / d);
    }
    const double tol = 1e-8;

    Rom rom;
    ManifoldMap& map = rom.map;
    map.style = par.style == Style::Graph ? "graph" : "normal-form";
    map.space = "modal";
    map.order = K;
    map.masters = par.masters;
    for (int p = 0; p < N; ++p) {
        ComplexPoly xd = par.W[2 * p] + par.W[2 * p + 1];
        ComplexPoly xv = par.W[2 * p] * sys.lambda(2 * p) + par.W[2 * p + 1] * sys.lambda(2 * p + 1);
        RealPoly rd = real_part(xd.compose(subs, K), tol);
        RealPoly rv = real_part(xv.compose(subs, K), tol);
        rd.prune(1e-14);
        rv.prune(1e-14);
        map.displacement.push_back(rd);
        map.velocity.push_back(rv);
    }

    ReducedModel& rm = rom.reduced;
    rm.method = method;
    rm.masters = par.masters;
    rm.omega.resize(m);
    rm.damping_ratio = VectorXd::Zero(m);
    bool damped = false;
    for (int a = 0; a < m; ++a) {
        rm.omega(a) = sys.modal.omega(par.masters[a]);
        rm.damping_ratio(a) = sys.modal.xi(par.masters[a]);
        damped = damped || rm.damping_ratio(a) != 0.0;
    }
    if (!damped) rm.damping_ratio.resize(0);

    std::vector<RealPoly> Q(m), Pn(m), D(m);
    for (int a = 0; a < m; ++a) {
        ComplexPoly fu = drop_linear(par.f[2 * a]), fv = drop_linear(par.f[2 * a + 1]);
        cplx lp = par.lambda_master(2 * a), lm = par.lambda_master(2 * a + 1);
        ComplexPoly q = fu + fv;
        ComplexPoly pn = fu * lp + fv * lm;
        ComplexPoly dq(nv);
        for (int v = 0; v < nv; ++v) dq += q.derivative(v).mul(par.f[v], K);
        Q[a] = real_part(q.compose(subs, K), tol);
        Pn[a] = real_part(pn.compose(subs, K), tol);
        D[a] = real_part(dq.compose(subs, K), tol);
    }

    // normal velocity S in terms of (R, R'): S = R' - Q(R, S)
    std::vector<RealPoly> S(nv);
    for (int v = 0; v < nv; ++v) S[v] = RealPoly::variable(nv, v);
    for (int it = 0; it < K; ++it) {
        std::vector<RealPoly> next = S;
        for (int a = 0; a < m; ++a)
            next[m + a] = RealPoly::variable(nv, m + a) - Q[a].compose(S, K);
        S = next;
    }

    for (int a = 0; a < m; ++a) {
        const double w = rm.omega(a), xi = rm.xi(a);
        RealPoly acc = RealPoly::variable(nv, a, -w * w) + RealPoly::variable(nv, m + a, -2.0 * xi * w) +
                       Pn[a] + D[a];
        RealPoly accRV = acc.compose(S, K);
        RealPoly rest = (accRV + RealPoly::variable(nv, a, w * w) +
                         RealPoly::variable(nv, m + a, 2.0 * xi * w)) *
                        -1.0;
        rest.prune(1e-12 * std::max(1.0, w * w));
        rm.restoring.push_back(rest);
    }
    return rom;
}

}  // namespace nlrom
